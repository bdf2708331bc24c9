use std::fs::File;
use std::io::{BufWriter, Write};

use allocnet::graph::{assign_weights, generate, io::write_edge_list, GraphModelSpec};

use crate::error::CliError;
use crate::GenerateArgs;

pub fn run(args: GenerateArgs) -> Result<(), CliError> {
    let model = super::model_from_flags(
        &args.model,
        args.n,
        args.p,
        args.m,
        args.theta,
        args.sigma,
        args.min_degree,
        args.rows,
        args.cols,
    )?;
    let mut g = generate(&GraphModelSpec { model, seed: args.seed })?;

    match (args.weight_low, args.weight_high) {
        (Some(low), Some(high)) => {
            g = assign_weights(&g, low, high, args.weight_seed.unwrap_or(args.seed.wrapping_add(1)))?;
        }
        (None, None) => {}
        _ => {
            return Err(CliError::Usage(
                "--weight-low and --weight-high must be given together".into(),
            ))
        }
    }

    let stats = format!(
        "n={} edges={} connected={} mean_degree={}",
        g.node_count(),
        g.edge_count(),
        g.is_connected(),
        g.mean_degree()
    );
    match &args.out {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            write_edge_list(&g, &mut out)?;
            out.flush()?;
            println!("{stats}");
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            write_edge_list(&g, &mut out)?;
            out.flush()?;
            eprintln!("{stats}");
        }
    }
    Ok(())
}
