use std::fs::File;
use std::io::BufReader;

use allocnet::graph::{io::read_edge_list, spectral_bounds};

use crate::error::CliError;
use crate::SpectrumArgs;

pub fn run(args: SpectrumArgs) -> Result<(), CliError> {
    let file = File::open(&args.input)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.input.display())))?;
    let g = read_edge_list(BufReader::new(file))?;
    println!("n={}", g.node_count());
    println!("edges={}", g.edge_count());
    println!("mean_degree={}", g.mean_degree());
    println!("connected={}", g.is_connected());
    let s = spectral_bounds(&g)?;
    println!("lambda2={}", s.lambda2);
    println!("lambda_n={}", s.lambda_n);
    println!("ratio={}", s.ratio);
    Ok(())
}
