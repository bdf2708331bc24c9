//! Canonical lossy-allocation experiment, pinned seeds end to end.
//!
//! A 20-node random graph with exactly 56 links (mean degree 5.6, threshold
//! 1/5.6), random symmetric weights in (0, 10], boxes [2, 7] with demand 100,
//! randomized quadratic-plus-softplus costs whose curvature stays below
//! 2u = 0.1 inside the boxes, cubic node map, logarithmic link quantizer at
//! rho = 1/256, step size 0.05, and link-removal rates
//! [0.64, 0.71, 0.79, 0.86, 0.93] cycling in 40-step periods (drop rates are
//! the exact preimages 1 - sqrt(1 - p_l)). The emitted `config.toml` reruns
//! the experiment through `allocnet run` byte-for-byte.

use std::fs;
use std::io::Write;

use allocnet::graph::{io::write_edge_list, laplacian_eigenvalues, spectral_bounds, WeightedGraph};
use allocnet::percolation::{er_threshold_from_mean_degree, min_window_b_from_removal, removal_to_drop_rate};
use allocnet::sim::run as run_sim;

use crate::config::{
    AuditSection, DropsSection, DynamicsSection, ExperimentConfig, GraphSection, MapSpec,
    MapsSection, ObjectivesSection, OracleSection, OutputSection, WeightsSection,
};
use crate::error::CliError;
use crate::ReplicateArgs;

pub const REMOVAL_RATES: [f64; 5] = [0.64, 0.71, 0.79, 0.86, 0.93];

pub fn canonical_config(iters: u64) -> ExperimentConfig {
    let drop_rates: Vec<f64> = REMOVAL_RATES.iter().map(|&pl| 1.0 - (1.0 - pl).sqrt()).collect();
    ExperimentConfig {
        seed: 14,
        graph: GraphSection {
            model: "er".into(),
            n: Some(20),
            p: Some(0.3),
            m: None,
            theta: None,
            sigma: None,
            min_degree: None,
            rows: None,
            cols: None,
            path: None,
            seed: Some(11),
        },
        weights: Some(WeightsSection { low: 0.0, high: 10.0, seed: Some(12) }),
        objectives: ObjectivesSection {
            kind: "quad-logexp".into(),
            // Curvature a + l^2/4 stays below 0.1 on the box, matching the
            // experiment's u = 0.05.
            a_range: Some([0.04, 0.09]),
            c_range: Some([2.0, 7.0]),
            l_range: Some([0.0, 0.15]),
            d_range: Some([2.0, 7.0]),
            box_bounds: Some([2.0, 7.0]),
            gamma: Some(1.0),
            seed: Some(13),
        },
        maps: MapsSection {
            g_n: MapSpec { kind: "cubic".into(), rho: None, v1: None, v2: None },
            g_l: MapSpec {
                kind: "log-quantizer".into(),
                rho: Some(1.0 / 256.0),
                v1: None,
                v2: None,
            },
        },
        dynamics: DynamicsSection {
            eta: 0.05,
            demand: 100.0,
            max_iters: iters,
            feas_tol: Some(1e-9),
            dispersion_tol: None,
        },
        drops: Some(DropsSection {
            mode: "scheduled".into(),
            p_d: None,
            rates: Some(drop_rates),
            period: Some(40),
            seed: Some(15),
        }),
        audit: Some(AuditSection { window: 23 }),
        oracle: Some(OracleSection { enabled: true, tol: Some(1e-10) }),
        output: Some(OutputSection { dir: None, states: Some(true) }),
    }
}

pub fn run(args: ReplicateArgs) -> Result<(), CliError> {
    let out_dir = match args.out {
        Some(dir) => dir,
        None => {
            let base = std::env::var("ALLOCNET_OUT_DIR")
                .map(std::path::PathBuf::from)
                .unwrap_or_else(|_| std::path::PathBuf::from("."));
            base.join("replication")
        }
    };
    fs::create_dir_all(&out_dir)?;

    let cfg = canonical_config(args.iters.unwrap_or(5000));
    fs::write(out_dir.join("config.toml"), cfg.to_toml())?;

    let run_config = cfg.build_run()?;
    let graph = &run_config.graph;
    assert_eq!(graph.edge_count(), 56, "canonical instance drifted");

    let mut buf = Vec::new();
    write_edge_list(graph, &mut buf)?;
    fs::write(out_dir.join("graph.edges"), buf)?;

    // Window table from the scheduled removal rates, under the formula
    // threshold 1/<N> and its rounded form 0.177.
    let p_c = er_threshold_from_mean_degree(graph.mean_degree())?.p_c;
    let mut bstar = String::from("p_l,p_d,bstar_formula,bstar_rounded\n");
    let mut table = Vec::new();
    for &pl in &REMOVAL_RATES {
        let pd = removal_to_drop_rate(pl)?;
        let b_formula = min_window_b_from_removal(pl, p_c)?;
        let b_rounded = min_window_b_from_removal(pl, 0.177)?;
        bstar.push_str(&format!("{pl},{pd},{b_formula},{b_rounded}\n"));
        table.push(b_formula);
    }
    fs::write(out_dir.join("bstar.csv"), &bstar)?;

    write_spectral(graph, &out_dir)?;

    let trace = run_sim(&run_config)?;
    super::run::write_artifacts(&cfg, graph, &trace, &out_dir)?;

    println!("out_dir={}", out_dir.display());
    println!("mean_degree={}", graph.mean_degree());
    println!("p_c={p_c}");
    println!("bstar_table={table:?}");
    for line in super::run::summary_lines(&cfg, graph, &trace)? {
        println!("{line}");
    }
    Ok(())
}

/// Spectral summary of the audited union topology. Every scheduled window
/// that connects has union equal to the base graph, so the weighted base
/// Laplacian is the natural certificate; the unit-weight spectrum is listed
/// alongside because step-bound conventions differ on which one to use.
fn write_spectral(graph: &WeightedGraph, out_dir: &std::path::Path) -> Result<(), CliError> {
    let weighted = spectral_bounds(graph)?;
    let unit = WeightedGraph::with_edges(
        graph.node_count(),
        graph.edges().iter().map(|e| (e.a, e.b, 1.0)),
    )?;
    let unit_spec = spectral_bounds(&unit)?;
    let eigs = laplacian_eigenvalues(graph);
    let mut text = String::new();
    text.push_str(&format!(
        "weighted: lambda2={} lambda_n={} ratio={}\n",
        weighted.lambda2, weighted.lambda_n, weighted.ratio
    ));
    text.push_str(&format!(
        "unit-weight: lambda2={} lambda_n={} ratio={}\n",
        unit_spec.lambda2, unit_spec.lambda_n, unit_spec.ratio
    ));
    text.push_str("weighted_eigenvalues:");
    for e in eigs {
        text.push_str(&format!(" {e}"));
    }
    text.push('\n');
    let mut file = fs::File::create(out_dir.join("spectral.txt"))?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
