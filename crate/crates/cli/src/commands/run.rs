use std::fs;
use std::io::Write;
use std::path::Path;

use allocnet::sim::{run as run_sim, window_connectivity_audit, write_states_csv, write_trace_csv, RunTrace};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::RunArgs;

pub fn run(args: RunArgs) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let run_config = cfg.build_run()?;
    let out_dir = crate::resolve_out_dir(
        args.out,
        cfg.output.as_ref().and_then(|o| o.dir.as_deref()),
    );
    fs::create_dir_all(&out_dir)?;

    let trace = run_sim(&run_config)?;
    write_artifacts(&cfg, &run_config.graph, &trace, &out_dir)?;

    for line in summary_lines(&cfg, &run_config.graph, &trace)? {
        println!("{line}");
    }
    Ok(())
}

pub fn summary_lines(
    cfg: &ExperimentConfig,
    graph: &allocnet::graph::WeightedGraph,
    trace: &RunTrace,
) -> Result<Vec<String>, CliError> {
    let mut lines = vec![
        format!("iterations={}", trace.records.last().map(|r| r.k).unwrap_or(0)),
        format!("termination={}", trace.termination),
        format!("final_cost={}", trace.final_cost()),
        format!("max_feasibility_violation={}", trace.max_feasibility_violation),
    ];
    if let Some(res) = trace.final_residual() {
        lines.push(format!("final_residual={res}"));
    }
    if let Some(gap) = trace.oracle_gap_inf() {
        lines.push(format!("oracle_gap_inf={gap}"));
    }
    if let (Some(window), Some(log)) = (cfg.audit.as_ref().map(|a| a.window), trace.active_log.as_ref())
    {
        let report = window_connectivity_audit(graph, log, window)?;
        lines.push(format!("audit_window={window}"));
        lines.push(format!(
            "audit_disjoint_connected={}/{}",
            report.disjoint_connected, report.disjoint_windows
        ));
        lines.push(format!(
            "audit_sliding_connected={}/{}",
            report.sliding_connected, report.sliding_windows
        ));
        match report.min_empirical_window {
            Some(b) => lines.push(format!("min_empirical_window={b}")),
            None => lines.push("min_empirical_window=none".into()),
        }
    }
    Ok(lines)
}

pub fn write_artifacts(
    cfg: &ExperimentConfig,
    graph: &allocnet::graph::WeightedGraph,
    trace: &RunTrace,
    out_dir: &Path,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf)?;
    fs::write(out_dir.join("trace.csv"), buf)?;

    if trace.states.is_some() {
        let mut buf = Vec::new();
        write_states_csv(trace, &mut buf)?;
        fs::write(out_dir.join("states.csv"), buf)?;
    }

    let mut summary = Vec::new();
    writeln!(summary, "[summary]")?;
    for line in summary_lines(cfg, graph, trace)? {
        let (key, value) = line.split_once('=').expect("key=value line");
        // Numbers stay bare; everything else is quoted so the file is TOML.
        if value.parse::<f64>().is_ok() {
            writeln!(summary, "{key} = {value}")?;
        } else {
            writeln!(summary, "{key} = \"{value}\"")?;
        }
    }
    writeln!(summary)?;
    writeln!(summary, "[config]")?;
    // Echo the config with its tables inlined under [config].
    let echoed = indent_config_echo(&cfg.to_toml());
    summary.extend_from_slice(echoed.as_bytes());
    fs::write(out_dir.join("summary.toml"), summary)?;
    Ok(())
}

/// Re-scope `[section]` headers of the echoed config as `[config.section]`.
fn indent_config_echo(config_toml: &str) -> String {
    let mut out = String::new();
    for line in config_toml.lines() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix("[[") {
            out.push_str(&format!("[[config.{rest}"));
        } else if let Some(rest) = t.strip_prefix('[') {
            out.push_str(&format!("[config.{rest}"));
        } else {
            out.push_str(line);
        }
        out.push('\n');
    }
    out
}
