use std::fs;
use std::io::Write;

use allocnet::sim::run as run_sim;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::SweepArgs;

const VARY_KEYS: &[&str] = &["seed", "dynamics.eta", "dynamics.max_iters", "drops.p_d", "audit.window"];

const HEADER: &str =
    "vary,value,seed,iterations,termination,final_cost,final_residual,oracle_gap_inf,max_feas_violation";

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let base = ExperimentConfig::load(&args.config)?;
    let (key, list) = args
        .vary
        .split_once('=')
        .ok_or_else(|| CliError::Usage("--vary expects key=v1,v2,...".into()))?;
    if !VARY_KEYS.contains(&key) {
        return Err(CliError::Usage(format!(
            "unknown vary key `{key}`; valid keys: {}",
            VARY_KEYS.join(", ")
        )));
    }
    let values: Vec<&str> =
        list.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();

    let seeds: Vec<u64> = match &args.seeds {
        None => vec![base.seed],
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| v.parse().map_err(|e| CliError::Usage(format!("bad seed `{v}`: {e}"))))
            .collect::<Result<_, _>>()?,
    };

    // Rows in deterministic config order: values outer, seeds inner. A cell
    // whose run fails (a diverging step size, say) still emits a row, with
    // the reason on stderr, so the rest of the sweep survives.
    let mut rows = vec![HEADER.to_string()];
    for value in &values {
        for &seed in &seeds {
            let mut cfg = base.clone();
            cfg.seed = seed;
            apply(&mut cfg, key, value)?;
            let rc = cfg.build_run()?;
            match run_sim(&rc) {
                Ok(trace) => {
                    let fmt_opt = |o: Option<f64>| o.map(|v| v.to_string()).unwrap_or_default();
                    rows.push(format!(
                        "{key},{value},{seed},{},{},{},{},{},{}",
                        trace.records.last().map(|r| r.k).unwrap_or(0),
                        trace.termination,
                        trace.final_cost(),
                        fmt_opt(trace.final_residual()),
                        fmt_opt(trace.oracle_gap_inf()),
                        trace.max_feasibility_violation,
                    ));
                }
                Err(e) => {
                    eprintln!("warning: {key}={value} seed={seed}: {e}");
                    rows.push(format!("{key},{value},{seed},,error,,,,"));
                }
            }
        }
    }

    let text = rows.join("\n") + "\n";
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<(), CliError> {
    let parse_f64 = |v: &str| {
        v.parse::<f64>().map_err(|e| CliError::Usage(format!("bad value `{v}` for {key}: {e}")))
    };
    match key {
        "seed" => {
            cfg.seed = value
                .parse()
                .map_err(|e| CliError::Usage(format!("bad value `{value}` for seed: {e}")))?;
        }
        "dynamics.eta" => cfg.dynamics.eta = parse_f64(value)?,
        "dynamics.max_iters" => {
            cfg.dynamics.max_iters = value
                .parse()
                .map_err(|e| CliError::Usage(format!("bad value `{value}` for max_iters: {e}")))?;
        }
        "drops.p_d" => {
            let drops = cfg
                .drops
                .as_mut()
                .ok_or_else(|| CliError::Config("[drops] section missing; cannot vary drops.p_d".into()))?;
            drops.p_d = Some(parse_f64(value)?);
        }
        "audit.window" => {
            let window = value
                .parse()
                .map_err(|e| CliError::Usage(format!("bad value `{value}` for audit.window: {e}")))?;
            cfg.audit = Some(crate::config::AuditSection { window });
        }
        _ => unreachable!("validated against VARY_KEYS"),
    }
    Ok(())
}
