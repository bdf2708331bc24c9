use allocnet::percolation::{
    bond_threshold, er_threshold_from_mean_degree, estimate_threshold_mc, PercolationResult,
    ThresholdFlag,
};

use crate::error::CliError;
use crate::PercolationArgs;

const HEADER: &str = "model,param_summary,p_c,method,uncertainty";

pub fn run(args: PercolationArgs) -> Result<(), CliError> {
    // Measured-mean-degree path: no model flags needed.
    if let Some(mean_degree) = args.mean_degree {
        if args.mc {
            return Err(CliError::Usage("--mean-degree is analytic only".into()));
        }
        let res = er_threshold_from_mean_degree(mean_degree)?;
        emit(&res, &format!("mean_degree={mean_degree}"))?;
        return Ok(());
    }

    let model_name = args
        .model
        .as_deref()
        .ok_or_else(|| CliError::Usage("--model (or --mean-degree) is required".into()))?;
    let model = super::model_from_flags(
        model_name,
        args.n,
        args.p,
        args.m,
        args.theta,
        args.sigma,
        args.min_degree,
        args.rows,
        args.cols,
    )?;
    let params = super::model_params(&model);

    let res = if args.mc {
        estimate_threshold_mc(&model, args.trials, args.step, args.seed)?
    } else {
        bond_threshold(&model)?
    };
    emit(&res, &params)
}

fn emit(res: &PercolationResult, params: &str) -> Result<(), CliError> {
    match res.flag {
        Some(ThresholdFlag::DivergentDenominator) => {
            return Err(CliError::Numeric(
                "divergent denominator, threshold is 0 (power-law exponent must exceed 3)".into(),
            ));
        }
        Some(ThresholdFlag::Clamped) => {
            eprintln!("warning: raw formula value exceeded 1; threshold clamped");
        }
        None => {}
    }
    println!("{HEADER}");
    println!("{},{},{},{},{}", res.model, params, res.p_c, res.method, res.uncertainty);
    Ok(())
}
