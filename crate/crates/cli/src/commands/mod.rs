pub mod bstar;
pub mod generate;
pub mod percolation;
pub mod replicate;
pub mod run;
pub mod spectrum;
pub mod sweep;

use allocnet::graph::GraphModel;

use crate::error::CliError;

/// Build a model from the generate/percolation flag set.
#[allow(clippy::too_many_arguments)]
pub fn model_from_flags(
    model: &str,
    n: Option<usize>,
    p: Option<f64>,
    m: Option<usize>,
    theta: Option<f64>,
    sigma: Option<f64>,
    min_degree: Option<usize>,
    rows: Option<usize>,
    cols: Option<usize>,
) -> Result<GraphModel, CliError> {
    let need = |opt: Option<f64>, flag: &str| {
        opt.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --model {model}")))
    };
    let need_usize = |opt: Option<usize>, flag: &str| {
        opt.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --model {model}")))
    };
    Ok(match model {
        "er" => GraphModel::ErdosRenyi { n: need_usize(n, "n")?, p: need(p, "p")? },
        "sw" => GraphModel::SmallWorld {
            n: need_usize(n, "n")?,
            m: need_usize(m, "m")?,
            theta: need(theta, "theta")?,
        },
        "sf" => GraphModel::ScaleFree {
            n: need_usize(n, "n")?,
            sigma: need(sigma, "sigma")?,
            min_degree: need_usize(min_degree, "min-degree")?,
        },
        "grid" => GraphModel::SquareGrid { rows: need_usize(rows, "rows")?, cols: need_usize(cols, "cols")? },
        other => return Err(CliError::Usage(format!("unknown model `{other}` (er, sw, sf, grid)"))),
    })
}

/// Short `key=value` parameter summary for CSV rows.
pub fn model_params(model: &GraphModel) -> String {
    match model {
        GraphModel::ErdosRenyi { n, p } => format!("n={n};p={p}"),
        GraphModel::SmallWorld { n, m, theta } => format!("n={n};m={m};theta={theta}"),
        GraphModel::ScaleFree { n, sigma, min_degree } => {
            format!("n={n};sigma={sigma};min_degree={min_degree}")
        }
        GraphModel::SquareGrid { rows, cols } => format!("rows={rows};cols={cols}"),
    }
}
