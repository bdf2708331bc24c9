use std::fs;

use allocnet::percolation::{conservative_window, min_window_b, min_window_b_from_removal, DropRateSpec};

use crate::error::CliError;
use crate::BstarArgs;

pub fn run(args: BstarArgs) -> Result<(), CliError> {
    let given = [args.pd.is_some(), args.pl.is_some(), args.rates_file.is_some()]
        .iter()
        .filter(|&&x| x)
        .count();
    if given != 1 {
        return Err(CliError::Usage(
            "exactly one of --pd, --pl, --rates-file is required".into(),
        ));
    }
    let b = if let Some(pd) = args.pd {
        min_window_b(pd, args.pc)?
    } else if let Some(pl) = args.pl {
        min_window_b_from_removal(pl, args.pc)?
    } else {
        let path = args.rates_file.as_ref().unwrap();
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut rates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let rate: f64 = t.parse().map_err(|e| {
                CliError::Config(format!("{} line {}: bad rate `{t}`: {e}", path.display(), i + 1))
            })?;
            // Anonymous link keys; only the rate values enter the bound.
            let idx = rates.len();
            rates.push(((idx, idx + 1), rate));
        }
        conservative_window(&DropRateSpec::Heterogeneous { rates }, args.pc)?
    };
    println!("{b}");
    Ok(())
}
