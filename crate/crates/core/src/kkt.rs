//! Centralized ground-truth solver.
//!
//! At the optimum of the sum-constrained problem all marginal costs agree:
//! `f_i'(x_i*) = phi*` for a common multiplier with `sum x_i* = b`. The
//! oracle exploits that the map `phi -> sum_i (f_i')^{-1}(phi)` is strictly
//! increasing: each inner inverse is a scalar bisection on the monotone
//! gradient, and an outer bisection on `phi` drives the sum to the demand.

use crate::dynamics::DynamicsError;
use crate::objective::LocalObjective;

/// Optimal allocation with its common marginal cost.
#[derive(Debug, Clone, PartialEq)]
pub struct KktSolution {
    pub x_star: Vec<f64>,
    pub phi_star: f64,
    /// `max_i |f_i'(x_i*) - phi*|` over the returned point.
    pub residual: f64,
}

/// Solve `min sum f_i(x_i)` s.t. `sum x_i = b` to within `tol` on the sum.
///
/// Requires strictly convex objectives with gradients that are increasing and
/// unbounded in both directions; the quadratic and quadratic-plus-softplus
/// kinds (with or without penalty) qualify.
pub fn kkt_oracle(
    objs: &[LocalObjective],
    b: f64,
    tol: f64,
) -> Result<KktSolution, DynamicsError> {
    if objs.is_empty() {
        return Err(DynamicsError::NoObjectives);
    }
    if !(tol > 0.0) {
        return Err(DynamicsError::BadTolerance(tol));
    }

    let sum_at = |phi: f64| -> f64 { objs.iter().map(|f| invert_gradient(f, phi)).sum() };

    // Bracket phi by doubling outward until the demand is enclosed.
    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut s_lo = sum_at(lo);
    let mut s_hi = sum_at(hi);
    let mut expansions = 0;
    while s_lo > b {
        lo *= 2.0;
        s_lo = sum_at(lo);
        expansions += 1;
        if expansions > 200 {
            return Err(DynamicsError::BracketNotFound { lo, hi, s_lo, s_hi, demand: b });
        }
    }
    while s_hi < b {
        hi *= 2.0;
        s_hi = sum_at(hi);
        expansions += 1;
        if expansions > 200 {
            return Err(DynamicsError::BracketNotFound { lo, hi, s_lo, s_hi, demand: b });
        }
    }

    let mut phi = 0.5 * (lo + hi);
    for _ in 0..500 {
        phi = 0.5 * (lo + hi);
        let s = sum_at(phi);
        if (s - b).abs() <= tol {
            break;
        }
        if s < b {
            lo = phi;
        } else {
            hi = phi;
        }
        if (hi - lo) <= f64::EPSILON * phi.abs().max(1.0) {
            break;
        }
    }

    let x_star: Vec<f64> = objs.iter().map(|f| invert_gradient(f, phi)).collect();
    let residual = x_star
        .iter()
        .zip(objs)
        .map(|(&x, f)| (f.gradient(x) - phi).abs())
        .fold(0.0f64, f64::max);
    Ok(KktSolution { x_star, phi_star: phi, residual })
}

/// Solve `f'(x) = phi` by bisection on the increasing gradient.
fn invert_gradient(f: &LocalObjective, phi: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 0.0;
    let mut step = 1.0;
    while f.gradient(lo) > phi {
        lo -= step;
        step *= 2.0;
        if step > 1e300 {
            return lo;
        }
    }
    step = 1.0;
    while f.gradient(hi) < phi {
        hi += step;
        step *= 2.0;
        if step > 1e300 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f.gradient(mid) < phi {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{sample_quad_logexp, BoxBounds, ParamRanges};

    #[test]
    fn symmetric_quadratics_split_evenly() {
        let objs = vec![
            LocalObjective::quadratic(1.0, 0.0).unwrap(),
            LocalObjective::quadratic(1.0, 0.0).unwrap(),
        ];
        let sol = kkt_oracle(&objs, 2.0, 1e-12).unwrap();
        assert!((sol.x_star[0] - 1.0).abs() <= 1e-9);
        assert!((sol.x_star[1] - 1.0).abs() <= 1e-9);
        assert!((sol.phi_star - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn closed_form_two_node_case() {
        // f1 = x^2/2 (a=1), f2 = x^2 (a=2): x1 = phi, x2 = phi/2,
        // 1.5 phi = 3 so phi = 2, x = (2, 1).
        let objs = vec![
            LocalObjective::quadratic(1.0, 0.0).unwrap(),
            LocalObjective::quadratic(2.0, 0.0).unwrap(),
        ];
        let sol = kkt_oracle(&objs, 3.0, 1e-12).unwrap();
        assert!((sol.phi_star - 2.0).abs() <= 1e-9);
        assert!((sol.x_star[0] - 2.0).abs() <= 1e-9);
        assert!((sol.x_star[1] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn unconstrained_minimum_is_returned_when_feasible() {
        let cs = [1.0, 2.0, 4.0];
        let objs: Vec<_> =
            cs.iter().map(|&c| LocalObjective::quadratic(1.5, c).unwrap()).collect();
        let sol = kkt_oracle(&objs, cs.iter().sum(), 1e-12).unwrap();
        for (x, c) in sol.x_star.iter().zip(cs) {
            assert!((x - c).abs() <= 1e-9);
        }
        assert!(sol.phi_star.abs() <= 1e-9);
    }

    #[test]
    fn oracle_meets_its_tolerances_on_penalized_objectives() {
        let bx = BoxBounds::new(2.0, 7.0).unwrap();
        let objs = sample_quad_logexp(20, &ParamRanges::default(), Some((bx, 1.0)), 2).unwrap();
        let tol = 1e-10;
        let sol = kkt_oracle(&objs, 100.0, tol).unwrap();
        assert!((sol.x_star.iter().sum::<f64>() - 100.0).abs() <= tol);
        assert!(sol.residual <= 1e-8, "residual {}", sol.residual);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(kkt_oracle(&[], 1.0, 1e-9).is_err());
        let objs = vec![LocalObjective::quadratic(1.0, 0.0).unwrap()];
        assert!(kkt_oracle(&objs, 1.0, 0.0).is_err());
    }
}
