//! The nonlinear gradient-tracking update and its admissible step size.
//!
//! One iteration moves every node by the weighted, doubly-nonlinear
//! disagreement with its neighbours:
//!
//! ```text
//! x_i <- x_i - eta * sum_{j ~ i} W_ij * g_n( g_l(f_i'(x_i)) - g_l(f_j'(x_j)) )
//! ```
//!
//! Because each link's flow is computed once and applied with opposite signs
//! to its two endpoints, the resource sum is conserved exactly up to
//! floating-point accumulation - this is the sum-preserving property the
//! whole artifact is built around, and it holds for every odd map, every
//! symmetric active topology, and every step size.

use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::maps::{NonlinearMap, SectorBounds};
use crate::objective::{BoxBounds, LocalObjective};
use crate::rng::stream_rng;
use rand::Rng;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("dimension mismatch: {what} has length {got}, expected {want}")]
    DimensionMismatch { what: &'static str, got: usize, want: usize },

    #[error("step size eta = {0} must be positive")]
    NonPositiveStep(f64),

    #[error("step-bound input {name} = {value} must be positive")]
    NonPositiveBoundInput { name: &'static str, value: f64 },

    #[error("boxes cannot meet the demand: sum of lower bounds {min_sum}, upper bounds {max_sum}, demand {demand}")]
    InfeasibleBoxes { min_sum: f64, max_sum: f64, demand: f64 },

    #[error("root bracket not found for phi in [{lo}, {hi}] (sums {s_lo} .. {s_hi}, demand {demand})")]
    BracketNotFound { lo: f64, hi: f64, s_lo: f64, s_hi: f64, demand: f64 },

    #[error("oracle tolerance {0} must be positive")]
    BadTolerance(f64),

    #[error("objective list is empty")]
    NoObjectives,
}

/// Resource vector with its iteration counter and demand.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationState {
    pub x: Vec<f64>,
    pub k: u64,
    /// Demand `b`: the sum every iterate must preserve.
    pub b: f64,
}

impl AllocationState {
    pub fn sum(&self) -> f64 {
        self.x.iter().sum()
    }

    /// `|sum x - b|` relative to `max(1, |b|)`.
    pub fn feasibility_violation(&self) -> f64 {
        (self.sum() - self.b).abs() / self.b.abs().max(1.0)
    }
}

/// One update of the allocation dynamics over the active topology.
///
/// The active graph is undirected by construction, which is exactly the
/// symmetric-discard contract the simulator guarantees; flows are
/// antisymmetric by evaluation, so `sum(x)` is untouched.
pub fn update_step(
    state: &AllocationState,
    active: &WeightedGraph,
    objs: &[LocalObjective],
    g_n: &NonlinearMap,
    g_l: &NonlinearMap,
    eta: f64,
) -> Result<AllocationState, DynamicsError> {
    let n = state.x.len();
    if active.node_count() != n {
        return Err(DynamicsError::DimensionMismatch {
            what: "active graph",
            got: active.node_count(),
            want: n,
        });
    }
    if objs.len() != n {
        return Err(DynamicsError::DimensionMismatch { what: "objectives", got: objs.len(), want: n });
    }
    if !(eta > 0.0) {
        return Err(DynamicsError::NonPositiveStep(eta));
    }

    // g_l of every local gradient once per node; this is the message each
    // node shares with its neighbours.
    let links: Vec<f64> =
        state.x.iter().zip(objs).map(|(&xi, f)| g_l.eval(f.gradient(xi))).collect();

    let mut x = state.x.clone();
    for e in active.edges() {
        let flow = eta * e.w * g_n.eval(links[e.a] - links[e.b]);
        x[e.a] -= flow;
        x[e.b] += flow;
    }
    Ok(AllocationState { x, k: state.k + 1, b: state.b })
}

/// Largest admissible step size for a `B`-connectivity window:
/// `kappa_n kappa_l lambda2 / (u lambda_n^2 K_n^2 K_l^2) / (B + 1)`.
pub fn step_bound(
    sector_n: SectorBounds,
    sector_l: SectorBounds,
    u: f64,
    lambda2: f64,
    lambda_n: f64,
    window_b: u32,
) -> Result<f64, DynamicsError> {
    for (name, value) in [
        ("kappa_n", sector_n.kappa),
        ("K_n", sector_n.upper),
        ("kappa_l", sector_l.kappa),
        ("K_l", sector_l.upper),
        ("u", u),
        ("lambda2", lambda2),
        ("lambda_n", lambda_n),
    ] {
        if !(value > 0.0) {
            return Err(DynamicsError::NonPositiveBoundInput { name, value });
        }
    }
    let eta_bar = sector_n.kappa * sector_l.kappa * lambda2
        / (u * lambda_n * lambda_n * sector_n.upper * sector_n.upper * sector_l.upper * sector_l.upper);
    Ok(eta_bar / (window_b as f64 + 1.0))
}

/// Random feasible start: every component inside its box, components summing
/// to the demand. Without boxes the start spreads `b/n` with seeded jitter.
pub fn feasible_init(
    n: usize,
    b: f64,
    bounds: Option<&[BoxBounds]>,
    seed: u64,
) -> Result<Vec<f64>, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::NoObjectives);
    }
    let mut rng = stream_rng(seed, 0);
    match bounds {
        None => {
            let share = b / n as f64;
            let scale = share.abs().max(1.0) * 0.2;
            let jitter: Vec<f64> =
                (0..n).map(|_| (rng.random::<f64>() - 0.5) * scale).collect();
            let mean = jitter.iter().sum::<f64>() / n as f64;
            Ok(jitter.into_iter().map(|j| share + (j - mean)).collect())
        }
        Some(bx) => {
            if bx.len() != n {
                return Err(DynamicsError::DimensionMismatch {
                    what: "bounds",
                    got: bx.len(),
                    want: n,
                });
            }
            let min_sum: f64 = bx.iter().map(|b| b.lower).sum();
            let max_sum: f64 = bx.iter().map(|b| b.upper).sum();
            if b < min_sum || b > max_sum {
                return Err(DynamicsError::InfeasibleBoxes { min_sum, max_sum, demand: b });
            }
            let mut x: Vec<f64> =
                bx.iter().map(|bb| bb.lower + rng.random::<f64>() * bb.width()).collect();
            // Push the deficit through the components greedily; total slack
            // is sufficient by the feasibility precondition.
            let mut deficit = b - x.iter().sum::<f64>();
            for (xi, bb) in x.iter_mut().zip(bx) {
                if deficit == 0.0 {
                    break;
                }
                let room = if deficit > 0.0 { bb.upper - *xi } else { bb.lower - *xi };
                let take = if deficit > 0.0 { deficit.min(room) } else { deficit.max(room) };
                *xi += take;
                deficit -= take;
            }
            // Absorb the floating-point residue in the roomiest component.
            let residue = b - x.iter().sum::<f64>();
            if residue != 0.0 {
                let (i, _) = x
                    .iter()
                    .zip(bx)
                    .enumerate()
                    .map(|(i, (&xi, bb))| {
                        let room = if residue > 0.0 { bb.upper - xi } else { xi - bb.lower };
                        (i, room)
                    })
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                x[i] += residue;
            }
            Ok(x)
        }
    }
}

/// Euclidean norm of the mean-removed gradient vector; zero exactly when the
/// gradients agree, i.e. when the KKT consensus condition holds.
pub fn dispersion(gradients: &[f64]) -> f64 {
    assert!(!gradients.is_empty(), "dispersion of an empty gradient vector");
    let mean = gradients.iter().sum::<f64>() / gradients.len() as f64;
    gradients.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>().sqrt()
}

/// Both sides of the quadratic-form identity behind sum preservation:
///
/// ```text
/// sum_i z_i sum_j W_ij g_n(g_l(z_j) - g_l(z_i))
///   = -1/2 sum_{i,j} W_ij (z_j - z_i) g_n(g_l(z_j) - g_l(z_i))
/// ```
///
/// Returned as `(lhs, rhs)` so tests can assert their agreement.
pub fn laplacian_identity_check(
    g: &WeightedGraph,
    z: &[f64],
    g_n: &NonlinearMap,
    g_l: &NonlinearMap,
) -> (f64, f64) {
    assert_eq!(g.node_count(), z.len(), "z must have one entry per node");
    let links: Vec<f64> = z.iter().map(|&zi| g_l.eval(zi)).collect();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for e in g.edges() {
        let fwd = g_n.eval(links[e.b] - links[e.a]); // seen from node a
        let bwd = g_n.eval(links[e.a] - links[e.b]); // seen from node b
        lhs += z[e.a] * e.w * fwd + z[e.b] * e.w * bwd;
        rhs -= 0.5 * e.w * ((z[e.b] - z[e.a]) * fwd + (z[e.a] - z[e.b]) * bwd);
    }
    (lhs, rhs)
}
