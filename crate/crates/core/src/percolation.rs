//! Bond-percolation thresholds and packet-drop algebra.
//!
//! Analytic thresholds for the four model families, the Hurwitz zeta function
//! backing the scale-free formula, the drop-rate to link-removal-rate map
//! `p_l = 2 p_d - p_d^2`, the minimum connectivity window `B*` with
//! `p_l^(B+1) < p_c`, and a seeded Monte-Carlo threshold estimator.
//!
//! Threshold convention: `p_c` is the critical fraction of *retained* links at
//! which a giant component appears, which is the quantity the analytic
//! formulas give. The square grid is self-dual so retention and removal
//! thresholds coincide there.

use rand::Rng;

use crate::graph::{generate, GraphModel, GraphModelSpec};
use crate::rng::stream_rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PercolationError {
    #[error("probability {name} = {value} outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("no finite window exists for drop rate 1 (every link is always lost)")]
    NoFiniteWindow,

    #[error("threshold p_c = {0} must lie in (0, 1]")]
    ThresholdOutOfRange(f64),

    #[error("hurwitz zeta diverges for s = {0} <= 1")]
    ZetaDivergent(f64),

    #[error("hurwitz zeta needs a > 0, got a = {0}")]
    ZetaBadOffset(f64),

    #[error("heterogeneous drop-rate map is empty")]
    EmptyRateMap,

    #[error("analytic small-world threshold is only known for m = 1, got m = {0}")]
    SmallWorldNeighbours(usize),

    #[error("invalid monte-carlo parameter {name}: {reason}")]
    InvalidMcParameter { name: &'static str, reason: String },

    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMethod {
    Analytic,
    MonteCarlo,
}

impl std::fmt::Display for ThresholdMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdMethod::Analytic => write!(f, "analytic"),
            ThresholdMethod::MonteCarlo => write!(f, "monte-carlo"),
        }
    }
}

/// Qualifications attached to a threshold value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdFlag {
    /// Scale-free denominator diverges (`sigma <= 3`); the formula degenerates
    /// and the threshold is reported as 0.
    DivergentDenominator,
    /// Raw formula value exceeded 1 and was clamped.
    Clamped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationResult {
    pub p_c: f64,
    pub method: ThresholdMethod,
    /// Model family the threshold refers to.
    pub model: String,
    /// Half-width of the estimate; zero for analytic results.
    pub uncertainty: f64,
    pub flag: Option<ThresholdFlag>,
}

impl PercolationResult {
    fn analytic(model: &str, p_c: f64, flag: Option<ThresholdFlag>) -> Self {
        PercolationResult {
            p_c,
            method: ThresholdMethod::Analytic,
            model: model.to_string(),
            uncertainty: 0.0,
            flag,
        }
    }
}

/// Per-direction drop rate to link removal rate: `p_l = 1 - (1 - p_d)^2`.
///
/// Under the symmetric-discard convention a link is unusable as soon as either
/// direction loses its message.
pub fn drop_to_removal_rate(p_d: f64) -> Result<f64, PercolationError> {
    check_probability("p_d", p_d)?;
    Ok(2.0 * p_d - p_d * p_d)
}

/// Inverse of [`drop_to_removal_rate`]: `p_d = 1 - sqrt(1 - p_l)`.
pub fn removal_to_drop_rate(p_l: f64) -> Result<f64, PercolationError> {
    check_probability("p_l", p_l)?;
    Ok(1.0 - (1.0 - p_l).sqrt())
}

/// Minimal `B >= 0` with `(2 p_d - p_d^2)^(B+1) < p_c`, strict.
///
/// Zero means the lossy network stays connected at every single iteration
/// with probability one; that happens exactly when
/// `p_d < 1 - sqrt(1 - p_c)`.
pub fn min_window_b(p_d: f64, p_c: f64) -> Result<u32, PercolationError> {
    check_probability("p_d", p_d)?;
    if p_d >= 1.0 {
        return Err(PercolationError::NoFiniteWindow);
    }
    let p_l = drop_to_removal_rate(p_d)?;
    min_window_b_from_removal(p_l, p_c)
}

/// Same as [`min_window_b`] but taking the link removal rate directly.
pub fn min_window_b_from_removal(p_l: f64, p_c: f64) -> Result<u32, PercolationError> {
    check_probability("p_l", p_l)?;
    if p_l >= 1.0 {
        return Err(PercolationError::NoFiniteWindow);
    }
    check_threshold(p_c)?;
    let mut b = 0u32;
    let mut pow = p_l;
    while pow >= p_c {
        b += 1;
        pow *= p_l;
        if b > 1_000_000 {
            // p_l < 1 so pow decays to zero; this is unreachable but keeps
            // the loop provably finite.
            return Err(PercolationError::NoFiniteWindow);
        }
    }
    Ok(b)
}

/// Drop rates for which the window bound of [`min_window_b`] is the operative
/// guarantee: `(1 - sqrt(1 - p_c), 1)`. Below the lower endpoint the network
/// stays connected at every iteration with probability one.
pub fn admissible_drop_range(p_c: f64) -> Result<(f64, f64), PercolationError> {
    check_threshold(p_c)?;
    Ok((1.0 - (1.0 - p_c).sqrt(), 1.0))
}

/// Per-link drop rates, either one shared rate or a heterogeneous map.
#[derive(Debug, Clone, PartialEq)]
pub enum DropRateSpec {
    Homogeneous { p_d: f64 },
    /// Rates keyed by link; only the values matter for the window bound.
    Heterogeneous { rates: Vec<((usize, usize), f64)> },
}

impl DropRateSpec {
    pub fn max_rate(&self) -> Result<f64, PercolationError> {
        match self {
            DropRateSpec::Homogeneous { p_d } => {
                check_probability("p_d", *p_d)?;
                Ok(*p_d)
            }
            DropRateSpec::Heterogeneous { rates } => {
                if rates.is_empty() {
                    return Err(PercolationError::EmptyRateMap);
                }
                let mut max = 0.0f64;
                for ((_, _), r) in rates {
                    check_probability("p_ij", *r)?;
                    max = max.max(*r);
                }
                Ok(max)
            }
        }
    }
}

/// Window bound under heterogeneous rates: the worst link dominates, so this
/// is `min_window_b(max p_ij, p_c)`.
pub fn conservative_window(rates: &DropRateSpec, p_c: f64) -> Result<u32, PercolationError> {
    min_window_b(rates.max_rate()?, p_c)
}

/// Hurwitz zeta `zeta(s, a) = sum_{k>=0} (k + a)^(-s)` for `s > 1`, `a > 0`,
/// to absolute accuracy 1e-10.
///
/// Partial summation up to `N + a >= 25` plus an Euler-Maclaurin tail:
/// integral term, half-term, and four Bernoulli corrections.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64, PercolationError> {
    if !(s > 1.0) {
        return Err(PercolationError::ZetaDivergent(s));
    }
    if !(a > 0.0) {
        return Err(PercolationError::ZetaBadOffset(a));
    }
    let n_terms = if a >= 25.0 { 0 } else { (25.0 - a).ceil() as usize };
    // Smallest terms first so they are not absorbed by the (possibly huge)
    // k = 0 term.
    let mut sum = 0.0;
    for k in (0..n_terms).rev() {
        sum += (k as f64 + a).powf(-s);
    }
    let x = n_terms as f64 + a;
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Bernoulli corrections: B2/2! = 1/12, B4/4! = -1/720, B6/6! = 1/30240,
    // B8/8! = -1/1209600, each with the rising factorial of s.
    let coeffs = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1_209_600.0];
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    let inv_x2 = 1.0 / (x * x);
    for (j, c) in coeffs.iter().enumerate() {
        tail += c * rising * power;
        if j + 1 < coeffs.len() {
            let base = s + (2 * j + 1) as f64;
            rising *= base * (base + 1.0);
            power *= inv_x2;
        }
    }
    Ok(sum + tail)
}

/// Analytic bond-percolation threshold for a model family.
///
/// Square grid: exactly 1/2. Erdos-Renyi: `1 / <N>` with ensemble mean degree
/// `<N> = p (n - 1)`. Small-world (m = 1): the closed form in the shortcut
/// probability, evaluated in a cancellation-free rationalised form whose
/// `theta -> 0` limit is 1. Scale-free: Hurwitz zeta ratio, clamped to 1 with
/// a flag when the raw value exceeds 1.
pub fn bond_threshold(model: &GraphModel) -> Result<PercolationResult, PercolationError> {
    model.validate()?;
    let kind = model.kind();
    match *model {
        GraphModel::SquareGrid { .. } => Ok(PercolationResult::analytic(kind, 0.5, None)),
        GraphModel::ErdosRenyi { n, p } => {
            let mean_degree = p * (n as f64 - 1.0);
            er_threshold_from_mean_degree(mean_degree)
        }
        GraphModel::SmallWorld { m, theta, .. } => {
            if m != 1 {
                return Err(PercolationError::SmallWorldNeighbours(m));
            }
            // (-2t - 1 + sqrt(4t^2 + 12t + 1)) / (4t), rationalised:
            let p_c = 2.0 / ((4.0 * theta * theta + 12.0 * theta + 1.0).sqrt() + 2.0 * theta + 1.0);
            Ok(PercolationResult::analytic(kind, p_c, None))
        }
        GraphModel::ScaleFree { sigma, min_degree, .. } => {
            if sigma <= 3.0 {
                // zeta(sigma - 2, .) diverges: the formula's denominator is
                // infinite and the threshold collapses to zero.
                return Ok(PercolationResult::analytic(
                    kind,
                    0.0,
                    Some(ThresholdFlag::DivergentDenominator),
                ));
            }
            let a = min_degree as f64;
            let z1 = hurwitz_zeta(sigma - 1.0, a)?;
            let z2 = hurwitz_zeta(sigma - 2.0, a)?;
            let raw = z1 / (z2 - z1);
            if raw > 1.0 {
                Ok(PercolationResult::analytic(kind, 1.0, Some(ThresholdFlag::Clamped)))
            } else {
                Ok(PercolationResult::analytic(kind, raw, None))
            }
        }
    }
}

/// Erdos-Renyi threshold `1 / <N>` from a measured mean degree of a concrete
/// graph instance.
pub fn er_threshold_from_mean_degree(mean_degree: f64) -> Result<PercolationResult, PercolationError> {
    if !(mean_degree > 0.0) {
        return Err(PercolationError::InvalidMcParameter {
            name: "mean_degree",
            reason: format!("must be positive, got {mean_degree}"),
        });
    }
    let raw = 1.0 / mean_degree;
    if raw > 1.0 {
        Ok(PercolationResult::analytic("erdos-renyi", 1.0, Some(ThresholdFlag::Clamped)))
    } else {
        Ok(PercolationResult::analytic("erdos-renyi", raw, None))
    }
}

/// Fraction of `trials` fresh model instances that keep a giant component
/// (largest component covering at least half the nodes) when each link
/// survives independently with probability `survival`.
///
/// Trial `t` draws from stream `t` of `seed`, so results are bit-identical
/// however trials are scheduled.
pub fn giant_component_rate(
    model: &GraphModel,
    survival: f64,
    trials: usize,
    seed: u64,
) -> Result<f64, PercolationError> {
    model.validate()?;
    check_probability("survival", survival)?;
    if trials < 1 {
        return Err(PercolationError::InvalidMcParameter {
            name: "trials",
            reason: "need at least one trial".into(),
        });
    }
    let mut hits = 0usize;
    for t in 0..trials {
        if giant_survives(model, survival, seed, t as u64)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

fn giant_survives(
    model: &GraphModel,
    survival: f64,
    seed: u64,
    stream: u64,
) -> Result<bool, PercolationError> {
    let mut rng = stream_rng(seed, stream);
    let graph_seed: u64 = rng.random();
    let g = generate(&GraphModelSpec { model: model.clone(), seed: graph_seed })?;
    let n = g.node_count();
    let mut ds = crate::graph::DisjointSet::new(n);
    for e in g.edges() {
        if rng.random::<f64>() < survival {
            ds.union(e.a, e.b);
        }
    }
    Ok(2 * ds.largest_component() >= n)
}

/// Monte-Carlo threshold estimate: sweep link-survival probabilities over the
/// grid `{step, 2 step, ..., 1}` and report the smallest value at which the
/// giant-component rate reaches 1/2.
///
/// The reported uncertainty is half a grid cell plus the worst-case binomial
/// half-width `1.96 sqrt(1/4 / trials)`; it never grows when trials increase.
/// Full-size giant components are only required at half the node count, so on
/// small instances the estimate carries the usual finite-size bias towards
/// the crossing of that finite proxy rather than the infinite-volume
/// threshold.
pub fn estimate_threshold_mc(
    model: &GraphModel,
    trials: usize,
    grid_step: f64,
    seed: u64,
) -> Result<PercolationResult, PercolationError> {
    model.validate()?;
    if trials < 1 {
        return Err(PercolationError::InvalidMcParameter {
            name: "trials",
            reason: "need at least one trial".into(),
        });
    }
    if !(grid_step > 0.0 && grid_step < 1.0) {
        return Err(PercolationError::InvalidMcParameter {
            name: "grid_step",
            reason: format!("must lie in (0, 1), got {grid_step}"),
        });
    }
    let mut points: Vec<f64> = Vec::new();
    let mut k = 1usize;
    loop {
        let p = k as f64 * grid_step;
        if p >= 1.0 {
            break;
        }
        points.push(p);
        k += 1;
    }
    points.push(1.0);

    let mut crossing = 1.0;
    for (idx, &q) in points.iter().enumerate() {
        // Each grid point gets its own block of trial streams.
        let point_seed_base = (idx * trials) as u64;
        let mut hits = 0usize;
        for t in 0..trials {
            if giant_survives(model, q, seed, point_seed_base + t as u64)? {
                hits += 1;
            }
        }
        if 2 * hits >= trials {
            crossing = q;
            break;
        }
    }
    let uncertainty = grid_step / 2.0 + 1.96 * (0.25 / trials as f64).sqrt();
    Ok(PercolationResult {
        p_c: crossing,
        method: ThresholdMethod::MonteCarlo,
        model: model.kind().to_string(),
        uncertainty,
        flag: None,
    })
}

fn check_probability(name: &'static str, value: f64) -> Result<(), PercolationError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(PercolationError::ProbabilityOutOfRange { name, value });
    }
    Ok(())
}

fn check_threshold(p_c: f64) -> Result<(), PercolationError> {
    if !(p_c > 0.0 && p_c <= 1.0) {
        return Err(PercolationError::ThresholdOutOfRange(p_c));
    }
    Ok(())
}
