//! Local node objectives.
//!
//! Each node carries a strictly convex scalar cost: either a plain quadratic
//! `a/2 (x - c)^2` or the quadratic-plus-softplus form
//! `a/2 (x - c)^2 + ln(1 + exp(l (x - d)))`. Box constraints enter as
//! additive penalties `gamma (max(x - M, 0)^2 + max(m - x, 0)^2)`, so
//! containment is soft: iterates can overshoot the box by an amount that
//! shrinks with the penalty weight.

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rng::{stream_rng, uniform_closed};

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("curvature coefficient a = {0} must be positive (strict convexity)")]
    NonPositiveCurvature(f64),

    #[error("box bounds [{lower}, {upper}] are inverted")]
    InvertedBox { lower: f64, upper: f64 },

    #[error("penalty weight gamma = {0} must be nonnegative")]
    NegativePenalty(f64),
}

/// Per-node box `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxBounds {
    pub lower: f64,
    pub upper: f64,
}

impl BoxBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self, ObjectiveError> {
        if lower > upper {
            return Err(ObjectiveError::InvertedBox { lower, upper });
        }
        Ok(BoxBounds { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveKind {
    Quadratic { a: f64, c: f64 },
    QuadLogExp { a: f64, c: f64, l: f64, d: f64 },
}

/// One node's cost with optional box penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalObjective {
    pub kind: ObjectiveKind,
    pub bounds: Option<BoxBounds>,
    /// Penalty weight gamma; ignored when `bounds` is absent.
    pub penalty_weight: f64,
}

impl LocalObjective {
    pub fn quadratic(a: f64, c: f64) -> Result<Self, ObjectiveError> {
        if !(a > 0.0) {
            return Err(ObjectiveError::NonPositiveCurvature(a));
        }
        Ok(LocalObjective { kind: ObjectiveKind::Quadratic { a, c }, bounds: None, penalty_weight: 0.0 })
    }

    pub fn quad_logexp(a: f64, c: f64, l: f64, d: f64) -> Result<Self, ObjectiveError> {
        if !(a > 0.0) {
            return Err(ObjectiveError::NonPositiveCurvature(a));
        }
        Ok(LocalObjective {
            kind: ObjectiveKind::QuadLogExp { a, c, l, d },
            bounds: None,
            penalty_weight: 0.0,
        })
    }

    pub fn with_box(mut self, bounds: BoxBounds, gamma: f64) -> Result<Self, ObjectiveError> {
        if !(gamma >= 0.0) {
            return Err(ObjectiveError::NegativePenalty(gamma));
        }
        self.bounds = Some(bounds);
        self.penalty_weight = gamma;
        Ok(self)
    }

    /// Cost value and analytic gradient at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (mut v, mut g) = match self.kind {
            ObjectiveKind::Quadratic { a, c } => {
                let dxc = x - c;
                (0.5 * a * dxc * dxc, a * dxc)
            }
            ObjectiveKind::QuadLogExp { a, c, l, d } => {
                let dxc = x - c;
                let t = l * (x - d);
                (0.5 * a * dxc * dxc + log1p_exp(t), a * dxc + l * sigmoid(t))
            }
        };
        if let Some(b) = self.bounds {
            let over = (x - b.upper).max(0.0);
            let under = (b.lower - x).max(0.0);
            v += self.penalty_weight * (over * over + under * under);
            g += self.penalty_weight * 2.0 * (over - under);
        }
        (v, g)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn gradient(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    /// Analytic second derivative, used by the curvature-bound scan.
    pub fn second_derivative(&self, x: f64) -> f64 {
        let mut h = match self.kind {
            ObjectiveKind::Quadratic { a, .. } => a,
            ObjectiveKind::QuadLogExp { a, l, d, .. } => {
                let s = sigmoid(l * (x - d));
                a + l * l * s * (1.0 - s)
            }
        };
        if let Some(b) = self.bounds {
            if x > b.upper || x < b.lower {
                h += 2.0 * self.penalty_weight;
            }
        }
        h
    }
}

/// Sum of node costs `F(x)`.
pub fn total_cost(objs: &[LocalObjective], x: &[f64]) -> f64 {
    objs.iter().zip(x).map(|(f, &xi)| f.value(xi)).sum()
}

/// Per-node gradients of `F` at `x`.
pub fn gradient_vector(objs: &[LocalObjective], x: &[f64]) -> Vec<f64> {
    objs.iter().zip(x).map(|(f, &xi)| f.gradient(xi)).collect()
}

/// Curvature constant `u` with `f_i'' < 2u` for every objective over
/// `[lo, hi]`, from a dense grid scan of the analytic second derivative.
pub fn curvature_bound(objs: &[LocalObjective], lo: f64, hi: f64, samples: usize) -> f64 {
    let samples = samples.max(2);
    let mut max_half = 0.0f64;
    for f in objs {
        for i in 0..samples {
            let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            max_half = max_half.max(0.5 * f.second_derivative(x));
        }
    }
    // Nudge above the sampled maximum so the bound stays strict.
    max_half * (1.0 + 1e-12)
}

/// Uniform ranges for randomly drawn objective parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRanges {
    pub a: (f64, f64),
    pub c: (f64, f64),
    pub l: (f64, f64),
    pub d: (f64, f64),
}

impl Default for ParamRanges {
    fn default() -> Self {
        ParamRanges { a: (0.5, 1.5), c: (2.0, 7.0), l: (0.0, 0.5), d: (2.0, 7.0) }
    }
}

fn draw(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    uniform_closed(rng, range.0, range.1)
}

/// Draw `n` seeded quadratic objectives with `a in a-range`, `c in c-range`.
pub fn sample_quadratics(
    n: usize,
    ranges: &ParamRanges,
    bounds: Option<(BoxBounds, f64)>,
    seed: u64,
) -> Result<Vec<LocalObjective>, ObjectiveError> {
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|_| {
            let f = LocalObjective::quadratic(draw(&mut rng, ranges.a), draw(&mut rng, ranges.c))?;
            match bounds {
                Some((b, gamma)) => f.with_box(b, gamma),
                None => Ok(f),
            }
        })
        .collect()
}

/// Draw `n` seeded quadratic-plus-softplus objectives.
pub fn sample_quad_logexp(
    n: usize,
    ranges: &ParamRanges,
    bounds: Option<(BoxBounds, f64)>,
    seed: u64,
) -> Result<Vec<LocalObjective>, ObjectiveError> {
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|_| {
            let f = LocalObjective::quad_logexp(
                draw(&mut rng, ranges.a),
                draw(&mut rng, ranges.c),
                draw(&mut rng, ranges.l),
                draw(&mut rng, ranges.d),
            )?;
            match bounds {
                Some((b, gamma)) => f.with_box(b, gamma),
                None => Ok(f),
            }
        })
        .collect()
}

/// `ln(1 + e^t)` without overflow for large `t`.
fn log1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn quadratic_example() {
        let f = LocalObjective::quadratic(1.0, 0.0).unwrap();
        let (v, g) = f.eval(2.0);
        assert_eq!(v, 2.0);
        assert_eq!(g, 2.0);
    }

    #[test]
    fn quad_logexp_with_flat_logistic_term() {
        // l = 0 freezes the softplus at ln 2 with zero gradient.
        let f = LocalObjective::quad_logexp(1.0, 0.0, 0.0, 0.0).unwrap();
        let (v, g) = f.eval(3.0);
        assert!((v - (4.5 + std::f64::consts::LN_2)).abs() <= 1e-15);
        assert!((g - 3.0).abs() <= 1e-15);
    }

    #[test]
    fn box_penalty_example() {
        let f = LocalObjective::quadratic(1.0, 0.0)
            .unwrap()
            .with_box(BoxBounds::new(0.0, 1.0).unwrap(), 1.0)
            .unwrap();
        let (v, g) = f.eval(2.0);
        assert_eq!(v, 3.0); // 2 + (2-1)^2
        assert_eq!(g, 4.0); // 2 + 2(2-1)
        let (v_in, g_in) = f.eval(0.5);
        assert_eq!(v_in, 0.125);
        assert_eq!(g_in, 0.5);
    }

    #[test]
    fn softplus_is_overflow_safe() {
        let f = LocalObjective::quad_logexp(1.0, 0.0, 1.0, 0.0).unwrap();
        let (v, g) = f.eval(5000.0);
        assert!(v.is_finite());
        assert!(g.is_finite());
        // For huge arguments softplus(t) -> t and sigmoid -> 1.
        assert!((v - (0.5 * 5000.0f64 * 5000.0 + 5000.0)).abs() <= 1e-6);
        assert!((g - 5001.0).abs() <= 1e-9);
    }

    #[test]
    fn gradients_match_central_finite_differences() {
        let mut rng = stream_rng(17, 0);
        let ranges = ParamRanges::default();
        let box_ = BoxBounds::new(2.0, 7.0).unwrap();
        let quads = sample_quadratics(50, &ranges, Some((box_, 1.0)), 17).unwrap();
        let qles = sample_quad_logexp(50, &ranges, Some((box_, 1.0)), 18).unwrap();
        let h = 1e-6;
        for f in quads.iter().chain(&qles) {
            for _ in 0..2 {
                let x: f64 = rng.random::<f64>() * 12.0 - 1.0;
                let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
                let g = f.gradient(x);
                let scale = g.abs().max(1.0);
                assert!(
                    (fd - g).abs() / scale <= 1e-5,
                    "finite difference {fd} vs analytic {g} at x={x} for {f:?}"
                );
            }
        }
    }

    #[test]
    fn curvature_bound_dominates_sampled_second_derivative() {
        let box_ = BoxBounds::new(2.0, 7.0).unwrap();
        let objs = sample_quad_logexp(20, &ParamRanges::default(), Some((box_, 1.0)), 3).unwrap();
        let u = curvature_bound(&objs, 0.0, 9.0, 400);
        for f in &objs {
            for i in 0..400 {
                let x = 9.0 * i as f64 / 399.0;
                assert!(f.second_derivative(x) < 2.0 * u);
            }
        }
        // Quadratic without box: u is a/2 up to the strictness nudge.
        let f = vec![LocalObjective::quadratic(3.0, 1.0).unwrap()];
        let u = curvature_bound(&f, -10.0, 10.0, 16);
        assert!((u - 1.5).abs() <= 1e-9);
        assert!(3.0 < 2.0 * u);
    }

    #[test]
    fn parameter_sampling_is_seeded_and_in_range() {
        let ranges = ParamRanges::default();
        let a = sample_quad_logexp(10, &ranges, None, 5).unwrap();
        let b = sample_quad_logexp(10, &ranges, None, 5).unwrap();
        assert_eq!(a, b);
        for f in &a {
            match f.kind {
                ObjectiveKind::QuadLogExp { a, c, l, d } => {
                    assert!((0.5..=1.5).contains(&a));
                    assert!((2.0..=7.0).contains(&c));
                    assert!((0.0..=0.5).contains(&l));
                    assert!((2.0..=7.0).contains(&d));
                }
                _ => panic!("wrong kind"),
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(LocalObjective::quadratic(0.0, 1.0).is_err());
        assert!(BoxBounds::new(3.0, 2.0).is_err());
        let f = LocalObjective::quadratic(1.0, 0.0).unwrap();
        assert!(f.with_box(BoxBounds::new(0.0, 1.0).unwrap(), -1.0).is_err());
    }
}
