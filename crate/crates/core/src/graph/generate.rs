//! Random-graph ensembles and symmetric weight assignment.
//!
//! Four model families are provided: Erdos-Renyi, small-world (a ring of
//! m-nearest neighbours plus random shortcuts), scale-free (configuration
//! model with a truncated power-law degree sequence), and the square grid.
//! Generation is a pure function of `(model, seed)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::rng::{stream_rng, uniform_open_closed};

use super::{GraphError, WeightedGraph};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphModel {
    ErdosRenyi { n: usize, p: f64 },
    /// Ring of `m`-nearest neighbours; each ring edge spawns one shortcut to a
    /// uniformly random node with probability `theta`.
    SmallWorld { n: usize, m: usize, theta: f64 },
    /// Configuration model with degrees drawn from `P(d) ∝ d^(-sigma)`
    /// truncated to `[min_degree, n-1]`.
    ScaleFree { n: usize, sigma: f64, min_degree: usize },
    SquareGrid { rows: usize, cols: usize },
}

impl GraphModel {
    pub fn kind(&self) -> &'static str {
        match self {
            GraphModel::ErdosRenyi { .. } => "erdos-renyi",
            GraphModel::SmallWorld { .. } => "small-world",
            GraphModel::ScaleFree { .. } => "scale-free",
            GraphModel::SquareGrid { .. } => "square-grid",
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            GraphModel::ErdosRenyi { n, .. } => n,
            GraphModel::SmallWorld { n, .. } => n,
            GraphModel::ScaleFree { n, .. } => n,
            GraphModel::SquareGrid { rows, cols } => rows * cols,
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |name: &'static str, reason: String| {
            Err(GraphError::InvalidParameter { name, reason })
        };
        match *self {
            GraphModel::ErdosRenyi { n, p } => {
                if n < 1 {
                    return bad("n", "must be at least 1".into());
                }
                if !(0.0..=1.0).contains(&p) {
                    return bad("p", format!("link probability {p} outside [0, 1]"));
                }
            }
            GraphModel::SmallWorld { n, m, theta } => {
                if n < 3 {
                    return bad("n", "ring needs at least 3 nodes".into());
                }
                if m < 1 {
                    return bad("m", "neighbour count must be at least 1".into());
                }
                if !(0.0..=1.0).contains(&theta) {
                    return bad("theta", format!("shortcut probability {theta} outside [0, 1]"));
                }
            }
            GraphModel::ScaleFree { n, sigma, min_degree } => {
                if n < 2 {
                    return bad("n", "must be at least 2".into());
                }
                if !(sigma > 2.0) {
                    return bad("sigma", format!("power-law exponent {sigma} must exceed 2"));
                }
                if min_degree < 1 || min_degree > n - 1 {
                    return bad("min_degree", format!("must lie in [1, {}]", n - 1));
                }
            }
            GraphModel::SquareGrid { rows, cols } => {
                if rows * cols < 2 {
                    return bad("rows/cols", "grid needs at least 2 nodes".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphModelSpec {
    pub model: GraphModel,
    pub seed: u64,
}

/// Draw a unit-weight graph from the named ensemble; deterministic given the
/// spec's seed.
pub fn generate(spec: &GraphModelSpec) -> Result<WeightedGraph, GraphError> {
    spec.model.validate()?;
    let mut rng = stream_rng(spec.seed, 0);
    match spec.model {
        GraphModel::ErdosRenyi { n, p } => Ok(erdos_renyi(n, p, &mut rng)),
        GraphModel::SmallWorld { n, m, theta } => Ok(small_world(n, m, theta, &mut rng)),
        GraphModel::ScaleFree { n, sigma, min_degree } => {
            scale_free(n, sigma, min_degree, &mut rng)
        }
        GraphModel::SquareGrid { rows, cols } => Ok(square_grid(rows, cols)),
    }
}

/// Redraw every edge weight uniformly from the half-open range `(low, high]`,
/// applied symmetrically. No stochasticity normalisation is performed.
pub fn assign_weights(
    g: &WeightedGraph,
    low: f64,
    high: f64,
    seed: u64,
) -> Result<WeightedGraph, GraphError> {
    if low < 0.0 || !(high >= low) || !(high > 0.0) {
        // Low may be zero because the interval is open there; weights stay
        // strictly positive either way.
        return Err(GraphError::InvalidParameter {
            name: "weight range",
            reason: format!("need 0 <= low <= high and high > 0, got ({low}, {high}]"),
        });
    }
    let mut rng = stream_rng(seed, 0);
    let mut out = WeightedGraph::new(g.node_count());
    for e in g.edges() {
        let w = uniform_open_closed(&mut rng, low, high);
        out.add_edge(e.a, e.b, w)?;
    }
    Ok(out)
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                g.add_edge(i, j, 1.0).expect("fresh pair");
            }
        }
    }
    g
}

fn small_world(n: usize, m: usize, theta: f64, rng: &mut ChaCha8Rng) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    let mut ring = Vec::new();
    for i in 0..n {
        for k in 1..=m {
            let j = (i + k) % n;
            if i != j && !g.has_edge(i, j) {
                g.add_edge(i, j, 1.0).expect("checked");
                ring.push((i, j));
            }
        }
    }
    // Shortcuts in canonical ring-edge order so draws are reproducible.
    for (u, _) in ring {
        if rng.random::<f64>() < theta {
            let target = rng.random_range(0..n);
            if target != u && !g.has_edge(u, target) {
                g.add_edge(u, target, 1.0).expect("checked");
            }
        }
    }
    g
}

fn square_grid(rows: usize, cols: usize) -> WeightedGraph {
    let mut g = WeightedGraph::new(rows * cols);
    let id = |r: usize, c: usize| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                g.add_edge(id(r, c), id(r, c + 1), 1.0).expect("lattice");
            }
            if r + 1 < rows {
                g.add_edge(id(r, c), id(r + 1, c), 1.0).expect("lattice");
            }
        }
    }
    g
}

fn scale_free(
    n: usize,
    sigma: f64,
    min_degree: usize,
    rng: &mut ChaCha8Rng,
) -> Result<WeightedGraph, GraphError> {
    // Truncated power-law degree table P(d) ∝ d^(-sigma), d in [min_degree, n-1].
    let degrees_support: Vec<usize> = (min_degree..n).collect();
    let weights: Vec<f64> = degrees_support.iter().map(|&d| (d as f64).powf(-sigma)).collect();
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cdf.push(acc);
    }
    let draw_degree = |rng: &mut ChaCha8Rng| -> usize {
        let u: f64 = rng.random();
        let pos = cdf.partition_point(|&c| c < u);
        degrees_support[pos.min(degrees_support.len() - 1)]
    };

    let mut degrees: Vec<usize> = (0..n).map(|_| draw_degree(rng)).collect();
    // Odd stub sum: resample the last node's degree until parity fixes.
    let mut tries = 0;
    while degrees.iter().sum::<usize>() % 2 == 1 {
        degrees[n - 1] = draw_degree(rng);
        tries += 1;
        if tries > 10_000 {
            return Err(GraphError::InvalidParameter {
                name: "min_degree",
                reason: "degree support cannot produce an even stub sum".into(),
            });
        }
    }

    // Uniform stub wiring with bounded retries; leftover stubs are discarded.
    let mut stubs: Vec<usize> = Vec::new();
    for (node, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(node, d));
    }
    let mut g = WeightedGraph::new(n);
    while stubs.len() >= 2 {
        let mut wired = false;
        for _ in 0..100 {
            let i = rng.random_range(0..stubs.len());
            let j = rng.random_range(0..stubs.len());
            if i == j {
                continue;
            }
            let (u, v) = (stubs[i], stubs[j]);
            if u == v || g.has_edge(u, v) {
                continue;
            }
            g.add_edge(u, v, 1.0).expect("checked");
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            stubs.swap_remove(hi);
            stubs.swap_remove(lo);
            wired = true;
            break;
        }
        if !wired {
            let idx = rng.random_range(0..stubs.len());
            stubs.swap_remove(idx);
        }
    }
    Ok(g)
}
