//! Packet-drop simulation over a fixed weighted base graph.
//!
//! Per iteration, every undirected link suffers two independent per-direction
//! loss events at the scheduled drop rate; the link is discarded for that
//! iteration as soon as either direction drops (both endpoints know, so the
//! topology stays symmetric). The induced removal probability is therefore
//! `2 p_d - p_d^2`. Surviving links keep their base weights.
//!
//! A run is: feasible initialisation, then a loop of sample-active-links,
//! update-step, record. Traces are deterministic given the config, including
//! its seed, down to the serialized CSV bytes.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dynamics::{feasible_init, update_step, AllocationState, DynamicsError};
use crate::graph::{DisjointSet, GraphError, WeightedGraph};
use crate::kkt::{kkt_oracle, KktSolution};
use crate::maps::NonlinearMap;
use crate::objective::{total_cost, BoxBounds, LocalObjective};
use crate::rng::stream_rng;

const STREAM_DROPS: u64 = 1;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid run config: {0}")]
    InvalidConfig(String),

    #[error("drop schedule: {0}")]
    InvalidSchedule(String),

    #[error("feasibility violated at iteration {k}: sum = {sum}, demand = {demand}")]
    FeasibilityViolated { k: u64, sum: f64, demand: f64 },

    #[error("active-link sets were not recorded; enable the audit window")]
    NoActiveLog,

    #[error("audit window {window} does not fit a trace of {iters} iterations")]
    WindowTooLong { window: u32, iters: usize },

    #[error(transparent)]
    Dynamics(#[from] DynamicsError),

    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How drop rates vary over links and iterations.
#[derive(Debug, Clone, PartialEq)]
pub enum DropMode {
    /// One rate shared by every link at every iteration.
    Homogeneous { p_d: f64 },
    /// One rate per base-graph edge (canonical edge order), constant in time.
    Heterogeneous { rates: Vec<f64> },
    /// The listed rates each hold for `period` iterations; every full pass
    /// through the list is reshuffled with a seeded permutation.
    Scheduled { rates: Vec<f64>, period: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropSchedule {
    pub mode: DropMode,
    /// Seed for the scheduled-mode permutations (not the loss events; those
    /// draw from the run seed).
    pub seed: u64,
}

impl DropSchedule {
    pub fn reliable() -> Self {
        DropSchedule { mode: DropMode::Homogeneous { p_d: 0.0 }, seed: 0 }
    }

    pub fn validate(&self, edge_count: usize) -> Result<(), SimError> {
        let check = |p: f64| -> Result<(), SimError> {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidSchedule(format!("drop rate {p} outside [0, 1]")));
            }
            Ok(())
        };
        match &self.mode {
            DropMode::Homogeneous { p_d } => check(*p_d),
            DropMode::Heterogeneous { rates } => {
                if rates.len() != edge_count {
                    return Err(SimError::InvalidSchedule(format!(
                        "need one rate per edge: got {}, graph has {}",
                        rates.len(),
                        edge_count
                    )));
                }
                rates.iter().try_for_each(|&p| check(p))
            }
            DropMode::Scheduled { rates, period } => {
                if rates.is_empty() {
                    return Err(SimError::InvalidSchedule("scheduled rate list is empty".into()));
                }
                if *period == 0 {
                    return Err(SimError::InvalidSchedule("period length must be positive".into()));
                }
                rates.iter().try_for_each(|&p| check(p))
            }
        }
    }

    /// Drop rate of edge `edge_idx` at iteration `k`. Random access: the
    /// scheduled permutation for a cycle is derived from the cycle index, not
    /// from any draw history.
    pub fn rate_for(&self, edge_idx: usize, k: u64) -> f64 {
        match &self.mode {
            DropMode::Homogeneous { p_d } => *p_d,
            DropMode::Heterogeneous { rates } => rates[edge_idx],
            DropMode::Scheduled { rates, period } => {
                let block = k / period;
                let cycle = block / rates.len() as u64;
                let slot = (block % rates.len() as u64) as usize;
                let perm = seeded_permutation(rates.len(), self.seed, cycle);
                rates[perm[slot]]
            }
        }
    }
}

/// Fisher-Yates permutation of `0..n` from stream `cycle` of `seed`.
fn seeded_permutation(n: usize, seed: u64, cycle: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, cycle);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Draw the survival mask for iteration `k`: two per-direction loss draws per
/// edge, edge removed when either direction drops.
fn sample_mask(
    g: &WeightedGraph,
    schedule: &DropSchedule,
    k: u64,
    rng: &mut ChaCha8Rng,
    mask: &mut Vec<bool>,
) {
    mask.clear();
    for (idx, _) in g.edges().iter().enumerate() {
        let p = schedule.rate_for(idx, k);
        let drop_fwd = rng.random::<f64>() < p;
        let drop_bwd = rng.random::<f64>() < p;
        mask.push(!(drop_fwd || drop_bwd));
    }
}

/// The active topology at iteration `k` as a graph: surviving edges keep
/// their base weights; symmetric by construction.
pub fn sample_active_links(
    g: &WeightedGraph,
    schedule: &DropSchedule,
    k: u64,
    rng: &mut ChaCha8Rng,
) -> WeightedGraph {
    let mut mask = Vec::with_capacity(g.edge_count());
    sample_mask(g, schedule, k, rng, &mut mask);
    g.edge_subgraph(&mask)
}

/// Bit-packed per-iteration edge survival sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveLog {
    edge_count: usize,
    words_per_iter: usize,
    bits: Vec<u64>,
    iters: usize,
}

impl ActiveLog {
    fn new(edge_count: usize) -> Self {
        ActiveLog { edge_count, words_per_iter: edge_count.div_ceil(64), bits: Vec::new(), iters: 0 }
    }

    fn push(&mut self, mask: &[bool]) {
        debug_assert_eq!(mask.len(), self.edge_count);
        let base = self.bits.len();
        self.bits.resize(base + self.words_per_iter, 0);
        for (i, &alive) in mask.iter().enumerate() {
            if alive {
                self.bits[base + i / 64] |= 1u64 << (i % 64);
            }
        }
        self.iters += 1;
    }

    pub fn iterations(&self) -> usize {
        self.iters
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_active(&self, k: usize, edge: usize) -> bool {
        let base = k * self.words_per_iter;
        self.bits[base + edge / 64] & (1u64 << (edge % 64)) != 0
    }

    pub fn active_count(&self, k: usize) -> usize {
        let base = k * self.words_per_iter;
        self.bits[base..base + self.words_per_iter].iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxIters,
    /// Gradient dispersion fell below the configured tolerance at this step.
    DispersionTol { at: u64 },
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::MaxIters => write!(f, "max-iters"),
            Termination::DispersionTol { at } => write!(f, "dispersion-tol@{at}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: WeightedGraph,
    pub objectives: Vec<LocalObjective>,
    pub g_n: NonlinearMap,
    pub g_l: NonlinearMap,
    pub eta: f64,
    /// Demand `b`.
    pub demand: f64,
    /// Boxes for the feasible initialisation; `None` spreads the demand.
    pub init_bounds: Option<Vec<BoxBounds>>,
    pub drops: DropSchedule,
    pub max_iters: u64,
    /// Relative all-time feasibility tolerance (violation is a hard error).
    pub feas_tol: f64,
    /// Early-termination threshold on gradient dispersion; 0 disables.
    pub dispersion_tol: f64,
    /// Window length `B` for connectivity flags and the active-set log.
    pub audit_window: Option<u32>,
    /// Keep the full state trajectory in the trace.
    pub record_states: bool,
    /// Compute the centralized optimum so residual columns are available.
    pub oracle_tol: Option<f64>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(
        graph: WeightedGraph,
        objectives: Vec<LocalObjective>,
        eta: f64,
        demand: f64,
        seed: u64,
    ) -> Self {
        RunConfig {
            graph,
            objectives,
            g_n: NonlinearMap::Identity,
            g_l: NonlinearMap::Identity,
            eta,
            demand,
            init_bounds: None,
            drops: DropSchedule::reliable(),
            max_iters: 1000,
            feas_tol: 1e-9,
            dispersion_tol: 0.0,
            audit_window: None,
            record_states: false,
            oracle_tol: None,
            seed,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        let n = self.graph.node_count();
        if self.objectives.len() != n {
            return Err(SimError::InvalidConfig(format!(
                "{} objectives for {} nodes",
                self.objectives.len(),
                n
            )));
        }
        if !(self.eta > 0.0) {
            return Err(SimError::InvalidConfig(format!("eta = {} must be positive", self.eta)));
        }
        if self.max_iters < 1 {
            return Err(SimError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.feas_tol > 0.0) {
            return Err(SimError::InvalidConfig("feas_tol must be positive".into()));
        }
        if let Some(bx) = &self.init_bounds {
            if bx.len() != n {
                return Err(SimError::InvalidConfig(format!(
                    "{} init bounds for {} nodes",
                    bx.len(),
                    n
                )));
            }
        }
        self.drops.validate(self.graph.edge_count())?;
        Ok(())
    }
}

/// One row per iteration plus a final row for the terminal state.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: u64,
    /// `F(x(k))`.
    pub cost: f64,
    /// `F(x(k)) - F(x*)` when the oracle is enabled.
    pub residual: Option<f64>,
    pub sum_x: f64,
    /// Surviving links at step `k`; absent on the final row.
    pub active_edges: Option<usize>,
    /// Disjoint-window union connectivity, reported on window-closing rows.
    pub window_connected: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub final_state: Vec<f64>,
    /// Full trajectory, when requested (one entry per record).
    pub states: Option<Vec<Vec<f64>>>,
    pub termination: Termination,
    pub oracle: Option<KktSolution>,
    pub active_log: Option<ActiveLog>,
    pub demand: f64,
    /// Worst `|sum x - b| / max(1, |b|)` seen over the run.
    pub max_feasibility_violation: f64,
}

impl RunTrace {
    pub fn final_cost(&self) -> f64 {
        self.records.last().map(|r| r.cost).unwrap_or(f64::NAN)
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.residual)
    }

    /// `max_i |x_i - x_i*|` against the oracle solution, when available.
    pub fn oracle_gap_inf(&self) -> Option<f64> {
        self.oracle.as_ref().map(|sol| {
            self.final_state
                .iter()
                .zip(&sol.x_star)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        })
    }
}

/// Execute the allocation algorithm over the lossy topology.
pub fn run(config: &RunConfig) -> Result<RunTrace, SimError> {
    config.validate()?;
    let n = config.graph.node_count();
    let demand = config.demand;

    let oracle = match config.oracle_tol {
        Some(tol) => Some(kkt_oracle(&config.objectives, demand, tol)?),
        None => None,
    };
    let optimal_cost = oracle.as_ref().map(|sol| total_cost(&config.objectives, &sol.x_star));

    // Initialisation draws from stream 0 of the run seed, loss events from
    // stream 1; the two processes never share randomness.
    let x0 = feasible_init(n, demand, config.init_bounds.as_deref(), config.seed)?;
    let mut state = AllocationState { x: x0, k: 0, b: demand };

    let mut drop_rng = stream_rng(config.seed, STREAM_DROPS);
    let mut mask: Vec<bool> = Vec::with_capacity(config.graph.edge_count());

    let window = config.audit_window.map(|b| b as u64 + 1);
    let mut window_union: Option<DisjointSet> = window.map(|_| DisjointSet::new(n));
    let mut active_log = config.audit_window.map(|_| ActiveLog::new(config.graph.edge_count()));

    let mut records = Vec::with_capacity(config.max_iters as usize + 1);
    let mut states = if config.record_states { Some(Vec::new()) } else { None };
    let mut max_violation = 0.0f64;
    let mut termination = Termination::MaxIters;

    let check_feasibility = |state: &AllocationState, max_violation: &mut f64| {
        let v = state.feasibility_violation();
        *max_violation = max_violation.max(v);
        // Written so a non-finite sum (diverged run) also trips the error.
        if !(v <= config.feas_tol) {
            return Err(SimError::FeasibilityViolated {
                k: state.k,
                sum: state.sum(),
                demand,
            });
        }
        Ok(())
    };

    for k in 0..config.max_iters {
        check_feasibility(&state, &mut max_violation)?;

        sample_mask(&config.graph, &config.drops, k, &mut drop_rng, &mut mask);
        if let Some(log) = active_log.as_mut() {
            log.push(&mask);
        }

        // Window bookkeeping: fold this step's edges into the running union;
        // report and reset at the closing step of each disjoint window.
        let mut window_flag = None;
        if let (Some(w), Some(union)) = (window, window_union.as_mut()) {
            for (idx, e) in config.graph.edges().iter().enumerate() {
                if mask[idx] {
                    union.union(e.a, e.b);
                }
            }
            if (k + 1) % w == 0 {
                window_flag = Some(union.component_count() == 1);
                *union = DisjointSet::new(n);
            }
        }

        let cost = total_cost(&config.objectives, &state.x);
        records.push(TraceRecord {
            k,
            cost,
            residual: optimal_cost.map(|f_star| cost - f_star),
            sum_x: state.sum(),
            active_edges: Some(mask.iter().filter(|&&m| m).count()),
            window_connected: window_flag,
        });
        if let Some(st) = states.as_mut() {
            st.push(state.x.clone());
        }

        let active = config.graph.edge_subgraph(&mask);
        state = update_step(&state, &active, &config.objectives, &config.g_n, &config.g_l, config.eta)
            .map_err(SimError::from)?;

        if config.dispersion_tol > 0.0 {
            let grads = crate::objective::gradient_vector(&config.objectives, &state.x);
            if crate::dynamics::dispersion(&grads) < config.dispersion_tol {
                termination = Termination::DispersionTol { at: state.k };
                break;
            }
        }
    }

    check_feasibility(&state, &mut max_violation)?;
    let cost = total_cost(&config.objectives, &state.x);
    records.push(TraceRecord {
        k: state.k,
        cost,
        residual: optimal_cost.map(|f_star| cost - f_star),
        sum_x: state.sum(),
        active_edges: None,
        window_connected: None,
    });
    if let Some(st) = states.as_mut() {
        st.push(state.x.clone());
    }

    Ok(RunTrace {
        records,
        final_state: state.x,
        states,
        termination,
        oracle,
        active_log,
        demand,
        max_feasibility_violation: max_violation,
    })
}

/// Window-connectivity audit over a recorded run.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Window length parameter `B` (a window spans `B + 1` iterations).
    pub window: u32,
    pub sliding_windows: usize,
    pub sliding_connected: usize,
    pub disjoint_windows: usize,
    pub disjoint_connected: usize,
    /// Smallest `B'` for which every sliding window of length `B' + 1` inside
    /// the trace has a connected union; `None` if no such `B'` fits.
    pub min_empirical_window: Option<u32>,
}

impl AuditReport {
    pub fn all_sliding_connected(&self) -> bool {
        self.sliding_connected == self.sliding_windows
    }

    pub fn all_disjoint_connected(&self) -> bool {
        self.disjoint_connected == self.disjoint_windows
    }
}

/// Audit union connectivity of every window of `window + 1` consecutive
/// active-link sets, both sliding and disjoint.
pub fn window_connectivity_audit(
    base: &WeightedGraph,
    log: &ActiveLog,
    window: u32,
) -> Result<AuditReport, SimError> {
    let iters = log.iterations();
    let w = window as usize + 1;
    if w > iters {
        return Err(SimError::WindowTooLong { window, iters });
    }
    let n = base.node_count();
    let edges = base.edges();

    // needed[k]: union length from start k until the union connects, capped
    // at the remaining trace.
    let mut needed: Vec<Option<usize>> = Vec::with_capacity(iters);
    for start in 0..iters {
        let mut ds = DisjointSet::new(n);
        let mut found = None;
        for (offset, k) in (start..iters).enumerate() {
            for (idx, e) in edges.iter().enumerate() {
                if log.is_active(k, idx) {
                    ds.union(e.a, e.b);
                }
            }
            if ds.component_count() == 1 {
                found = Some(offset);
                break;
            }
        }
        needed.push(found);
    }

    let connects_within = |start: usize, len: usize| -> bool {
        matches!(needed[start], Some(need) if need < len)
    };

    let sliding_windows = iters - w + 1;
    let sliding_connected = (0..sliding_windows).filter(|&k| connects_within(k, w)).count();

    let disjoint_starts: Vec<usize> = (0..sliding_windows).step_by(w).collect();
    let disjoint_windows = disjoint_starts.len();
    let disjoint_connected =
        disjoint_starts.iter().filter(|&&k| connects_within(k, w)).count();

    let mut min_empirical_window = None;
    'outer: for b in 0..iters {
        let len = b + 1;
        for start in 0..=(iters - len) {
            if !connects_within(start, len) {
                continue 'outer;
            }
        }
        min_empirical_window = Some(b as u32);
        break;
    }

    Ok(AuditReport {
        window,
        sliding_windows,
        sliding_connected,
        disjoint_windows,
        disjoint_connected,
        min_empirical_window,
    })
}

/// Trace CSV: `k,F,residual,sum_x,active_edges,window_connected`, one row per
/// record. Optional fields serialize as empty cells. Identical configs yield
/// byte-identical output.
pub fn write_trace_csv<W: Write>(trace: &RunTrace, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "k,F,residual,sum_x,active_edges,window_connected")?;
    for r in &trace.records {
        write!(out, "{},{}", r.k, r.cost)?;
        match r.residual {
            Some(res) => write!(out, ",{res}")?,
            None => write!(out, ",")?,
        }
        write!(out, ",{}", r.sum_x)?;
        match r.active_edges {
            Some(a) => write!(out, ",{a}")?,
            None => write!(out, ",")?,
        }
        match r.window_connected {
            Some(true) => writeln!(out, ",1")?,
            Some(false) => writeln!(out, ",0")?,
            None => writeln!(out, ",")?,
        }
    }
    Ok(())
}

/// States CSV: `k,x1,...,xn`; requires `record_states`.
pub fn write_states_csv<W: Write>(trace: &RunTrace, out: &mut W) -> std::io::Result<()> {
    let states = match &trace.states {
        Some(s) => s,
        None => return Ok(()),
    };
    let n = states.first().map(|x| x.len()).unwrap_or(0);
    write!(out, "k")?;
    for i in 1..=n {
        write!(out, ",x{i}")?;
    }
    writeln!(out)?;
    for (r, x) in trace.records.iter().zip(states) {
        write!(out, "{}", r.k)?;
        for v in x {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::step_bound;
    use crate::graph::{assign_weights, generate, spectral_bounds, GraphModel, GraphModelSpec};
    use crate::objective::{curvature_bound, sample_quadratics, ParamRanges};

    fn er_graph(seed: u64) -> WeightedGraph {
        generate(&GraphModelSpec { model: GraphModel::ErdosRenyi { n: 10, p: 0.5 }, seed })
            .unwrap()
    }

    #[test]
    fn zero_drop_rate_keeps_the_base_graph() {
        let g = er_graph(4);
        let mut rng = stream_rng(0, 0);
        let active = sample_active_links(&g, &DropSchedule::reliable(), 0, &mut rng);
        assert_eq!(active, g);
    }

    #[test]
    fn certain_drop_empties_the_graph() {
        let g = er_graph(4);
        let sched = DropSchedule { mode: DropMode::Homogeneous { p_d: 1.0 }, seed: 0 };
        let mut rng = stream_rng(0, 0);
        let active = sample_active_links(&g, &sched, 0, &mut rng);
        assert_eq!(active.edge_count(), 0);
    }

    #[test]
    fn empirical_removal_fraction_matches_the_induced_rate() {
        // Grid with 10049 edges; one draw at p_d = 0.4 must land within
        // 3 sigma (binomial) of the induced removal rate 0.64.
        let g = generate(&GraphModelSpec {
            model: GraphModel::SquareGrid { rows: 100, cols: 51 },
            seed: 0,
        })
        .unwrap();
        let edges = g.edge_count() as f64;
        let sched = DropSchedule { mode: DropMode::Homogeneous { p_d: 0.4 }, seed: 0 };
        let mut rng = stream_rng(21, 0);
        let active = sample_active_links(&g, &sched, 0, &mut rng);
        let removed = 1.0 - active.edge_count() as f64 / edges;
        let sigma = (0.64 * 0.36 / edges).sqrt();
        assert!(
            (removed - 0.64).abs() <= 3.0 * sigma,
            "removal fraction {removed} vs 0.64 +- {}",
            3.0 * sigma
        );
    }

    #[test]
    fn law_of_large_numbers_for_the_removal_rate() {
        // One edge sampled 1e5 times at p_d = 0.4: frequency within 1% of 0.64.
        let g = WeightedGraph::with_edges(2, [(0, 1, 1.0)]).unwrap();
        let sched = DropSchedule { mode: DropMode::Homogeneous { p_d: 0.4 }, seed: 0 };
        let mut rng = stream_rng(5, 0);
        let trials = 100_000;
        let mut removed = 0usize;
        let mut mask = Vec::new();
        for k in 0..trials {
            sample_mask(&g, &sched, k, &mut rng, &mut mask);
            if !mask[0] {
                removed += 1;
            }
        }
        let freq = removed as f64 / trials as f64;
        assert!((freq - 0.64).abs() / 0.64 <= 0.01, "empirical rate {freq}");
    }

    #[test]
    fn heterogeneous_rates_apply_per_edge() {
        // Path 0-1-2: the first edge always drops, the second never does.
        let g = WeightedGraph::with_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let sched =
            DropSchedule { mode: DropMode::Heterogeneous { rates: vec![1.0, 0.0] }, seed: 0 };
        let mut rng = stream_rng(2, 0);
        for k in 0..50 {
            let active = sample_active_links(&g, &sched, k, &mut rng);
            assert_eq!(active.edge_count(), 1);
            assert!(active.has_edge(1, 2));
        }
        // One rate per edge is required.
        let short = DropSchedule { mode: DropMode::Heterogeneous { rates: vec![0.5] }, seed: 0 };
        assert!(matches!(short.validate(2), Err(SimError::InvalidSchedule(_))));
    }

    #[test]
    fn scheduled_rates_permute_per_cycle_and_are_deterministic() {
        let sched = DropSchedule {
            mode: DropMode::Scheduled { rates: vec![0.1, 0.2, 0.3], period: 10 },
            seed: 9,
        };
        // Within one block of 10 the rate is constant.
        let r0 = sched.rate_for(0, 0);
        assert_eq!(sched.rate_for(0, 9), r0);
        // Each 30-step cycle uses each rate exactly once.
        for cycle in 0..4u64 {
            let mut seen: Vec<f64> =
                (0..3).map(|slot| sched.rate_for(0, cycle * 30 + slot * 10)).collect();
            seen.sort_by(f64::total_cmp);
            assert_eq!(seen, vec![0.1, 0.2, 0.3]);
        }
        // Random access agrees with itself.
        assert_eq!(sched.rate_for(0, 55), sched.rate_for(0, 55));
    }

    fn quadratic_config(seed: u64) -> RunConfig {
        let g = er_graph(2);
        let g = assign_weights(&g, 0.0, 10.0, 3).unwrap();
        let n = g.node_count();
        let objs = sample_quadratics(n, &ParamRanges::default(), None, 4).unwrap();
        let spec = spectral_bounds(&g).unwrap();
        let u = curvature_bound(&objs, -20.0, 20.0, 64);
        let unit = crate::maps::SectorBounds { kappa: 1.0, upper: 1.0 };
        let eta = 0.9 * step_bound(unit, unit, u, spec.lambda2, spec.lambda_n, 0).unwrap();
        let mut cfg = RunConfig::new(g, objs, eta, 40.0, seed);
        cfg.max_iters = 4000;
        cfg.oracle_tol = Some(1e-12);
        cfg
    }

    #[test]
    fn reliable_run_converges_to_the_oracle() {
        let trace = run(&quadratic_config(11)).unwrap();
        let gap = trace.oracle_gap_inf().unwrap();
        assert!(gap <= 1e-6, "oracle gap {gap}");
        assert!(trace.max_feasibility_violation <= 1e-9);
        assert_eq!(trace.records.len(), 4001);
    }

    #[test]
    fn runs_are_bit_identical_given_the_config() {
        let mut cfg = quadratic_config(11);
        cfg.max_iters = 200;
        cfg.audit_window = Some(3);
        cfg.record_states = true;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        write_trace_csv(&a, &mut csv_a).unwrap();
        write_trace_csv(&b, &mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b);
    }

    #[test]
    fn lossy_runs_stay_feasible_and_flag_windows() {
        let mut cfg = quadratic_config(8);
        cfg.max_iters = 500;
        cfg.drops = DropSchedule { mode: DropMode::Homogeneous { p_d: 0.4 }, seed: 17 };
        cfg.audit_window = Some(4);
        let trace = run(&cfg).unwrap();
        assert!(trace.max_feasibility_violation <= 1e-9);
        let flags: Vec<bool> =
            trace.records.iter().filter_map(|r| r.window_connected).collect();
        assert_eq!(flags.len(), 100);
        // The base graph is well connected and p_l = 0.64 over 5-step windows
        // leaves each edge absent with probability 0.64^5 ~ 0.107; nearly all
        // windows connect.
        let connected = flags.iter().filter(|&&f| f).count();
        assert!(connected >= 95, "{connected}/100 windows connected");
    }

    #[test]
    fn audit_of_a_static_connected_graph_is_all_connected() {
        let mut cfg = quadratic_config(5);
        cfg.max_iters = 50;
        cfg.audit_window = Some(0);
        let trace = run(&cfg).unwrap();
        let report =
            window_connectivity_audit(&cfg.graph, trace.active_log.as_ref().unwrap(), 0).unwrap();
        assert_eq!(report.sliding_windows, 50);
        assert!(report.all_sliding_connected());
        assert!(report.all_disjoint_connected());
        assert_eq!(report.min_empirical_window, Some(0));
    }

    #[test]
    fn alternating_subgraphs_need_exactly_one_extra_step() {
        // Base path 0-1-2; activity alternates between edge {0,1} and edge
        // {1,2}. Each single step is disconnected, every 2-step union is
        // connected.
        let base = WeightedGraph::with_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let mut log = ActiveLog::new(2);
        for k in 0..10 {
            log.push(&[k % 2 == 0, k % 2 == 1]);
        }
        let b0 = window_connectivity_audit(&base, &log, 0).unwrap();
        assert_eq!(b0.sliding_connected, 0);
        assert_eq!(b0.disjoint_connected, 0);
        assert_eq!(b0.min_empirical_window, Some(1));
        let b1 = window_connectivity_audit(&base, &log, 1).unwrap();
        assert!(b1.all_sliding_connected());
        assert!(b1.all_disjoint_connected());

        assert!(matches!(
            window_connectivity_audit(&base, &log, 10),
            Err(SimError::WindowTooLong { .. })
        ));
    }

    #[test]
    fn trace_csv_shape() {
        let mut cfg = quadratic_config(3);
        cfg.max_iters = 3;
        cfg.audit_window = Some(0);
        cfg.record_states = true;
        let trace = run(&cfg).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,F,residual,sum_x,active_edges,window_connected");
        assert_eq!(lines.len(), 1 + 4); // 3 iteration rows + final row
        assert!(lines[4].ends_with(",,")); // final row: no active set, no flag

        let mut buf = Vec::new();
        write_states_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,x1,x2,"));
        assert_eq!(text.lines().count(), 1 + 4);
    }
}
