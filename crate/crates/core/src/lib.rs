//! Sum-preserving distributed resource allocation over lossy networks.
//!
//! A network of nodes shares a divisible resource under the coupling
//! constraint `sum_i x_i = b` and minimizes a sum of strictly convex local
//! costs. Nodes run a nonlinear gradient-tracking update over whatever links
//! survive each iteration's packet drops. Two structural facts organize the
//! whole crate:
//!
//! * **All-time feasibility.** With symmetric link weights and odd
//!   nonlinearities, every per-link flow is applied antisymmetrically to its
//!   two endpoints, so the resource sum never moves - at every iteration, not
//!   just in the limit. No weight-stochasticity or compensation after drops
//!   is needed.
//! * **Uniform connectivity windows.** The dynamics converges when the union
//!   of active topologies over every window of `B + 1` iterations is
//!   connected. Treating packet loss as bond percolation ties the admissible
//!   drop rate to the network's percolation threshold `p_c`: the minimal
//!   window satisfies `(2 p_d - p_d^2)^(B+1) < p_c`.
//!
//! Module map:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | weighted graphs, random-model generators, Laplacian spectra, unions, edge-list IO |
//! | [`percolation`] | analytic/Monte-Carlo thresholds, Hurwitz zeta, drop-rate algebra, window bounds |
//! | [`maps`] | odd sign-preserving nonlinearities with sector certification |
//! | [`objective`] | strictly convex local costs with soft box penalties |
//! | [`dynamics`] | the update step, admissible step size, feasible initialisation |
//! | [`kkt`] | centralized bisection oracle used as ground truth |
//! | [`sim`] | seeded packet-drop runs, traces, window-connectivity audits |
//!
//! Everything stochastic takes an explicit seed and is reproducible
//! bit-for-bit; see [`rng`] for the stream-splitting convention.

#![forbid(unsafe_code)]
// Domain checks are written as `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod graph;
pub mod kkt;
pub mod maps;
pub mod objective;
pub mod percolation;
pub mod rng;
pub mod sim;
