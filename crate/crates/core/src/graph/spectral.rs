//! Laplacian spectra.
//!
//! Eigenvalues come from cyclic Jacobi rotations on the dense symmetric
//! Laplacian, which is plenty at desk scale (n up to a few thousand) and
//! keeps the crate free of external linear-algebra backends. Sweeps stop once
//! the off-diagonal Frobenius norm drops below `1e-12 * ||L||`.

use ndarray::Array2;

use super::{GraphError, WeightedGraph};

/// The two Laplacian eigenvalues that enter the step-size bound, plus their
/// ratio `lambda2 / lambda_n^2`.
///
/// Computed on the *weighted* Laplacian. For switching topologies the natural
/// input is the union graph over the connectivity window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSummary {
    /// Smallest nonzero eigenvalue (algebraic connectivity).
    pub lambda2: f64,
    /// Largest eigenvalue.
    pub lambda_n: f64,
    /// `lambda2 / lambda_n^2`.
    pub ratio: f64,
}

/// All eigenvalues of the weighted Laplacian, sorted ascending.
pub fn laplacian_eigenvalues(g: &WeightedGraph) -> Vec<f64> {
    let mut eigs = jacobi_eigenvalues(&g.laplacian());
    eigs.sort_by(|a, b| a.total_cmp(b));
    eigs
}

/// `lambda2` and `lambda_n` of the weighted Laplacian.
///
/// Errors on disconnected input, where the zero eigenvalue has multiplicity
/// above one and `lambda2` as defined does not exist.
pub fn spectral_bounds(g: &WeightedGraph) -> Result<SpectralSummary, GraphError> {
    if g.node_count() < 2 {
        return Err(GraphError::TooFewNodes { need: 2, have: g.node_count() });
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let eigs = laplacian_eigenvalues(g);
    let lambda2 = eigs[1];
    let lambda_n = eigs[eigs.len() - 1];
    Ok(SpectralSummary { lambda2, lambda_n, ratio: lambda2 / (lambda_n * lambda_n) })
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps (unsorted).
pub(crate) fn jacobi_eigenvalues(mat: &Array2<f64>) -> Vec<f64> {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols(), "matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![mat[[0, 0]]];
    }
    let mut a = mat.to_owned();
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-12 * norm.max(f64::MIN_POSITIVE);

    for _sweep in 0..200 {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += 2.0 * a[[p, q]] * a[[p, q]];
                }
            }
            s.sqrt()
        };
        if off <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                // Symmetric Schur rotation annihilating a[p][q].
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let (app, aqq) = (a[[p, p]], a[[q, q]]);
                a[[p, p]] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[[q, q]] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let (aip, aiq) = (a[[i, p]], a[[i, q]]);
                        a[[i, p]] = c * aip - s * aiq;
                        a[[p, i]] = a[[i, p]];
                        a[[i, q]] = s * aip + c * aiq;
                        a[[q, i]] = a[[i, q]];
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[[i, i]]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assign_weights, generate, GraphModel, GraphModelSpec};

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }

    #[test]
    fn closed_form_spectra() {
        // K2: {0, 2}
        let k2 = WeightedGraph::with_edges(2, [(0, 1, 1.0)]).unwrap();
        let s = spectral_bounds(&k2).unwrap();
        assert_close(s.lambda2, 2.0, 1e-10);
        assert_close(s.lambda_n, 2.0, 1e-10);

        // K3: {0, 3, 3}
        let k3 = WeightedGraph::with_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let s = spectral_bounds(&k3).unwrap();
        assert_close(s.lambda2, 3.0, 1e-10);
        assert_close(s.lambda_n, 3.0, 1e-10);

        // Star K_{1,3}: {0, 1, 1, 4}
        let star =
            WeightedGraph::with_edges(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let s = spectral_bounds(&star).unwrap();
        assert_close(s.lambda2, 1.0, 1e-10);
        assert_close(s.lambda_n, 4.0, 1e-10);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = WeightedGraph::new(2);
        assert!(matches!(spectral_bounds(&g), Err(GraphError::Disconnected)));
    }

    #[test]
    fn zero_eigenvalue_multiplicity_counts_components() {
        // Two components: K2 + K2.
        let g = WeightedGraph::with_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let eigs = laplacian_eigenvalues(&g);
        let zeros = eigs.iter().filter(|&&x| x.abs() < 1e-9).count();
        assert_eq!(zeros, 2);

        // Three components: K2 + K2 + isolated node.
        let g = WeightedGraph::with_edges(5, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let eigs = laplacian_eigenvalues(&g);
        let zeros = eigs.iter().filter(|&&x| x.abs() < 1e-9).count();
        assert_eq!(zeros, 3);
    }

    #[test]
    fn gershgorin_bound_and_diameter_bound_hold_on_generated_graphs() {
        for seed in 0..30u64 {
            let g = generate(&GraphModelSpec {
                model: GraphModel::ErdosRenyi { n: 14, p: 0.4 },
                seed,
            })
            .unwrap();
            if !g.is_connected() {
                continue;
            }
            let s = spectral_bounds(&g).unwrap();
            let max_wdeg =
                g.weighted_degrees().into_iter().fold(0.0f64, f64::max);
            assert!(s.lambda_n <= 2.0 * max_wdeg + 1e-9);
            // Algebraic connectivity against the diameter bound (unit weights).
            let d = g.diameter().unwrap() as f64;
            let n = g.node_count() as f64;
            assert!(
                s.lambda2 >= 1.0 / (n * d) - 1e-12,
                "lambda2 {} below 1/(n d) = {}",
                s.lambda2,
                1.0 / (n * d)
            );
        }
    }

    #[test]
    fn weighted_spectrum_scales_with_uniform_weights() {
        let g = WeightedGraph::with_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let w = assign_weights(&g, 2.0, 2.0, 0).unwrap();
        let s = spectral_bounds(&w).unwrap();
        assert_close(s.lambda2, 6.0, 1e-9);
        assert_close(s.lambda_n, 6.0, 1e-9);
        assert_close(s.ratio, 6.0 / 36.0, 1e-12);
    }
}
