use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::MultiIndexSet;
use crate::error::{check_dim, Error, Result};
use crate::hilbert::sample_uniform_cube;
use crate::rng::stream_rng;

/// Legendre coefficients `c[i][j]` of a Y-valued target, row `i` for the
/// `i`-th multi-index and column `j` for the `j`-th output mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub indices: MultiIndexSet,
    pub c: Vec<Vec<f64>>,
    /// Monte Carlo standard error per entry; zero for Gauss quadrature.
    pub stderr: Vec<Vec<f64>>,
}

impl CoefficientTable {
    pub fn new(indices: MultiIndexSet, c: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(indices.len(), c.len())?;
        let cols = c.first().map(Vec::len).unwrap_or(0);
        if c.iter().any(|row| row.len() != cols) {
            return Err(Error::input("coefficient rows must have equal length"));
        }
        if c.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::input("coefficients must be finite"));
        }
        let stderr = vec![vec![0.0; cols]; c.len()];
        Ok(Self { indices, c, stderr })
    }

    pub fn rows(&self) -> usize {
        self.c.len()
    }

    pub fn cols(&self) -> usize {
        self.c.first().map(Vec::len).unwrap_or(0)
    }

    /// Weights `prod_k (1 + 2 nu_k)` of the rows.
    pub fn weights(&self) -> Vec<f64> {
        self.indices.indices().iter().map(|nu| nu.weight()).collect()
    }
}

/// Quadrature rule for the integrals over the cube.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quadrature {
    MonteCarlo { samples: usize, seed: u64 },
    /// Tensor Gauss-Legendre rule, only for inputs of dimension at most 4.
    Gauss { order: usize },
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule for the uniform
/// probability measure on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    if order == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut jacobi = DMatrix::zeros(order, order);
    for k in 1..order {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Estimates `c_{nu,j} = E[L_nu(y) u_j(y)]` for `y` uniform on `[-1, 1]^dim`,
/// where `target(y)` returns the first `out_modes` dual-frame coefficients of
/// the target at `y`.
pub fn estimate_legendre_coeffs<F>(
    target: F,
    lambda: &MultiIndexSet,
    dim: usize,
    out_modes: usize,
    quadrature: Quadrature,
) -> Result<CoefficientTable>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if lambda.extent() > dim {
        return Err(Error::input(format!("index set touches {} coordinates, input has {dim}", lambda.extent())));
    }
    let (points, weights): (Vec<Vec<f64>>, Vec<f64>) = match quadrature {
        Quadrature::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::input("Monte Carlo estimation needs at least two samples"));
            }
            let pts =
                (0..samples).map(|q| sample_uniform_cube(dim, &mut stream_rng(seed, q as u64))).collect::<Vec<_>>();
            (pts, vec![1.0 / samples as f64; samples])
        }
        Quadrature::Gauss { order } => {
            if dim > 4 {
                return Err(Error::input(format!("tensor Gauss rule limited to 4 dimensions, got {dim}")));
            }
            if order == 0 {
                return Err(Error::input("Gauss order must be positive"));
            }
            let (nodes, w) = gauss_legendre(order);
            let mut pts = vec![Vec::new()];
            let mut wts = vec![1.0];
            for _ in 0..dim {
                let mut np = Vec::with_capacity(pts.len() * order);
                let mut nw = Vec::with_capacity(pts.len() * order);
                for (p, pw) in pts.iter().zip(&wts) {
                    for (x, xw) in nodes.iter().zip(&w) {
                        let mut q = p.clone();
                        q.push(*x);
                        np.push(q);
                        nw.push(pw * xw);
                    }
                }
                pts = np;
                wts = nw;
            }
            (pts, wts)
        }
    };
    let values = points
        .par_iter()
        .map(|y| {
            let v = target(y)?;
            if v.len() < out_modes {
                return Err(Error::Dimension { expected: out_modes, got: v.len() });
            }
            Ok(v[..out_modes].to_vec())
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = lambda.len();
    let mut c = vec![vec![0.0; out_modes]; rows];
    let mut sq = vec![vec![0.0; out_modes]; rows];
    for ((y, v), w) in points.iter().zip(&values).zip(&weights) {
        for (i, nu) in lambda.indices().iter().enumerate() {
            let l = nu.legendre(y);
            for j in 0..out_modes {
                let t = l * v[j];
                c[i][j] += w * t;
                sq[i][j] += w * t * t;
            }
        }
    }
    let stderr = match quadrature {
        Quadrature::MonteCarlo { samples, .. } => {
            let q = samples as f64;
            c.iter()
                .zip(&sq)
                .map(|(cr, sr)| {
                    cr.iter().zip(sr).map(|(m, s)| ((s - m * m).max(0.0) * q / (q - 1.0) / q).sqrt()).collect()
                })
                .collect()
        }
        Quadrature::Gauss { .. } => vec![vec![0.0; out_modes]; rows],
    };
    Ok(CoefficientTable { indices: lambda.clone(), c, stderr })
}
