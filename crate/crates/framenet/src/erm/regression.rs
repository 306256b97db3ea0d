use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::erm::study::check_grid;
use crate::erm::{RateStudy, StudyRow};
use crate::error::{Error, Result};
use crate::hilbert::xi_1d;
use crate::rng::stream_rng;

/// Least-squares fit in the span of the first `terms` real Fourier functions
/// on the unit interval.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSieve {
    pub coeffs: Vec<f64>,
}

impl FourierSieve {
    pub fn fit(xs: &[f64], ys: &[f64], terms: usize) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Dimension { expected: xs.len(), got: ys.len() });
        }
        if terms == 0 || terms > xs.len() {
            return Err(Error::input(format!("need 1 <= terms <= samples, got {terms} terms for {} samples", xs.len())));
        }
        let a = DMatrix::from_fn(xs.len(), terms, |i, j| xi_1d(j, xs[i]));
        let b = DVector::from_column_slice(ys);
        let sol = a
            .svd(true, true)
            .solve(&b, 1e-12)
            .map_err(|e| Error::Solver(format!("least squares failed: {e}")))?;
        Ok(Self { coeffs: sol.iter().copied().collect() })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(j, c)| c * xi_1d(j, x)).sum()
    }
}

/// Settings of the one-dimensional regression experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegressionConfig {
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub sigma: f64,
    /// Smoothness `s` of the class; the sieve dimension is `ceil(n^{1/(2s+1)})`.
    pub smoothness: f64,
    /// Midpoint-rule nodes used to integrate the squared error.
    pub quadrature_points: usize,
    pub seed: u64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![128, 256, 512, 1024, 2048, 4096],
            reps: 5,
            sigma: 0.5,
            smoothness: 1.0,
            quadrature_points: 4096,
            seed: 0,
        }
    }
}

/// Sieve dimension `ceil(n^{1/(2s+1)})`, at least 2.
pub fn sieve_terms(n: usize, smoothness: f64) -> usize {
    crate::erm::budget_schedule(n, 2.0 * smoothness).max(2)
}

/// Regression of `truth` from `n` uniform design points with Gaussian noise,
/// estimated by the Fourier sieve and scored by the `L2(0, 1)` error.
///
/// The reported slope reference is the minimax exponent `-2s/(2s+1)`.
pub fn regression_study<F>(truth: F, cfg: &RegressionConfig) -> Result<RateStudy>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_grid(&cfg.n_grid)?;
    if cfg.reps == 0 || cfg.quadrature_points == 0 {
        return Err(Error::input("replications and quadrature points must be positive"));
    }
    if !(cfg.smoothness > 0.0) || !(cfg.sigma >= 0.0) {
        return Err(Error::input("need positive smoothness and nonnegative noise"));
    }
    let q = cfg.quadrature_points;
    let nodes: Vec<f64> = (0..q).map(|i| (i as f64 + 0.5) / q as f64).collect();
    let truth_vals: Vec<f64> = nodes.iter().map(|&x| truth(x)).collect();
    let cells: Vec<(usize, usize, usize)> = cfg
        .n_grid
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| (0..cfg.reps).map(move |rep| (k * cfg.reps + rep, n, rep)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(cell, n, rep)| {
            let mut rng = stream_rng(cfg.seed, cell as u64);
            let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let ys: Vec<f64> =
                xs.iter().map(|&x| truth(x) + cfg.sigma * rng.sample::<f64, _>(StandardNormal)).collect();
            let terms = sieve_terms(n, cfg.smoothness);
            let fit = FourierSieve::fit(&xs, &ys, terms)?;
            let sq: Vec<f64> = nodes.iter().zip(&truth_vals).map(|(&x, t)| (fit.eval(x) - t).powi(2)).collect();
            let (mse, se) = crate::erm::mean_and_stderr(&sq);
            Ok(StudyRow { n, big_n: terms, rep, mse, se })
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa = 2.0 * cfg.smoothness;
    RateStudy::from_rows(kappa, rows)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn sieve_recovers_trigonometric_polynomial() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 50.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.3 + (2.0 * PI * x).sin()).collect();
        let fit = FourierSieve::fit(&xs, &ys, 5).unwrap();
        assert!((fit.coeffs[0] - 0.3).abs() < 1e-12);
        assert!((fit.coeffs[1] - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(fit.coeffs[2..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn small_study_runs() {
        let cfg = RegressionConfig { n_grid: vec![64, 256], reps: 2, ..Default::default() };
        let s = regression_study(|x| (2.0 * PI * x).sin(), &cfg).unwrap();
        assert_eq!(s.rows.len(), 4);
        assert_eq!(s.summary[0].big_n, 4);
        assert!(s.summary[1].mean_mse < s.summary[0].mean_mse);
    }
}
