use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::MultiIndexSet;
use crate::darcy::{DarcyProblem, NoiseModel};
use crate::erm::{train_erm, FnPredictor, TestSet, TrainConfig};
use crate::error::{Error, Result};
use crate::framenet::{
    allocate_truncations, build_constructive_surrogate, estimate_legendre_coeffs, rho_schedule, ArchitectureConfig,
    Quadrature,
};
use crate::nn::Activation;
use crate::rng::stream_rng;

/// Least-squares slope of `log mse` against `log n`.
pub fn fit_loglog_slope(rows: &[(f64, f64)]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::input("slope fit needs at least two rows"));
    }
    if rows.iter().any(|&(n, m)| !(n > 0.0) || !(m > 0.0)) {
        return Err(Error::input("slope fit needs positive sample sizes and errors"));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, m)| (n.ln(), m.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    if sxx == 0.0 {
        return Err(Error::input("slope fit needs at least two distinct sample sizes"));
    }
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    Ok(sxy / sxx)
}

/// `ceil(n^{1/(kappa+1)})`, guarding against round-off just above an integer.
pub fn budget_schedule(n: usize, kappa: f64) -> usize {
    let v = (n as f64).powf(1.0 / (kappa + 1.0));
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r.max(1.0) as usize
    } else {
        v.ceil().max(1.0) as usize
    }
}

/// One replication of one sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub rep: usize,
    pub mse: f64,
    pub se: f64,
}

/// Replications of one sample size aggregated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub mean_mse: f64,
    pub sd: f64,
}

/// Errors over a grid of sample sizes with the fitted and predicted slopes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateStudy {
    pub kappa: f64,
    pub rows: Vec<StudyRow>,
    pub summary: Vec<StudySummary>,
    pub fitted_slope: f64,
    /// `-kappa / (kappa + 1)`.
    pub theoretical_slope: f64,
}

impl RateStudy {
    /// Aggregates rows sorted by sample size and replication.
    pub fn from_rows(kappa: f64, mut rows: Vec<StudyRow>) -> Result<Self> {
        rows.sort_by_key(|r| (r.n, r.rep));
        let mut summary: Vec<StudySummary> = Vec::new();
        let mut start = 0;
        while start < rows.len() {
            let n = rows[start].n;
            let end = start + rows[start..].iter().take_while(|r| r.n == n).count();
            let vals: Vec<f64> = rows[start..end].iter().map(|r| r.mse).collect();
            let k = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / k;
            let sd = if vals.len() > 1 {
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            summary.push(StudySummary { n, big_n: rows[start].big_n, mean_mse: mean, sd });
            start = end;
        }
        let pts: Vec<(f64, f64)> = summary.iter().map(|s| (s.n as f64, s.mean_mse)).collect();
        let fitted_slope = if pts.len() >= 2 { fit_loglog_slope(&pts)? } else { f64::NAN };
        Ok(Self { kappa, rows, summary, fitted_slope, theoretical_slope: -kappa / (kappa + 1.0) })
    }

    /// Number of consecutive sample sizes whose mean error did not decrease.
    pub fn inversions(&self) -> usize {
        self.summary.windows(2).filter(|w| w[1].mean_mse >= w[0].mean_mse).count()
    }

    /// Writes the per-replication rows with columns `n, N, rep, mse, se`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        let json = serde_json::json!({
            "kappa": self.kappa,
            "fitted_slope": self.fitted_slope,
            "theoretical_slope": self.theoretical_slope,
            "summary": self.summary,
        });
        std::fs::write(path, serde_json::to_string_pretty(&json)?)?;
        Ok(())
    }
}

pub(crate) fn check_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() || n_grid[0] == 0 {
        return Err(Error::input("sample-size grid must be nonempty and positive"));
    }
    if n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::input("sample-size grid must be strictly increasing"));
    }
    Ok(())
}

/// Settings of an operator-learning rate study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub sigma: f64,
    pub noise: NoiseModel,
    pub architecture: ArchitectureConfig,
    pub training: TrainConfig,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![100, 400, 1600],
            reps: 3,
            sigma: 1e-3,
            noise: NoiseModel::White,
            architecture: ArchitectureConfig { c_l: 1.0, c_p: 1.0, c_s: 4.0, ..Default::default() },
            training: TrainConfig::default(),
            mc_samples: 400,
            seed: 0,
        }
    }
}

/// Seeds of one study cell, derived from the study seed and the cell index.
fn cell_seeds(seed: u64, cell: usize) -> (u64, u64) {
    let mut rng = stream_rng(seed, cell as u64);
    (rng.random(), rng.random())
}

/// For each `n` and replication: a fresh dataset, training in the class of
/// budget `N(n) = ceil(n^{1/(kappa+1)})`, and the `L2(gamma)` error on a
/// shared test set.
pub fn rate_study(problem: &DarcyProblem, cfg: &StudyConfig, kappa: f64) -> Result<RateStudy> {
    check_grid(&cfg.n_grid)?;
    if cfg.reps == 0 {
        return Err(Error::input("replications must be at least 1"));
    }
    if !(kappa > 0.0) {
        return Err(Error::input("kappa must be positive"));
    }
    let truth = FnPredictor(|x: &[f64]| problem.operator(x));
    let frame = &problem.x_basis.frame;
    let test = TestSet::draw(&truth, &problem.scaling, frame, cfg.mc_samples, cfg.seed ^ 0x7e57)?;
    let cells: Vec<(usize, usize, usize)> = cfg
        .n_grid
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| (0..cfg.reps).map(move |rep| (k * cfg.reps + rep, n, rep)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(cell, n, rep)| {
            let (data_seed, train_seed) = cell_seeds(cfg.seed, cell);
            let big_n = budget_schedule(n, kappa);
            let data = problem.generate_dataset(n, cfg.sigma, cfg.noise, data_seed)?;
            let train = TrainConfig { seed: train_seed, ..cfg.training.clone() };
            let fit = train_erm(
                &cfg.architecture,
                big_n,
                &data,
                &train,
                frame,
                &problem.scaling,
                &problem.y_basis.frame,
            )?;
            let (mse, se) = test.error(&fit.model)?;
            Ok(StudyRow { n, big_n, rep, mse, se })
        })
        .collect::<Result<Vec<_>>>()?;
    RateStudy::from_rows(kappa, rows)
}

/// Error of the constructive surrogate for one budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrogatePoint {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub rho: f64,
    pub terms: usize,
    pub size: usize,
    pub mse: f64,
    pub se: f64,
}

/// Settings of the constructive surrogate study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurrogateStudyConfig {
    pub budgets: Vec<usize>,
    /// Anisotropy exponent of the Legendre index set.
    pub g: f64,
    pub coefficient_samples: usize,
    /// Output decay exponent entering the accuracy schedule.
    pub t: f64,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for SurrogateStudyConfig {
    fn default() -> Self {
        Self { budgets: vec![4, 8, 16], g: 1.0, coefficient_samples: 4000, t: 1.0, mc_samples: 400, seed: 0 }
    }
}

/// Builds constructive ReLU surrogates of increasing budget `N` for the
/// Darcy operator and measures their `L2(gamma)` error.
///
/// Legendre coefficients over the first `max N` indices of the anisotropic
/// set are estimated once; budget `N` keeps the first `N` indices and
/// allocates `N` output modes among them.
pub fn surrogate_study(problem: &DarcyProblem, cfg: &SurrogateStudyConfig) -> Result<Vec<SurrogatePoint>> {
    check_grid(&cfg.budgets)?;
    let dim = problem.input_modes();
    let max_n = *cfg.budgets.last().expect("nonempty budgets");
    let mut level = 1.0;
    let mut lambda = MultiIndexSet::anisotropic(dim, cfg.g, level);
    while lambda.len() < max_n {
        level += 1.0;
        lambda = MultiIndexSet::anisotropic(dim, cfg.g, level);
    }
    let lambda = lambda.truncate(max_n);
    let table = estimate_legendre_coeffs(
        |u: &[f64]| problem.operator_cube(u),
        &lambda,
        dim,
        problem.output_modes(),
        Quadrature::MonteCarlo { samples: cfg.coefficient_samples, seed: cfg.seed },
    )?;
    let truth = FnPredictor(|x: &[f64]| problem.operator(x));
    let frame = &problem.x_basis.frame;
    let test = TestSet::draw(&truth, &problem.scaling, frame, cfg.mc_samples, cfg.seed ^ 0x5u64)?;
    cfg.budgets
        .iter()
        .map(|&big_n| {
            let rows: Vec<Vec<f64>> = table.c[..big_n].to_vec();
            let sub = crate::framenet::CoefficientTable::new(lambda.truncate(big_n), rows)?;
            let alloc = allocate_truncations(&sub.c, &sub.weights(), big_n)?;
            let rho = rho_schedule(big_n, problem.scaling.r, cfg.t);
            let (model, report) = build_constructive_surrogate(
                &sub,
                &alloc.m,
                rho,
                Activation::Relu,
                frame.clone(),
                problem.scaling.clone(),
                problem.y_basis.frame.clone(),
            )?;
            let (mse, se) = test.error(&model)?;
            Ok(SurrogatePoint { big_n, rho, terms: report.terms, size: report.metrics.size, mse, se })
        })
        .collect()
}
