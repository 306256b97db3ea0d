use std::fs::{self, File};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::darcy::DarcyProblem;
use crate::error::{check_dim, Error, Result};
use crate::rng::stream_rng;

/// Distribution of the observation noise on the retained output modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// Independent standard normals on each retained orthonormal mode.
    White,
    /// Uniform on the unit ball of the retained modes.
    Subgaussian,
}

/// One noise vector of length `j`.
pub fn noise_vector<R: Rng + ?Sized>(model: NoiseModel, j: usize, rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = (0..j).map(|_| rng.sample(StandardNormal)).collect();
    match model {
        NoiseModel::White => g,
        NoiseModel::Subgaussian => {
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let radius = rng.random::<f64>().powf(1.0 / j as f64);
            if norm == 0.0 {
                return vec![0.0; j];
            }
            g.into_iter().map(|v| v * radius / norm).collect()
        }
    }
}

/// Descriptive metadata stored next to a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub samples: usize,
    pub input_modes: usize,
    pub output_modes: usize,
    pub sigma: f64,
    pub noise_model: NoiseModel,
    pub seed: u64,
    /// Extra description of how the design and outputs were produced.
    #[serde(default)]
    pub source: serde_json::Value,
}

/// Noisy regression data `y_i = G(x_i) + sigma e_i` in coefficient form.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub design: Vec<Vec<f64>>,
    pub obs: Vec<Vec<f64>>,
    /// Noise-free outputs, when known.
    pub truth: Option<Vec<Vec<f64>>>,
    pub noise_model: NoiseModel,
    pub sigma: f64,
    pub seed: u64,
    pub source: serde_json::Value,
}

impl Dataset {
    pub fn new(design: Vec<Vec<f64>>, obs: Vec<Vec<f64>>, noise_model: NoiseModel, sigma: f64, seed: u64) -> Result<Self> {
        check_dim(design.len(), obs.len())?;
        if design.is_empty() {
            return Err(Error::input("dataset must contain at least one sample"));
        }
        for (rows, what) in [(&design, "design"), (&obs, "observation")] {
            let width = rows[0].len();
            if width == 0 {
                return Err(Error::input(format!("{what} vectors must be nonempty")));
            }
            for row in rows.iter() {
                check_dim(width, row.len())?;
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::input(format!("{what} values must be finite")));
                }
            }
        }
        if !(sigma >= 0.0) {
            return Err(Error::input("noise level must be nonnegative"));
        }
        Ok(Self { design, obs, truth: None, noise_model, sigma, seed, source: serde_json::Value::Null })
    }

    pub fn with_truth(mut self, truth: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(self.len(), truth.len())?;
        for row in &truth {
            check_dim(self.output_modes(), row.len())?;
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.design.len()
    }

    pub fn is_empty(&self) -> bool {
        self.design.is_empty()
    }

    pub fn input_modes(&self) -> usize {
        self.design[0].len()
    }

    pub fn output_modes(&self) -> usize {
        self.obs[0].len()
    }

    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            samples: self.len(),
            input_modes: self.input_modes(),
            output_modes: self.output_modes(),
            sigma: self.sigma,
            noise_model: self.noise_model,
            seed: self.seed,
            source: self.source.clone(),
        }
    }

    /// Writes `meta.json`, `design.csv`, `obs.csv` and, if known, `truth.csv`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        serde_json::to_writer_pretty(File::create(dir.join("meta.json"))?, &self.meta())?;
        write_rows(&dir.join("design.csv"), "x", &self.design)?;
        write_rows(&dir.join("obs.csv"), "y", &self.obs)?;
        if let Some(truth) = &self.truth {
            write_rows(&dir.join("truth.csv"), "g", truth)?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let file = File::open(dir.join("meta.json"))?;
        let meta: DatasetMeta = serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_reader(file))
            .map_err(|e| Error::input(format!("meta.json: {e}")))?;
        let design = read_rows(&dir.join("design.csv"))?;
        let obs = read_rows(&dir.join("obs.csv"))?;
        check_dim(meta.samples, design.len())?;
        let mut ds = Dataset::new(design, obs, meta.noise_model, meta.sigma, meta.seed)?;
        check_dim(meta.input_modes, ds.input_modes())?;
        check_dim(meta.output_modes, ds.output_modes())?;
        ds.source = meta.source;
        let truth_path = dir.join("truth.csv");
        if truth_path.exists() {
            ds = ds.with_truth(read_rows(&truth_path)?)?;
        }
        Ok(ds)
    }
}

fn write_rows(path: &Path, prefix: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let width = rows.first().map_or(0, Vec::len);
    w.write_record((0..width).map(|j| format!("{prefix}{j}")))?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::input(format!("{}: row {i}: {e}", path.display()))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

impl DarcyProblem {
    /// Draws `n` inputs from the pushforward of the uniform cube measure,
    /// solves for each, and adds `sigma` times noise on the retained output
    /// modes. Sample `i` uses its own random stream, design before noise.
    pub fn generate_dataset(&self, n: usize, sigma: f64, noise_model: NoiseModel, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::input("sample count must be positive"));
        }
        if !(sigma >= 0.0) {
            return Err(Error::input("noise level must be nonnegative"));
        }
        let j = self.output_modes();
        let rows: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, i as u64);
                let (_, x) = self.sample_input(&mut rng)?;
                let truth = self.operator(&x).map_err(|e| match e {
                    Error::Coercivity(m) => Error::Coercivity(format!("sample {i}: {m}")),
                    Error::Solver(m) => Error::Solver(format!("sample {i}: {m}")),
                    other => other,
                })?;
                let e = noise_vector(noise_model, j, &mut rng);
                let y = truth.iter().zip(&e).map(|(t, e)| t + sigma * e).collect();
                Ok((x, y, truth))
            })
            .collect::<Result<_>>()?;
        let mut design = Vec::with_capacity(n);
        let mut obs = Vec::with_capacity(n);
        let mut truth = Vec::with_capacity(n);
        for (x, y, t) in rows {
            design.push(x);
            obs.push(y);
            truth.push(t);
        }
        let mut ds = Dataset::new(design, obs, noise_model, sigma, seed)?.with_truth(truth)?;
        ds.source = serde_json::json!({
            "kind": "darcy_torus",
            "d": self.grid.d,
            "n_per_dim": self.grid.n,
            "input_shift": self.x_basis.shift,
            "output_shift": self.y_basis.shift,
            "input_modes": self.x_basis.modes,
            "output_modes": self.y_basis.modes,
            "radius": self.scaling.radius,
            "r": self.scaling.r,
            "a_min": self.a_min,
        });
        Ok(ds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darcy::DarcyConfig;
    use crate::rng::seeded;

    fn small() -> DarcyProblem {
        DarcyConfig { n_per_dim: 16, input_modes: 5, output_modes: 5, ..Default::default() }.build().unwrap()
    }

    #[test]
    fn noiseless_matches_truth_and_is_deterministic() {
        let p = small();
        let a = p.generate_dataset(4, 0.0, NoiseModel::White, 11).unwrap();
        assert_eq!(&a.obs, a.truth.as_ref().unwrap());
        let b = p.generate_dataset(4, 0.0, NoiseModel::White, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn white_noise_variance() {
        let mut rng = seeded(5);
        let sigma = 0.3;
        let draws: Vec<f64> = (0..10_000).map(|_| sigma * noise_vector(NoiseModel::White, 1, &mut rng)[0]).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.05);
    }

    #[test]
    fn subgaussian_in_unit_ball() {
        let mut rng = seeded(9);
        for _ in 0..1000 {
            let e = noise_vector(NoiseModel::Subgaussian, 6, &mut rng);
            assert!(e.iter().map(|v| v * v).sum::<f64>() <= 1.0);
        }
    }

    #[test]
    fn save_load_roundtrip() {
        let p = small();
        let ds = p.generate_dataset(3, 0.1, NoiseModel::Subgaussian, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        ds.save(dir.path()).unwrap();
        let back = Dataset::load(dir.path()).unwrap();
        assert_eq!(ds, back);
    }
}
