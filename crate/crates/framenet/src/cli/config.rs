use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::darcy::{DarcyConfig, NoiseModel};
use crate::erm::{DeltaRegime, RegressionConfig, StudyConfig, SurrogateStudyConfig, TorusPipeline, TrainConfig};
use crate::error::{Error, Result};
use crate::framenet::ArchitectureConfig;

/// One `(s, d, t0)` triple for the rate table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateCase {
    pub s: f64,
    pub d: usize,
    pub t0: f64,
}

/// Critical radii `delta_n` of the chaining condition over a grid of `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeltaConfig {
    pub n_params: usize,
    pub n_grid: Vec<usize>,
    pub sigma: f64,
    pub c: f64,
    pub regime: DeltaRegime,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        Self {
            n_params: 10,
            n_grid: vec![100, 1_000, 10_000, 100_000, 1_000_000],
            sigma: 1.0,
            c: 1.0,
            regime: DeltaRegime::Chaining,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    pub cases: Vec<RateCase>,
    pub tau2: f64,
    pub pipeline: TorusPipeline,
    pub delta: DeltaConfig,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self {
            cases: vec![
                RateCase { s: 4.0, d: 2, t0: 0.0 },
                RateCase { s: 8.0, d: 2, t0: 0.0 },
                RateCase { s: 5.0, d: 3, t0: 0.0 },
            ],
            tau2: 0.25,
            pipeline: TorusPipeline::L2,
            delta: DeltaConfig::default(),
        }
    }
}

/// Which permeability perturbation a single solve uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveInput {
    /// No perturbation: the permeability is `abar`.
    Zero,
    /// One draw from the input measure.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub input: SolveInput,
    pub write_field: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { input: SolveInput::Random, write_field: true }
    }
}

/// Noisy dataset generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub samples: usize,
    pub sigma: f64,
    pub noise: NoiseModel,
    /// Existing dataset directory to load instead of generating one.
    pub dir: Option<PathBuf>,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { samples: 200, sigma: 1e-3, noise: NoiseModel::White, dir: None }
    }
}

/// Budget and evaluation settings of a single training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainBlock {
    /// Network budget `N`; defaults to `ceil(n^{1/(kappa+1)})`.
    pub budget: Option<usize>,
    pub mc_samples: usize,
}

impl Default for TrainBlock {
    fn default() -> Self {
        Self { budget: None, mc_samples: 400 }
    }
}

/// All blocks any command may read. Unused blocks are ignored by a command
/// but still validated on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub problem: DarcyConfig,
    pub rates: RatesConfig,
    pub solve: SolveConfig,
    pub data: DataConfig,
    pub architecture: ArchitectureConfig,
    pub training: TrainConfig,
    pub train: TrainBlock,
    pub study: StudyConfig,
    pub surrogate: SurrogateStudyConfig,
    pub regression: RegressionConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            problem: DarcyConfig::default(),
            rates: RatesConfig::default(),
            solve: SolveConfig::default(),
            data: DataConfig::default(),
            architecture: ArchitectureConfig { c_l: 1.0, c_p: 1.0, ..Default::default() },
            training: TrainConfig::default(),
            train: TrainBlock::default(),
            study: StudyConfig::default(),
            surrogate: SurrogateStudyConfig::default(),
            regression: RegressionConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Sets the top-level seed and every block seed derived from it.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.training.seed = seed;
        self.study.seed = seed;
        self.surrogate.seed = seed;
        self.regression.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.architecture.validate()?;
        self.training.validate()?;
        self.study.architecture.validate()?;
        self.study.training.validate()?;
        Ok(())
    }
}

/// Parses a config, reporting the path of the offending key on failure.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig =
        serde_path_to_error::deserialize(de).map_err(|e| Error::input(format!("config key `{}`: {}", e.path(), e.inner())))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
