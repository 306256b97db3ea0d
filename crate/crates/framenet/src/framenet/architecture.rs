use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Activation, NeuralNet};

/// Sparse networks carry a size budget; fully connected ones only depth and width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sparse,
    FullyConnected,
}

/// Constants of the architecture schedule in the budget `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArchitectureConfig {
    pub c_l: f64,
    pub c_p: f64,
    pub c_s: f64,
    /// Parameter bound `M`.
    pub m: f64,
    /// Range bound `B` checked on `[-1, 1]^{p_0}`.
    pub b: f64,
    pub activation: Activation,
    pub family: Family,
}

impl Default for ArchitectureConfig {
    fn default() -> Self {
        Self { c_l: 2.0, c_p: 4.0, c_s: 4.0, m: 1.0, b: 10.0, activation: Activation::Relu, family: Family::Sparse }
    }
}

impl ArchitectureConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_l", self.c_l), ("c_p", self.c_p), ("c_s", self.c_s), ("m", self.m), ("b", self.b)] {
            if !(v >= 1.0) || !v.is_finite() {
                return Err(Error::input(format!("architecture constant {name} must be a finite value >= 1, got {v}")));
            }
        }
        Ok(())
    }
}

/// Depth, width and size budget for a given `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub depth: usize,
    pub width: usize,
    pub size_budget: usize,
}

impl Architecture {
    /// Fully connected network with `depth` hidden layers of `width` neurons.
    pub fn dense_net(&self, input_dim: usize, output_dim: usize, act: Activation) -> Result<NeuralNet> {
        let mut dims = vec![input_dim];
        dims.extend(std::iter::repeat_n(self.width, self.depth));
        dims.push(output_dim);
        NeuralNet::zeros_dense(&dims, act)
    }
}

/// `depth = max(1, ceil(C_L ln N))`, `width = ceil(C_p N)` and
/// `size = ceil(C_s N)` for the sparse family, or
/// `(depth + 1)(width + width^2)` for the fully connected one.
pub fn make_architecture(cfg: &ArchitectureConfig, n: usize) -> Result<Architecture> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::input("budget N must be at least 1"));
    }
    let nf = n as f64;
    let depth = ((cfg.c_l * nf.ln()).ceil() as usize).max(1);
    let width = (cfg.c_p * nf).ceil() as usize;
    let size_budget = match cfg.family {
        Family::Sparse => (cfg.c_s * nf).ceil() as usize,
        Family::FullyConnected => (depth + 1) * (width + width * width),
    };
    Ok(Architecture { depth, width, size_budget })
}
