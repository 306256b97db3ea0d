use serde::{Deserialize, Serialize};

use crate::nn::Activation;

/// Network class parameters entering the entropy bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyInputs {
    pub depth: usize,
    pub width: usize,
    pub size: usize,
    pub m: f64,
}

/// Logarithm of the argument of the entropy bound, i.e. the bound divided by `s + 1`.
///
/// ReLU: `ln(2^{L+6} Lambda L^2 M^{L+1} p^{L+4} max(1, 1/delta))`.
/// RePU(q): `ln(Lambda L q^{L+q} (2pM)^{4 q^{2L+2}} max(1, 1/delta))`.
pub fn log_entropy_argument(inp: EntropyInputs, frame_upper: f64, delta: f64, act: Activation) -> f64 {
    let l = inp.depth as f64;
    let p = inp.width as f64;
    let m = inp.m;
    let tail = frame_upper.ln() + (1.0 / delta).max(1.0).ln();
    match act {
        Activation::Relu => {
            (l + 6.0) * std::f64::consts::LN_2 + 2.0 * l.ln() + (l + 1.0) * m.ln() + (l + 4.0) * p.ln() + tail
        }
        Activation::Repu { q } => {
            let q = q as f64;
            l.ln() + (l + q) * q.ln() + 4.0 * q.powf(2.0 * l + 2.0) * (2.0 * p * m).ln() + tail
        }
    }
}

/// Upper bound on the metric entropy of the FrameNet class with the given
/// depth, width, size and parameter bound, in natural-log units.
pub fn entropy_bound(inp: EntropyInputs, frame_upper: f64, delta: f64, act: Activation) -> f64 {
    (inp.size as f64 + 1.0) * log_entropy_argument(inp, frame_upper, delta, act)
}
