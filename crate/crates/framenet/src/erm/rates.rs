use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framenet::{entropy_bound, EntropyInputs};
use crate::nn::Activation;

/// Approximation exponent `kappa` of the operator-learning rate.
///
/// With a Riesz basis on the input side and a product measure the rate is
/// `2 min(r - 1/2, t)`, otherwise `2 min(r - 1, t)`.
pub fn kappa_general(r: f64, t: f64, riesz_and_product_measure: bool) -> Result<f64> {
    if !(r > 1.0) || !(t > 0.0) || !r.is_finite() || !t.is_finite() {
        return Err(Error::input(format!("need r > 1 and t > 0, got r = {r}, t = {t}")));
    }
    let shift = if riesz_and_product_measure { 0.5 } else { 1.0 };
    Ok(2.0 * (r - shift).min(t))
}

/// Which approximation bound drives the torus rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusPipeline {
    /// Mean-square approximation of the holomorphic coefficient map.
    #[default]
    L2,
    /// Uniform approximation, valid for inputs supported in the smoothness ball.
    Uniform,
}

/// Input smoothness `r0`, scaling exponent `r`, and the rate exponents for
/// learning the Darcy solution operator on the d-torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusRate {
    pub r0: f64,
    pub r: f64,
    pub kappa: f64,
    /// `kappa / (kappa + 1)`, the exponent of `n` in the mean-square error.
    pub rate: f64,
    /// Whether the smoothness fell in the upper branch.
    pub high_smoothness: bool,
}

/// Rate for coefficient smoothness `s`, output shift `t0` and the small
/// offset `tau2` added to the critical input smoothness `d/2`.
pub fn torus_rate(s: f64, d: usize, t0: f64, tau2: f64, pipeline: TorusPipeline) -> Result<TorusRate> {
    if d < 2 {
        return Err(Error::input("the torus rate requires dimension at least 2"));
    }
    if !(0.0..=1.0).contains(&t0) {
        return Err(Error::input(format!("output shift must lie in [0, 1], got {t0}")));
    }
    let df = d as f64;
    if !(s > 1.5 * df) {
        return Err(Error::input(format!("smoothness {s} must exceed 3d/2 = {}", 1.5 * df)));
    }
    if !(tau2 > 0.0) || !(tau2 < s - 1.5 * df) {
        return Err(Error::input(format!("tau2 must lie in (0, {}), got {tau2}", s - 1.5 * df)));
    }
    let (r0, kappa, high) = match pipeline {
        TorusPipeline::L2 => {
            if s <= 2.0 * df + 1.0 - t0 {
                (df / 2.0 + tau2, 2.0 * (s / df - 1.0).min((1.0 - t0) / df), false)
            } else {
                ((s + t0 - 1.0) / 2.0, (s + 1.0 - t0) / df - 1.0, true)
            }
        }
        TorusPipeline::Uniform => {
            if s <= 1.5 * df + 1.0 - t0 {
                (df / 2.0 + tau2, 2.0 * s / df - 3.0, false)
            } else {
                ((s + t0 - df / 2.0 - 1.0) / 2.0, (s + 1.0 - t0) / df - 1.5, true)
            }
        }
    };
    Ok(TorusRate { r0, r: (s - r0) / df, kappa, rate: kappa / (kappa + 1.0), high_smoothness: high })
}

/// The critical-radius condition whose smallest solution is `delta_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaRegime {
    /// White noise with entropy integral `sqrt(N) delta (1 + log(1/delta))`
    /// of an `N`-parameter class.
    Chaining,
    /// White noise with entropy `delta^{-alpha}`, `0 < alpha < 2`.
    EntropyPower { alpha: f64 },
    /// White noise with the entropy integral of a network class, computed
    /// from the network entropy bound.
    EntropyCount { inputs: EntropyInputs, frame_upper: f64, activation: Activation },
    /// Sub-Gaussian noise without chaining: `n delta^4 >= C^2 sigma^2 F^2
    /// H(delta^2 / (8 sigma^2 + delta^2))` with `H(rho) = N (1 + log(1/rho))`.
    SubgaussianNoChaining { f_inf: f64 },
}

fn log_plus_inv(x: f64) -> f64 {
    (1.0 / x).ln().max(0.0)
}

/// `int_0^delta sqrt(H(rho)) d rho` for `H(rho) = a + b log+(1/rho)`, by the
/// substitution `rho = delta e^{-t}` and composite Simpson on `t` in `[0, 60]`.
fn log_entropy_integral(delta: f64, h: impl Fn(f64) -> f64) -> f64 {
    let steps = 600;
    let t_max = 60.0;
    let dt = t_max / steps as f64;
    let g = |t: f64| {
        let rho = delta * (-t).exp();
        rho * h(rho).max(0.0).sqrt()
    };
    let mut acc = g(0.0) + g(t_max);
    for i in 1..steps {
        acc += g(i as f64 * dt) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * dt / 3.0
}

fn bisect_increasing(f: impl Fn(f64) -> f64) -> f64 {
    let mut lo = 1e-300f64;
    if f(lo) >= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0f64;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi.max(1e-300) {
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Smallest `delta > 0` satisfying the selected critical-radius condition for
/// `n` samples, an `n_params`-parameter class, noise level `sigma` and the
/// universal constant `c`.
pub fn predict_delta_n(n_params: usize, n: usize, sigma: f64, c: f64, regime: DeltaRegime) -> Result<f64> {
    if n_params == 0 || n == 0 {
        return Err(Error::input("sample count and parameter count must be positive"));
    }
    if !(sigma >= 0.0) || !(c >= 0.0) {
        return Err(Error::input("noise level and constant must be nonnegative"));
    }
    let nf = n as f64;
    let big_n = n_params as f64;
    let scale = c * sigma;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let delta = match regime {
        DeltaRegime::Chaining => {
            bisect_increasing(|d| nf.sqrt() * d - scale * big_n.sqrt() * (1.0 + log_plus_inv(d)))
        }
        DeltaRegime::EntropyPower { alpha } => {
            if !(alpha > 0.0 && alpha < 2.0) {
                return Err(Error::input(format!("entropy exponent must lie in (0, 2), got {alpha}")));
            }
            let e = 1.0 - alpha / 2.0;
            bisect_increasing(|d| nf.sqrt() - scale * d.powf(e) / e / (d * d))
        }
        DeltaRegime::EntropyCount { inputs, frame_upper, activation } => {
            let h = |rho: f64| entropy_bound(inputs, frame_upper, rho, activation);
            bisect_increasing(|d| nf.sqrt() - scale * log_entropy_integral(d, h) / (d * d))
        }
        DeltaRegime::SubgaussianNoChaining { f_inf } => {
            if !(f_inf > 0.0) {
                return Err(Error::input("output bound must be positive"));
            }
            let h = |rho: f64| big_n * (1.0 + log_plus_inv(rho));
            bisect_increasing(|d| {
                let d2 = d * d;
                nf - (scale * f_inf).powi(2) * h(d2 / (8.0 * sigma * sigma + d2)) / (d2 * d2)
            })
        }
    };
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_branches() {
        assert_eq!(kappa_general(2.0, 1.0, true).unwrap(), 2.0);
        assert_eq!(kappa_general(2.0, 1.0, false).unwrap(), 2.0);
        assert!((kappa_general(1.25, 3.0, true).unwrap() - 1.5).abs() < 1e-15);
        assert!(kappa_general(1.0, 1.0, true).is_err());
    }

    #[test]
    fn torus_examples() {
        let a = torus_rate(4.0, 2, 0.0, 0.25, TorusPipeline::L2).unwrap();
        assert_eq!((a.r0, a.kappa, a.rate), (1.25, 1.0, 0.5));
        assert_eq!(a.r, 1.375);
        let b = torus_rate(8.0, 2, 0.0, 0.25, TorusPipeline::L2).unwrap();
        assert_eq!((b.r0, b.kappa), (3.5, 3.5));
        assert!((b.rate - 7.0 / 9.0).abs() < 1e-15);
        let c = torus_rate(5.0, 3, 0.0, 0.25, TorusPipeline::L2).unwrap();
        assert!((c.kappa - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.rate - 0.4).abs() < 1e-15);
        assert!(torus_rate(3.0, 2, 0.0, 0.1, TorusPipeline::L2).is_err());
        let u = torus_rate(3.5, 2, 0.0, 0.25, TorusPipeline::Uniform).unwrap();
        assert_eq!((u.r0, u.kappa), (1.25, 0.5));
    }

    #[test]
    fn chaining_example() {
        let d = predict_delta_n(10, 1000, 1.0, 1.0, DeltaRegime::Chaining).unwrap();
        assert!((d - 0.242).abs() < 1e-3, "{d}");
        let d4 = predict_delta_n(10, 4000, 1.0, 1.0, DeltaRegime::Chaining).unwrap();
        assert!((d4 - 0.1461).abs() < 1e-3, "{d4}");
        let big = predict_delta_n(10, 1_000_000_000_000, 1.0, 1.0, DeltaRegime::Chaining).unwrap();
        let big4 = predict_delta_n(10, 4_000_000_000_000, 1.0, 1.0, DeltaRegime::Chaining).unwrap();
        let ratio = big4 / big;
        assert!(ratio > 0.45 && ratio < 0.55, "{ratio}");
    }

    #[test]
    fn power_regime_is_exact() {
        let alpha = 1.0;
        let d1 = predict_delta_n(1, 100, 1.0, 1.0, DeltaRegime::EntropyPower { alpha }).unwrap();
        let d2 = predict_delta_n(1, 10_000, 1.0, 1.0, DeltaRegime::EntropyPower { alpha }).unwrap();
        let slope = (d2 * d2 / (d1 * d1)).ln() / 100f64.ln();
        assert!((slope + 2.0 / (2.0 + alpha)).abs() < 1e-9);
    }

    #[test]
    fn other_regimes_decrease() {
        let inputs = EntropyInputs { depth: 3, width: 8, size: 40, m: 1.0 };
        let regime = DeltaRegime::EntropyCount { inputs, frame_upper: 1.0, activation: Activation::Relu };
        let a = predict_delta_n(1, 1000, 1.0, 1.0, regime).unwrap();
        let b = predict_delta_n(1, 100_000, 1.0, 1.0, regime).unwrap();
        assert!(b < a);
        let sg = DeltaRegime::SubgaussianNoChaining { f_inf: 1.0 };
        let a = predict_delta_n(10, 1000, 1.0, 1.0, sg).unwrap();
        let b = predict_delta_n(10, 100_000, 1.0, 1.0, sg).unwrap();
        assert!(b < a);
        assert_eq!(predict_delta_n(10, 10, 0.0, 1.0, DeltaRegime::Chaining).unwrap(), 0.0);
    }
}
