use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Frame;
use crate::rng::seeded;

/// Positive, nonincreasing weights indexed like the frame enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SmoothnessWeights {
    theta: Vec<f64>,
}

impl SmoothnessWeights {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::input("smoothness weights must be nonempty"));
        }
        if theta.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::input("smoothness weights must be positive and finite"));
        }
        if theta.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::input("smoothness weights must be nonincreasing"));
        }
        Ok(Self { theta })
    }

    /// Weights `j^{-p}` for `j = 1..=k`.
    pub fn algebraic(k: usize, p: f64) -> Result<Self> {
        Self::new((1..=k).map(|j| (j as f64).powf(-p)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Partial sums of `theta^{1+eps}`, used to eyeball summability.
    pub fn partial_sums(&self, eps: f64) -> Vec<f64> {
        let mut acc = 0.0;
        self.theta
            .iter()
            .map(|t| {
                acc += t.powf(1.0 + eps);
                acc
            })
            .collect()
    }
}

impl TryFrom<Vec<f64>> for SmoothnessWeights {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SmoothnessWeights> for Vec<f64> {
    fn from(w: SmoothnessWeights) -> Self {
        w.theta
    }
}

/// Output of the cube scaling together with whether any entry was clamped.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledCoefficients {
    pub values: Vec<f64>,
    pub clamped: bool,
}

/// The pair of maps between the unit cube and the weighted coefficient cube of
/// radius `radius` with exponent `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingMap {
    pub radius: f64,
    pub r: f64,
    pub theta: SmoothnessWeights,
}

impl ScalingMap {
    pub fn new(radius: f64, r: f64, theta: SmoothnessWeights) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::input("scaling radius must be positive"));
        }
        if !(r > 0.5) || !r.is_finite() {
            return Err(Error::input("scaling exponent must exceed 1/2"));
        }
        Ok(Self { radius, r, theta })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Half-widths `R theta_j^r` of the coefficient cube.
    pub fn half_widths(&self) -> Vec<f64> {
        self.theta.values().iter().map(|t| self.radius * t.powf(self.r)).collect()
    }

    fn check_len(&self, k: usize) -> Result<()> {
        if k > self.len() {
            return Err(Error::Dimension { expected: self.len(), got: k });
        }
        Ok(())
    }

    /// Coefficients `R theta_j^r u_j` for a point of the unit cube.
    pub fn unscale(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u.len())?;
        if let Some(j) = u.iter().position(|v| !(v.abs() <= 1.0)) {
            return Err(Error::input(format!("component {j} = {} lies outside [-1, 1]", u[j])));
        }
        Ok(u.iter().zip(self.half_widths()).map(|(v, h)| v * h).collect())
    }

    /// `sum_j R theta_j^r u_j psi_j` in reference coordinates.
    pub fn sigma(&self, frame: &Frame, u: &[f64]) -> Result<Vec<f64>> {
        let c = self.unscale(u)?;
        frame.synthesis(&c)
    }

    /// Divides each coefficient by `R theta_j^r`, clamping to `[-1, 1]`.
    pub fn scale(&self, c: &[f64]) -> Result<ScaledCoefficients> {
        self.check_len(c.len())?;
        let mut clamped = false;
        let values = c
            .iter()
            .zip(self.half_widths())
            .map(|(v, h)| {
                let s = v / h;
                if s.abs() > 1.0 {
                    clamped = true;
                    s.clamp(-1.0, 1.0)
                } else {
                    s
                }
            })
            .collect();
        Ok(ScaledCoefficients { values, clamped })
    }

    /// Whether every retained dual coefficient of `x` lies within the cube.
    pub fn in_cube(&self, x: &[f64], dual: &Frame) -> Result<bool> {
        let c = dual.analysis(x)?;
        let k = c.len().min(self.len());
        Ok(c[..k]
            .iter()
            .zip(self.half_widths())
            .all(|(v, h)| v.abs() <= h * (1.0 + 1e-12)))
    }

    /// Draws from the pushforward of the uniform cube measure, returning both
    /// the cube point and the element.
    pub fn sample_gamma_with<R: Rng + ?Sized>(&self, frame: &Frame, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.len().min(frame.len());
        let u = sample_uniform_cube(k, rng);
        let x = self.sigma(frame, &u)?;
        Ok((u, x))
    }

    pub fn sample_gamma(&self, frame: &Frame, seed: u64) -> Result<Vec<f64>> {
        let mut rng = seeded(seed);
        Ok(self.sample_gamma_with(frame, &mut rng)?.1)
    }
}

pub fn sample_uniform_cube<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Weighted norm `(sum_j <x, dual_j>^2 theta_j^{-2 exponent})^{1/2}` over the
/// retained modes.
pub fn smooth_norm(x: &[f64], exponent: f64, theta: &SmoothnessWeights, dual: &Frame) -> Result<f64> {
    let c = dual.analysis(x)?;
    let k = c.len().min(theta.len());
    Ok(c[..k]
        .iter()
        .zip(theta.values())
        .map(|(v, t)| v * v * t.powf(-2.0 * exponent))
        .sum::<f64>()
        .sqrt())
}
