use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::nn::NeuralNet;
use crate::rng::seeded;

/// Floor used when checking constructions that are exact in real arithmetic.
pub const EXACT_TOLERANCE: f64 = 1e-10;

/// A constructed network together with its sup-error certificate on
/// `[-D, D]^{input_dim}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedNet {
    pub net: NeuralNet,
    pub certified_sup_error: f64,
    pub domain_bound: f64,
    /// Construction parameters such as internal budgets and level bounds.
    #[serde(default)]
    pub notes: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_names: Option<Vec<String>>,
}

/// Outcome of comparing a certified network with a reference on a point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub points: usize,
    pub max_error: f64,
    pub worst_point: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl CertifiedNet {
    pub fn new(net: NeuralNet, certified_sup_error: f64, domain_bound: f64) -> Self {
        Self { net, certified_sup_error, domain_bound, notes: Vec::new(), output_names: None }
    }

    pub fn note(&self, key: &str) -> Option<f64> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.net.eval(x)
    }

    /// Tolerance used during verification: the certificate, or
    /// [`EXACT_TOLERANCE`] for exact constructions.
    pub fn tolerance(&self) -> f64 {
        self.certified_sup_error.max(EXACT_TOLERANCE)
    }

    /// Default verification set: a 201-point tensor grid per dimension up to
    /// three inputs, otherwise 10^4 uniform points plus all cube corners.
    pub fn default_points(&self, seed: u64) -> Vec<Vec<f64>> {
        let dim = self.net.input_dim();
        let d = self.domain_bound;
        if dim <= 3 {
            grid_points(dim, 201, d)
        } else {
            let mut pts = mc_points(dim, 10_000, d, seed);
            if dim <= 16 {
                pts.extend(cube_corners(dim, d));
            }
            pts
        }
    }

    /// Sup of `|net - reference|` over `points`, compared with the certificate.
    pub fn verify<F>(&self, points: &[Vec<f64>], reference: F) -> Result<VerifyReport>
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync,
    {
        let out_dim = self.net.output_dim();
        let errs = points
            .par_iter()
            .map(|p| {
                let got = self.net.eval(p)?;
                let want = reference(p);
                check_dim(out_dim, want.len())?;
                Ok(got.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (idx, max_error) = errs
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bm), (i, e)| if e > bm || e.is_nan() { (i, e) } else { (bi, bm) });
        let tolerance = self.tolerance();
        Ok(VerifyReport {
            points: points.len(),
            max_error,
            worst_point: points.get(idx).cloned().unwrap_or_default(),
            tolerance,
            passed: max_error <= tolerance,
        })
    }

    /// Like [`CertifiedNet::verify`] but fails with a verification error.
    pub fn verify_or_err<F>(&self, points: &[Vec<f64>], reference: F) -> Result<VerifyReport>
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync,
    {
        let r = self.verify(points, reference)?;
        if r.passed {
            Ok(r)
        } else {
            Err(Error::Verification(format!(
                "max error {:.3e} exceeds {:.3e} at {:?}",
                r.max_error, r.tolerance, r.worst_point
            )))
        }
    }
}

/// Tensor grid with `per_dim` equispaced points on `[-d, d]` in each coordinate.
pub fn grid_points(dim: usize, per_dim: usize, d: f64) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = if per_dim <= 1 {
        vec![0.0]
    } else {
        (0..per_dim).map(|i| -d + 2.0 * d * i as f64 / (per_dim - 1) as f64).collect()
    };
    let mut pts = vec![Vec::with_capacity(dim)];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    pts
}

/// Uniform points on `[-d, d]^dim`.
pub fn mc_points(dim: usize, n: usize, d: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(-d..=d)).collect()).collect()
}

/// All `2^dim` vertices of `[-d, d]^dim`.
pub fn cube_corners(dim: usize, d: f64) -> Vec<Vec<f64>> {
    (0..1u64 << dim)
        .map(|mask| (0..dim).map(|k| if mask >> k & 1 == 1 { d } else { -d }).collect())
        .collect()
}

/// Largest absolute difference between two functions on a point set.
pub fn sup_error<F, G>(points: &[Vec<f64>], f: F, g: G) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    points.par_iter().map(|p| (f(p) - g(p)).abs()).reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{identity_net, Activation};

    #[test]
    fn point_sets() {
        assert_eq!(grid_points(2, 3, 1.0).len(), 9);
        assert_eq!(grid_points(2, 3, 1.0)[4], vec![0.0, 0.0]);
        assert_eq!(cube_corners(3, 2.0).len(), 8);
        assert!(mc_points(4, 50, 0.5, 1).iter().flatten().all(|v| v.abs() <= 0.5));
    }

    #[test]
    fn verification_and_roundtrip() {
        let c = CertifiedNet::new(identity_net(2, 2, Activation::Relu).unwrap(), 0.0, 1.0);
        let r = c.verify(&grid_points(2, 11, 1.0), |p| p.to_vec()).unwrap();
        assert!(r.passed && r.max_error < 1e-14);
        let bad = c.verify(&grid_points(2, 5, 1.0), |p| vec![p[0] + 1.0, p[1]]).unwrap();
        assert!(!bad.passed);
        let json = serde_json::to_string(&c).unwrap();
        let back: CertifiedNet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
