use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::hilbert::{Frame, SmoothnessWeights};

/// One-dimensional real Fourier basis on the unit circle.
///
/// Index 0 is the constant, odd indices `2k-1` are `sqrt(2) sin(2 pi k x)` and
/// even indices `2k` are `sqrt(2) cos(2 pi k x)`.
pub fn xi_1d(j: usize, x: f64) -> f64 {
    if j == 0 {
        1.0
    } else if j.is_multiple_of(2) {
        SQRT_2 * (2.0 * PI * (j / 2) as f64 * x).cos()
    } else {
        SQRT_2 * (2.0 * PI * j.div_ceil(2) as f64 * x).sin()
    }
}

/// Truncated tensor sine/cosine basis of a Sobolev space on the d-torus.
///
/// Modes are all multi-indices with Euclidean norm at most `cutoff`, ordered
/// by nondecreasing norm and lexicographically within a shell. In the basis's
/// own coefficients the frame is the identity; `shift` rescales each mode so
/// that it is orthonormal in the shifted Sobolev norm.
#[derive(Clone, Debug)]
pub struct TorusBasis {
    pub d: usize,
    pub cutoff: usize,
    pub shift: f64,
    pub modes: Vec<Vec<usize>>,
    pub frame: Frame,
    pub theta: SmoothnessWeights,
}

pub fn torus_basis(d: usize, cutoff: usize, shift: f64) -> Result<TorusBasis> {
    if d == 0 {
        return Err(Error::input("torus dimension must be at least 1"));
    }
    if cutoff < 1 {
        return Err(Error::input("torus cutoff must be at least 1"));
    }
    if !(shift >= 0.0) {
        return Err(Error::input("Sobolev shift must be nonnegative"));
    }
    let mut modes = Vec::new();
    let mut idx = vec![0usize; d];
    let limit = (cutoff * cutoff) as f64 + 1e-9;
    loop {
        let sq: usize = idx.iter().map(|j| j * j).sum();
        if (sq as f64) <= limit {
            modes.push(idx.clone());
        }
        let mut k = d;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            if idx[k] < cutoff {
                idx[k] += 1;
                break;
            }
            idx[k] = 0;
        }
        if idx.iter().all(|&j| j == 0) {
            break;
        }
    }
    modes.sort_by(|a, b| {
        let na: usize = a.iter().map(|j| j * j).sum();
        let nb: usize = b.iter().map(|j| j * j).sum();
        na.cmp(&nb).then_with(|| a.cmp(b))
    });
    let theta = modes.iter().map(|j| mode_norm(j).max(1.0).powi(-(d as i32))).collect();
    let theta = SmoothnessWeights::new(theta)?;
    let frame = Frame::identity(modes.len()).with_enumeration(modes.clone())?;
    Ok(TorusBasis { d, cutoff, shift, modes, frame, theta })
}

fn mode_norm(j: &[usize]) -> f64 {
    (j.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt()
}

impl TorusBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Factor `max{1,|j|}^{-shift}` turning the L2-normalized mode into the
    /// shifted-space basis element.
    pub fn weight(&self, k: usize) -> f64 {
        mode_norm(&self.modes[k]).max(1.0).powf(-self.shift)
    }

    /// Largest 1-D index appearing in any retained mode.
    pub fn max_index(&self) -> usize {
        self.modes.iter().flat_map(|m| m.iter().copied()).max().unwrap_or(0)
    }

    /// L2-normalized mode `k` evaluated at a point of the unit cube.
    pub fn xi(&self, k: usize, x: &[f64]) -> f64 {
        self.modes[k].iter().zip(x).map(|(&j, &xi)| xi_1d(j, xi)).product()
    }

    /// Shifted-space basis element `k` evaluated at a point.
    pub fn psi(&self, k: usize, x: &[f64]) -> f64 {
        self.weight(k) * self.xi(k, x)
    }

    /// Sup norm of basis element `k` over the torus.
    pub fn psi_sup_norm(&self, k: usize) -> f64 {
        let nonzero = self.modes[k].iter().filter(|&&j| j != 0).count();
        self.weight(k) * SQRT_2.powi(nonzero as i32)
    }

    /// Restriction to the first `k` modes.
    pub fn truncate(&self, k: usize) -> Result<TorusBasis> {
        if k == 0 || k > self.len() {
            return Err(Error::input(format!("truncation {k} outside 1..={}", self.len())));
        }
        let modes: Vec<Vec<usize>> = self.modes[..k].to_vec();
        Ok(TorusBasis {
            d: self.d,
            cutoff: self.cutoff,
            shift: self.shift,
            frame: Frame::identity(k).with_enumeration(modes.clone())?,
            theta: SmoothnessWeights::new(self.theta.values()[..k].to_vec())?,
            modes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_ordering() {
        let b = torus_basis(1, 2, 0.0).unwrap();
        assert_eq!(b.modes, vec![vec![0], vec![1], vec![2]]);
        let x = 0.3;
        assert_eq!(b.xi(0, &[x]), 1.0);
        assert!((b.xi(2, &[x]) - SQRT_2 * (2.0 * PI * x).cos()).abs() < 1e-15);
        assert!((b.xi(1, &[x]) - SQRT_2 * (2.0 * PI * x).sin()).abs() < 1e-15);
        assert_eq!(b.theta.values()[0], 1.0);
    }

    #[test]
    fn discrete_orthonormality_on_grid() {
        let b = torus_basis(1, 12, 0.0).unwrap();
        let n = 64;
        for a in 0..b.len() {
            for c in 0..b.len() {
                let ip: f64 = (0..n)
                    .map(|i| {
                        let x = [i as f64 / n as f64];
                        b.xi(a, &x) * b.xi(c, &x)
                    })
                    .sum::<f64>()
                    / n as f64;
                let expect = if a == c { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-12, "modes {a},{c}: {ip}");
            }
        }
    }

    #[test]
    fn two_dimensional_enumeration_is_shell_ordered() {
        let b = torus_basis(2, 4, 1.0).unwrap();
        assert_eq!(&b.modes[..4], &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(b.modes[11], vec![1, 3]);
        assert_eq!(b.modes[12], vec![3, 1]);
        for w in b.theta.values().windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!((b.weight(3) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn theta_decays_like_inverse_index() {
        let b = torus_basis(2, 20, 0.0).unwrap();
        let ratios: Vec<f64> =
            b.theta.values().iter().enumerate().skip(1).map(|(i, t)| t * (i + 1) as f64).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        assert!(hi / lo < 8.0, "ratio spread {lo}..{hi}");
    }
}
