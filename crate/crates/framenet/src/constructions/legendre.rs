use crate::constructions::{poly_net, CertifiedNet};
use crate::error::Result;
use crate::nn::Activation;

/// Legendre polynomial normalized so that `(1/2) int_{-1}^{1} L_j^2 = 1`,
/// evaluated with the three-term recurrence.
pub fn legendre_eval(j: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if j == 0 {
        return 1.0;
    }
    for n in 1..j {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * x * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (2.0 * j as f64 + 1.0).sqrt() * p1
}

/// Monomial coefficients `a_0, ..., a_j` of the normalized Legendre polynomial.
pub fn legendre_monomial_coeffs(j: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    let mut cur = vec![0.0, 1.0];
    if j == 0 {
        return prev;
    }
    for n in 1..j {
        let nf = n as f64;
        let mut next = vec![0.0; n + 2];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += (2.0 * nf + 1.0) * c / (nf + 1.0);
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= nf * c / (nf + 1.0);
        }
        prev = cur;
        cur = next;
    }
    let s = (2.0 * j as f64 + 1.0).sqrt();
    cur.iter().map(|c| c * s).collect()
}

/// Network for the normalized Legendre polynomial of degree `j` on `[-1, 1]`.
pub fn legendre_net(j: usize, delta: f64, act: Activation) -> Result<CertifiedNet> {
    let mut c = poly_net(&legendre_monomial_coeffs(j), delta, 1.0, act)?;
    c.notes.push(("degree".into(), j as f64));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(legendre_eval(0, 0.3), 1.0);
        assert!((legendre_eval(1, 1.0) - 3f64.sqrt()).abs() < 1e-15);
        assert!((legendre_eval(2, 0.5) - 5f64.sqrt() * (1.5 * 0.25 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn sup_bound_on_grid() {
        for j in 0..=20 {
            let bound = (2.0 * j as f64 + 1.0).sqrt();
            for i in 0..=1000 {
                let x = -1.0 + 2.0 * i as f64 / 1000.0;
                assert!(legendre_eval(j, x).abs() <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn monomials_match_recurrence() {
        for j in 0..=10 {
            let c = legendre_monomial_coeffs(j);
            let l1: f64 = c.iter().map(|v| v.abs()).sum();
            assert!(l1 <= 4f64.powi(j as i32) * (1.0 + 1e-12));
            for x in [-0.9, -0.2, 0.4, 1.0] {
                let v: f64 = c.iter().rev().fold(0.0, |acc, a| acc * x + a);
                assert!((v - legendre_eval(j, x)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn normalization_by_quadrature() {
        let n = 20000;
        for j in 0..6 {
            let s: f64 = (0..n)
                .map(|i| {
                    let x = -1.0 + (i as f64 + 0.5) * 2.0 / n as f64;
                    legendre_eval(j, x).powi(2)
                })
                .sum::<f64>()
                / n as f64;
            assert!((s - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn nets_match_recurrence() {
        use crate::constructions::grid_points;
        let l3 = legendre_net(3, 1e-3, Activation::Relu).unwrap();
        assert!((l3.eval(&[0.7]).unwrap()[0] - legendre_eval(3, 0.7)).abs() <= 1e-3);
        assert!(l3.net.metrics().mpar <= 1.0);
        let l0 = legendre_net(0, 1e-3, Activation::Relu).unwrap();
        assert_eq!(l0.eval(&[0.3]).unwrap()[0], 1.0);
        let grid = grid_points(1, 2001, 1.0);
        for j in 1..=5 {
            for act in [Activation::Relu, Activation::Repu { q: 2 }] {
                let l = legendre_net(j, 1e-3, act).unwrap();
                let r = l.verify(&grid, |x| vec![legendre_eval(j, x[0])]).unwrap();
                assert!(r.passed, "j={j} {act:?}: {r:?}");
            }
        }
    }
}
