use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constructions::{
    grid_points, legendre_eval, legendre_monomial_coeffs, legendre_net, mc_points, mult_net_relu, mult_net_repu,
    poly_net, prod_net_relu, prod_net_repu, tensor_legendre_net, CertifiedNet, MultiIndex, MultiIndexSet,
};
use crate::error::Result;
use crate::nn::Activation;

/// Outcome of one certificate check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub name: String,
    pub points: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub mpar: f64,
    pub size: usize,
    pub depth: usize,
    /// Wall-clock time; left out of serialized reports so they are reproducible.
    #[serde(skip)]
    pub seconds: f64,
    pub passed: bool,
}

fn check<F>(name: impl Into<String>, net: &CertifiedNet, points: &[Vec<f64>], reference: F, start: Instant) -> Result<CertificateCheck>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let report = net.verify(points, reference)?;
    let metrics = net.net.metrics();
    let mpar_ok = net.net.activation() != Activation::Relu || metrics.mpar <= 1.0;
    Ok(CertificateCheck {
        name: name.into(),
        points: report.points,
        max_error: report.max_error,
        tolerance: report.tolerance,
        mpar: metrics.mpar,
        size: metrics.size,
        depth: metrics.depth,
        seconds: start.elapsed().as_secs_f64(),
        passed: report.passed && mpar_ok,
    })
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Runs every constructive-network certificate: ReLU and RePU multipliers,
/// products, polynomials, univariate and tensorized Legendre networks.
pub fn certificate_suite(seed: u64) -> Result<Vec<CertificateCheck>> {
    let mut out = Vec::new();
    for (delta, d) in [(1e-2, 2.0), (1e-3, 4.0)] {
        let t = Instant::now();
        let net = mult_net_relu(delta, d)?;
        out.push(check(format!("relu_mult_delta{delta:e}_d{d}"), &net, &grid_points(2, 201, d), |x| vec![x[0] * x[1]], t)?);
    }
    let t = Instant::now();
    let net = mult_net_repu(2)?;
    out.push(check("repu_mult", &net, &mc_points(2, 10_000, 10.0, seed), |x| vec![x[0] * x[1]], t)?);

    let t = Instant::now();
    let net = prod_net_relu(3, 1e-2, 1.0)?;
    out.push(check("relu_prod_3", &net, &mc_points(3, 10_000, 1.0, seed), |x| vec![x.iter().product()], t)?);
    for n in 2..=8 {
        let t = Instant::now();
        let net = prod_net_repu(n, 2)?;
        out.push(check(format!("repu_prod_{n}"), &net, &mc_points(n, 10_000, 2.0, seed), |x| vec![x.iter().product()], t)?);
    }

    let line = grid_points(1, 2001, 1.0);
    for j in 0..=8 {
        let t = Instant::now();
        let net = legendre_net(j, 1e-3, Activation::Relu)?;
        out.push(check(format!("relu_legendre_{j}"), &net, &line, |x| vec![legendre_eval(j, x[0])], t)?);
    }
    for degree in 0..=6 {
        let t = Instant::now();
        let coeffs = legendre_monomial_coeffs(degree);
        let net = poly_net(&coeffs, 0.0, 1.0, Activation::Repu { q: 2 })?;
        let pts = mc_points(1, 10_000, 1.0, seed);
        out.push(check(format!("repu_poly_{degree}"), &net, &pts, |x| vec![poly_eval(&coeffs, x[0])], t)?);
    }

    let lambda = MultiIndexSet::new(vec![
        MultiIndex::zero(),
        MultiIndex::unit(0),
        MultiIndex::unit(1),
        MultiIndex::from_dense(&[2, 0]),
        MultiIndex::from_dense(&[1, 1]),
        MultiIndex::from_dense(&[3, 0]),
    ])?;
    let reference = |y: &[f64]| lambda.indices().iter().map(|nu| nu.legendre(y)).collect::<Vec<f64>>();
    let pts = mc_points(2, 10_000, 1.0, seed);
    let t = Instant::now();
    let net = tensor_legendre_net(&lambda, 1e-2, Activation::Relu)?;
    out.push(check("relu_tensor_legendre", &net, &pts, reference, t)?);
    let t = Instant::now();
    let net = tensor_legendre_net(&lambda, 0.0, Activation::Repu { q: 2 })?;
    out.push(check("repu_tensor_legendre", &net, &pts, reference, t)?);
    Ok(out)
}
