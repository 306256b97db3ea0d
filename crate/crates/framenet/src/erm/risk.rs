use rayon::prelude::*;

use crate::darcy::Dataset;
use crate::error::{check_dim, Result};
use crate::framenet::FrameNetModel;

/// A map between coefficient spaces, evaluated pointwise.
pub trait Predictor: Sync {
    fn predict(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl Predictor for FrameNetModel {
    fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply(x)
    }
}

/// Adapter turning a closure into a [`Predictor`].
pub struct FnPredictor<F>(pub F);

impl<F> Predictor for FnPredictor<F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.0)(x)
    }
}

fn predictions<P: Predictor + ?Sized>(model: &P, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    points.par_iter().map(|x| model.predict(x)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(1/n) sum_i (-2 <G(x_i), y_i> + ||G(x_i)||^2)`.
///
/// This omits the `||y_i||^2` term of the least-squares risk, so it stays
/// meaningful for white noise; it can be negative.
pub fn empirical_risk<P: Predictor + ?Sized>(model: &P, data: &Dataset) -> Result<f64> {
    let preds = predictions(model, &data.design)?;
    let mut acc = 0.0;
    for (g, y) in preds.iter().zip(&data.obs) {
        check_dim(y.len(), g.len())?;
        acc += -2.0 * dot(g, y) + dot(g, g);
    }
    Ok(acc / data.len() as f64)
}

/// `(1/n) sum_i ||y_i - G(x_i)||^2`.
pub fn empirical_risk_ls<P: Predictor + ?Sized>(model: &P, data: &Dataset) -> Result<f64> {
    let preds = predictions(model, &data.design)?;
    let mut acc = 0.0;
    for (g, y) in preds.iter().zip(&data.obs) {
        check_dim(y.len(), g.len())?;
        acc += g.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    Ok(acc / data.len() as f64)
}

/// Empirical seminorm `((1/n) sum_i ||A(x_i) - B(x_i)||^2)^{1/2}`.
pub fn empirical_norm<A: Predictor + ?Sized, B: Predictor + ?Sized>(a: &A, b: &B, points: &[Vec<f64>]) -> Result<f64> {
    if points.is_empty() {
        return Ok(0.0);
    }
    let pa = predictions(a, points)?;
    let pb = predictions(b, points)?;
    let mut acc = 0.0;
    for (u, v) in pa.iter().zip(&pb) {
        check_dim(u.len(), v.len())?;
        acc += u.iter().zip(v).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
    }
    Ok((acc / points.len() as f64).sqrt())
}
