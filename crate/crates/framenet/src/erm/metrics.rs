use rayon::prelude::*;

use crate::erm::Predictor;
use crate::error::{check_dim, Error, Result};
use crate::hilbert::{Frame, ScalingMap};
use crate::rng::stream_rng;

/// Input points drawn from the pushforward measure together with the true
/// outputs, reusable for evaluating many models.
#[derive(Clone, Debug, PartialEq)]
pub struct TestSet {
    pub points: Vec<Vec<f64>>,
    pub truth: Vec<Vec<f64>>,
}

impl TestSet {
    /// `samples` draws `x = sigma(u)` with `u` uniform on the cube; draw `i`
    /// uses stream `i` of `seed`.
    pub fn draw<T: Predictor + ?Sized>(
        truth: &T,
        scaling: &ScalingMap,
        frame: &Frame,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if samples < 2 {
            return Err(Error::input("error estimation needs at least two samples"));
        }
        let pairs = (0..samples)
            .into_par_iter()
            .map(|i| {
                let (_, x) = scaling.sample_gamma_with(frame, &mut stream_rng(seed, i as u64))?;
                let y = truth.predict(&x)?;
                Ok((x, y))
            })
            .collect::<Result<Vec<_>>>()?;
        let (points, truth) = pairs.into_iter().unzip();
        Ok(Self { points, truth })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Monte Carlo mean of `||model(x) - truth(x)||^2` and its standard error.
    pub fn error<P: Predictor + ?Sized>(&self, model: &P) -> Result<(f64, f64)> {
        let sq = self
            .points
            .par_iter()
            .zip(&self.truth)
            .map(|(x, t)| {
                let p = model.predict(x)?;
                check_dim(t.len(), p.len())?;
                Ok(p.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(mean_and_stderr(&sq))
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of the squared `L2(gamma)` distance between `model`
/// and `truth`, with its standard error.
pub fn l2_gamma_error<P: Predictor + ?Sized, T: Predictor + ?Sized>(
    model: &P,
    truth: &T,
    scaling: &ScalingMap,
    frame: &Frame,
    mc_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    TestSet::draw(truth, scaling, frame, mc_samples, seed)?.error(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erm::FnPredictor;
    use crate::hilbert::SmoothnessWeights;

    fn setup() -> (ScalingMap, Frame) {
        (ScalingMap::new(1.0, 1.0, SmoothnessWeights::algebraic(3, 1.0).unwrap()).unwrap(), Frame::identity(3))
    }

    #[test]
    fn identical_and_offset_models() {
        let (s, f) = setup();
        let truth = FnPredictor(|x: &[f64]| Ok(vec![x[0] * x[1], x[2]]));
        let (mse, se) = l2_gamma_error(&truth, &truth, &s, &f, 100, 1).unwrap();
        assert_eq!((mse, se), (0.0, 0.0));
        let shifted = FnPredictor(|x: &[f64]| Ok(vec![x[0] * x[1] + 0.3, x[2] - 0.4]));
        let (mse, _) = l2_gamma_error(&shifted, &truth, &s, &f, 100, 1).unwrap();
        assert!((mse - 0.25).abs() < 1e-12);
    }

    #[test]
    fn stderr_scales_with_samples() {
        let (s, f) = setup();
        let truth = FnPredictor(|x: &[f64]| Ok(vec![x[0]]));
        let zero = FnPredictor(|_: &[f64]| Ok(vec![0.0]));
        let (_, a) = l2_gamma_error(&zero, &truth, &s, &f, 20_000, 3).unwrap();
        let (_, b) = l2_gamma_error(&zero, &truth, &s, &f, 40_000, 3).unwrap();
        let ratio = a / b;
        assert!((ratio - 2f64.sqrt()).abs() < 0.1, "{ratio}");
    }
}
