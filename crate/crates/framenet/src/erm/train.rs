use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::darcy::Dataset;
use crate::error::{check_dim, Error, Result};
use crate::framenet::{make_architecture, ArchitectureConfig, FrameNetModel};
use crate::hilbert::{Frame, ScalingMap};
use crate::nn::{backprop, NeuralNet};
use crate::rng::stream_rng;

/// Settings of the projected gradient descent used to approximate the
/// empirical risk minimizer.
///
/// Every step is a full-batch gradient step followed by projection onto the
/// parameter box `[-M, M]`. The step size adapts by backtracking: an accepted
/// step grows it by `grow`, a rejected one shrinks it by `shrink`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub grow: f64,
    pub shrink: f64,
    pub epochs: usize,
    pub restarts: usize,
    /// Multiplier of the Glorot uniform initialization range.
    pub init_scale: f64,
    pub seed: u64,
    /// Largest allowed Euclidean norm of a gradient, if any.
    pub grad_clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            grow: 1.2,
            shrink: 0.5,
            epochs: 300,
            restarts: 3,
            init_scale: 1.0,
            seed: 0,
            grad_clip: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.epochs == 0 {
            return Err(Error::input("epochs and restarts must be at least 1"));
        }
        if !(self.learning_rate > 0.0) || !(self.init_scale > 0.0) {
            return Err(Error::input("learning rate and init scale must be positive"));
        }
        if !(self.grow >= 1.0) || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::input("need grow >= 1 and shrink in (0, 1)"));
        }
        if let Some(c) = self.grad_clip {
            if !(c > 0.0) {
                return Err(Error::input("gradient clip must be positive"));
            }
        }
        Ok(())
    }
}

/// Outcome of one restart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartReport {
    pub initial_risk: f64,
    pub final_risk: f64,
    pub accepted_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub restarts: Vec<RestartReport>,
    pub best_restart: usize,
    pub best_risk: f64,
    /// Largest parameter magnitude seen after any step.
    pub max_mpar: f64,
    /// Number of nonzero parameters of the returned network.
    pub effective_size: usize,
    pub depth: usize,
    pub width: usize,
}

#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub model: FrameNetModel,
    pub report: TrainReport,
}

const CHUNK: usize = 32;

/// Full-batch risk `(1/n) sum -2<y_hat, y> + ||y_hat||^2` and, optionally, its
/// gradient. Chunks are reduced in a fixed order so results do not depend on
/// the number of threads.
struct Objective<'a> {
    inputs: Vec<Vec<f64>>,
    obs: &'a [Vec<f64>],
    decoder: &'a Frame,
}

impl Objective<'_> {
    fn risk(&self, net: &NeuralNet) -> Result<f64> {
        let parts: Vec<f64> = self
            .inputs
            .par_chunks(CHUNK)
            .zip(self.obs.par_chunks(CHUNK))
            .map(|(xs, ys)| {
                let mut acc = 0.0;
                for (x, y) in xs.iter().zip(ys) {
                    let pred = self.decoder.synthesis(&net.eval(x)?)?;
                    acc += pred.iter().zip(y).map(|(p, q)| p * p - 2.0 * p * q).sum::<f64>();
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum::<f64>() / self.inputs.len() as f64)
    }

    fn risk_and_grad(&self, net: &NeuralNet) -> Result<(f64, Vec<f64>)> {
        let parts: Vec<(f64, Vec<f64>)> = self
            .inputs
            .par_chunks(CHUNK)
            .zip(self.obs.par_chunks(CHUNK))
            .map(|(xs, ys)| {
                let mut acc = 0.0;
                let mut g = vec![0.0; net.param_len()];
                for (x, y) in xs.iter().zip(ys) {
                    let trace = net.forward_trace(x)?;
                    let pred = self.decoder.synthesis(trace.output())?;
                    acc += pred.iter().zip(y).map(|(p, q)| p * p - 2.0 * p * q).sum::<f64>();
                    let resid: Vec<f64> = pred.iter().zip(y).map(|(p, q)| 2.0 * (p - q)).collect();
                    let mut upstream = self.decoder.analysis(&resid)?;
                    upstream.truncate(net.output_dim());
                    backprop(net, &trace, &upstream, &mut g)?;
                }
                Ok((acc, g))
            })
            .collect::<Result<_>>()?;
        let n = self.inputs.len() as f64;
        let mut risk = 0.0;
        let mut grad = vec![0.0; net.param_len()];
        for (r, g) in parts {
            risk += r;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b;
            }
        }
        grad.iter_mut().for_each(|v| *v /= n);
        Ok((risk / n, grad))
    }
}

fn glorot_init<R: Rng + ?Sized>(net: &mut NeuralNet, scale: f64, bound: f64, rng: &mut R) -> Result<()> {
    let mut p = Vec::with_capacity(net.param_len());
    for layer in net.layers() {
        let a = (scale * (6.0 / (layer.rows() + layer.cols()) as f64).sqrt()).min(bound);
        p.extend((0..layer.rows() * layer.cols()).map(|_| rng.random_range(-a..=a)));
        p.extend(std::iter::repeat_n(0.0, layer.rows()));
    }
    net.set_params(&p)
}

fn project(p: &mut [f64], bound: f64) {
    p.iter_mut().for_each(|v| *v = v.clamp(-bound, bound));
}

fn diverged(what: &str, restart: usize, step: usize, lr: f64) -> Error {
    Error::Training(format!("{what} became non-finite in restart {restart} at step {step} (step size {lr:.3e})"))
}

/// Approximate empirical risk minimizer over the FrameNet class of budget
/// `big_n`.
///
/// The sparse family is trained with the fully connected network of the
/// same depth and width; the report gives the resulting number of nonzero
/// parameters.
pub fn train_erm(
    arch: &ArchitectureConfig,
    big_n: usize,
    data: &Dataset,
    cfg: &TrainConfig,
    encoder: &Frame,
    scaling: &ScalingMap,
    decoder: &Frame,
) -> Result<TrainedModel> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::input("training requires at least one sample"));
    }
    check_dim(decoder.ref_dim(), data.output_modes())?;
    let shape = make_architecture(arch, big_n)?;
    let input_dim = encoder.len().min(scaling.len());
    let template = shape.dense_net(input_dim, decoder.len(), arch.activation)?;
    let template = FrameNetModel::new(encoder.clone(), scaling.clone(), template, decoder.clone(), arch.b)?;
    let inputs = data
        .design
        .iter()
        .map(|x| Ok(scaling.scale(&template.encode(x)?)?.values))
        .collect::<Result<Vec<_>>>()?;
    let objective = Objective { inputs, obs: &data.obs, decoder };

    let mut reports = Vec::with_capacity(cfg.restarts);
    let mut best: Option<(f64, NeuralNet, usize)> = None;
    let mut max_mpar = 0.0f64;
    for restart in 0..cfg.restarts {
        let mut rng = stream_rng(cfg.seed, restart as u64);
        let mut net = template.net.clone();
        glorot_init(&mut net, cfg.init_scale, arch.m, &mut rng)?;
        let (mut risk, mut grad) = objective.risk_and_grad(&net)?;
        if !risk.is_finite() {
            return Err(diverged("initial risk", restart, 0, cfg.learning_rate));
        }
        let initial_risk = risk;
        let mut params = net.params();
        let mut lr = cfg.learning_rate;
        let mut accepted = 0;
        let mut trial = net.clone();
        'epochs: for step in 0..cfg.epochs {
            if let Some(clip) = cfg.grad_clip {
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm > clip {
                    grad.iter_mut().for_each(|g| *g *= clip / norm);
                }
            }
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(diverged("gradient", restart, step, lr));
            }
            loop {
                let mut cand: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - lr * g).collect();
                project(&mut cand, arch.m);
                trial.set_params(&cand)?;
                let cand_risk = objective.risk(&trial)?;
                if cand_risk.is_nan() {
                    return Err(diverged("risk", restart, step, lr));
                }
                if cand_risk <= risk {
                    if cand == params {
                        break 'epochs;
                    }
                    params = cand;
                    net.set_params(&params)?;
                    max_mpar = max_mpar.max(net.metrics().mpar);
                    accepted += 1;
                    lr *= cfg.grow;
                    let (r, g) = objective.risk_and_grad(&net)?;
                    risk = r;
                    grad = g;
                    break;
                }
                lr *= cfg.shrink;
                if lr < 1e-14 {
                    break 'epochs;
                }
            }
        }
        reports.push(RestartReport { initial_risk, final_risk: risk, accepted_steps: accepted });
        if best.as_ref().is_none_or(|(b, _, _)| risk < *b) {
            best = Some((risk, net, restart));
        }
    }
    let (best_risk, net, best_restart) = best.expect("at least one restart");
    let metrics = net.metrics();
    let mut model = FrameNetModel::new(encoder.clone(), scaling.clone(), net, decoder.clone(), arch.b)?;
    model.notes.push(("train_risk".into(), best_risk));
    let report = TrainReport {
        restarts: reports,
        best_restart,
        best_risk,
        max_mpar,
        effective_size: metrics.size,
        depth: shape.depth,
        width: shape.width,
    };
    Ok(TrainedModel { model, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darcy::NoiseModel;
    use crate::erm::{empirical_risk, empirical_risk_ls};
    use crate::hilbert::SmoothnessWeights;
    use crate::nn::Activation;
    use crate::rng::seeded;

    fn unit_scaling(k: usize) -> ScalingMap {
        ScalingMap::new(1.0, 1.0, SmoothnessWeights::new(vec![1.0; k]).unwrap()).unwrap()
    }

    fn realizable() -> (Dataset, ArchitectureConfig) {
        let arch = ArchitectureConfig { c_l: 1.0, c_p: 1.0, ..Default::default() };
        let mut teacher = make_architecture(&arch, 2).unwrap().dense_net(2, 1, Activation::Relu).unwrap();
        glorot_init(&mut teacher, 1.0, 1.0, &mut seeded(1)).unwrap();
        let mut rng = seeded(2);
        let design: Vec<Vec<f64>> = (0..64).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let obs = design.iter().map(|x| teacher.eval(x).unwrap()).collect();
        (Dataset::new(design, obs, NoiseModel::White, 0.0, 0).unwrap(), arch)
    }

    #[test]
    fn fits_realizable_data() {
        let (ds, arch) = realizable();
        let cfg = TrainConfig { epochs: 2000, restarts: 3, ..Default::default() };
        let out = train_erm(&arch, 2, &ds, &cfg, &Frame::identity(2), &unit_scaling(2), &Frame::identity(1)).unwrap();
        let ls = empirical_risk_ls(&out.model, &ds).unwrap();
        assert!(ls <= 1e-3, "{ls}");
        assert!(out.report.max_mpar <= arch.m);
        assert!(out.model.net.metrics().mpar <= arch.m);
        let best = out.report.restarts.iter().map(|r| r.final_risk).fold(f64::INFINITY, f64::min);
        assert_eq!(out.report.best_risk, best);
        for r in &out.report.restarts {
            assert!(r.final_risk <= r.initial_risk);
        }
        let risk = empirical_risk(&out.model, &ds).unwrap();
        assert!((risk - out.report.best_risk).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_runs() {
        let (ds, arch) = realizable();
        let cfg = TrainConfig { epochs: 20, restarts: 2, ..Default::default() };
        let a = train_erm(&arch, 2, &ds, &cfg, &Frame::identity(2), &unit_scaling(2), &Frame::identity(1)).unwrap();
        let b = train_erm(&arch, 2, &ds, &cfg, &Frame::identity(2), &unit_scaling(2), &Frame::identity(1)).unwrap();
        assert_eq!(a.model.net, b.model.net);
    }
}
