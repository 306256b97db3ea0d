use serde::{Deserialize, Serialize};

use crate::constructions::{tensor_legendre_net_with_dim, MultiIndexSet};
use crate::error::{Error, Result};
use crate::framenet::{CoefficientTable, FrameNetModel};
use crate::hilbert::{Frame, ScalingMap};
use crate::nn::{
    constant_net, pad_depth, parallelize, scalar_mult_net, sparse_concat, with_input_map, Activation, Layer, NetMetrics,
    NeuralNet,
};

/// Construction record of a surrogate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrogateReport {
    pub retained_indices: usize,
    pub terms: usize,
    pub rho: f64,
    pub metrics: NetMetrics,
}

/// Accuracy `n^{-min(r - 1/2, t)}` for the Legendre networks, capped at 1/4.
pub fn rho_schedule(n: usize, r: f64, t: f64) -> f64 {
    (n.max(1) as f64).powf(-(r - 0.5).min(t)).min(0.25)
}

/// Surrogate `y -> (sum_{i: m_i > j} c_{i,j} L~_{nu_i}(y))_j` wrapped as a
/// FrameNet model with the given frames and scaling.
///
/// Each retained term scales one approximate tensor Legendre output by its
/// coefficient; terms of the same output mode are summed by a final affine
/// layer.
pub fn build_constructive_surrogate(
    table: &CoefficientTable,
    m: &[usize],
    rho: f64,
    act: Activation,
    encoder: Frame,
    scaling: ScalingMap,
    decoder: Frame,
) -> Result<(FrameNetModel, SurrogateReport)> {
    if m.len() != table.rows() {
        return Err(Error::Dimension { expected: table.rows(), got: m.len() });
    }
    if m.iter().any(|&k| k > table.cols()) {
        return Err(Error::input("allocation exceeds the number of output modes"));
    }
    let input_dim = scaling.len().min(encoder.len());
    let out_dim = table.cols();
    let kept: Vec<usize> = (0..table.rows()).filter(|&i| m[i] > 0).collect();
    let terms: usize = m.iter().sum();

    let net = if kept.is_empty() {
        constant_net(&vec![0.0; out_dim], input_dim, 0, act)?
    } else {
        let sub = MultiIndexSet::new(kept.iter().map(|&i| table.indices.indices()[i].clone()).collect())?;
        let legendre = tensor_legendre_net_with_dim(&sub, rho, act, input_dim)?;
        let mut scalers = Vec::with_capacity(terms);
        let mut sources = Vec::with_capacity(terms);
        let mut targets = Vec::with_capacity(terms);
        for (k, &i) in kept.iter().enumerate() {
            for j in 0..m[i] {
                scalers.push(scalar_mult_net(table.c[i][j], 1, act)?);
                sources.push(k);
                targets.push(j);
            }
        }
        let depth = scalers.iter().map(NeuralNet::depth).max().unwrap_or(0);
        let scalers = scalers.iter().map(|n| pad_depth(n, depth)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&NeuralNet> = scalers.iter().collect();
        let scaled = with_input_map(&parallelize(&refs)?, sub.len(), &sources)?;
        let mut w = vec![0.0; out_dim * terms];
        for (t, &j) in targets.iter().enumerate() {
            w[j * terms + t] = 1.0;
        }
        let sum = NeuralNet::new(vec![Layer::new(out_dim, terms, w, vec![0.0; out_dim])?], act)?;
        sparse_concat(&sum, &sparse_concat(&scaled, &legendre.net)?)?
    };
    let metrics = net.metrics();
    let range = table.c.iter().map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt()).sum::<f64>();
    let mut model = FrameNetModel::new(encoder, scaling, net, decoder, range.max(1.0) * 2.0)?;
    let certified = if act == Activation::Relu { rho } else { 0.0 };
    model.certified_sup_error = Some(certified);
    model.notes = vec![("rho".into(), rho), ("terms".into(), terms as f64)];
    let report = SurrogateReport { retained_indices: kept.len(), terms, rho, metrics };
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::MultiIndex;
    use crate::hilbert::SmoothnessWeights;

    fn linear_table() -> CoefficientTable {
        let set = MultiIndexSet::new(vec![MultiIndex::zero(), MultiIndex::unit(0), MultiIndex::unit(1)]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        CoefficientTable::new(set, vec![vec![0.0, 0.0], vec![2.0 * s, -s], vec![0.0, 0.0]]).unwrap()
    }

    fn unit_scaling(k: usize) -> ScalingMap {
        ScalingMap::new(1.0, 1.0, SmoothnessWeights::new(vec![1.0; k]).unwrap()).unwrap()
    }

    #[test]
    fn empty_allocation_is_zero() {
        let (model, report) = build_constructive_surrogate(
            &linear_table(),
            &[0, 0, 0],
            0.1,
            Activation::Relu,
            Frame::identity(2),
            unit_scaling(2),
            Frame::identity(2),
        )
        .unwrap();
        assert_eq!(report.terms, 0);
        assert_eq!(model.apply(&[0.3, 0.4]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn linear_target_is_recovered() {
        let rho = 1e-2;
        let (model, report) = build_constructive_surrogate(
            &linear_table(),
            &[0, 2, 0],
            rho,
            Activation::Relu,
            Frame::identity(2),
            unit_scaling(2),
            Frame::identity(2),
        )
        .unwrap();
        assert!(report.metrics.mpar <= 1.0);
        let out = model.apply(&[0.5, 0.0]).unwrap();
        let tol = rho * (2.0f64.powi(2) + 1.0).sqrt() / 3f64.sqrt() * 1.0;
        assert!((out[0] - 1.0).abs() <= tol + 1e-12);
        assert!((out[1] + 0.5).abs() <= tol + 1e-12);
    }

    #[test]
    fn repu_surrogate_is_exact() {
        let (model, _) = build_constructive_surrogate(
            &linear_table(),
            &[1, 2, 1],
            0.0,
            Activation::Repu { q: 2 },
            Frame::identity(2),
            unit_scaling(2),
            Frame::identity(2),
        )
        .unwrap();
        let out = model.apply(&[-0.7, 0.2]).unwrap();
        assert!((out[0] + 1.4).abs() < 1e-10 && (out[1] - 0.7).abs() < 1e-10);
    }

    #[test]
    fn rho_schedule_values() {
        assert!((rho_schedule(16, 1.5, 2.0) - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(rho_schedule(1, 2.0, 2.0), 0.25);
    }
}
