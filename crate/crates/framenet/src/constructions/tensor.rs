use std::collections::BTreeSet;

use crate::constructions::{legendre_net, prod_net_relu, prod_net_repu, CertifiedNet, MultiIndexSet};
use crate::error::{Error, Result};
use crate::nn::{constant_net, identity_net, pad_depth, parallelize, sparse_concat, with_input_map, Activation, NeuralNet};

fn pad_all(nets: &[NeuralNet]) -> Result<Vec<NeuralNet>> {
    let depth = nets.iter().map(NeuralNet::depth).max().unwrap_or(0);
    nets.iter().map(|n| pad_depth(n, depth)).collect()
}

/// Tensorized Legendre polynomials for every index in `lambda` on
/// `[-1, 1]^{dim}` with `dim` the number of coordinates touched by `lambda`.
pub fn tensor_legendre_net(lambda: &MultiIndexSet, delta: f64, act: Activation) -> Result<CertifiedNet> {
    tensor_legendre_net_with_dim(lambda, delta, act, lambda.extent().max(1))
}

/// Same as [`tensor_legendre_net`] on an input of dimension `input_dim`.
///
/// A first stage evaluates the univariate factors `L_j(y_k)` needed by any
/// index in parallel, a second stage multiplies the factors of each index.
/// With ReLU the factors get budget `delta/(2d) (2m+2)^{1-d}` and each product
/// gets budget `delta/2` on the domain `2|nu|_1 + 2`, where `d` and `m` are the
/// effective dimension and maximal order of `lambda`.
pub fn tensor_legendre_net_with_dim(
    lambda: &MultiIndexSet,
    delta: f64,
    act: Activation,
    input_dim: usize,
) -> Result<CertifiedNet> {
    if lambda.is_empty() {
        return Err(Error::input("index set must not be empty"));
    }
    if lambda.extent() > input_dim {
        return Err(Error::input(format!(
            "index set touches {} coordinates but the input has {input_dim}",
            lambda.extent()
        )));
    }
    let relu = act == Activation::Relu;
    if relu && !(delta > 0.0 && delta < 0.5) {
        return Err(Error::input(format!("budget must lie in (0, 1/2), got {delta}")));
    }
    let eff_dim = lambda.effective_dim();
    let max_order = lambda.max_order();
    let factor_delta = if relu {
        delta / (2.0 * eff_dim.max(1) as f64) * (2.0 * max_order as f64 + 2.0).powi(1 - eff_dim.max(1) as i32)
    } else {
        0.0
    };
    let names: Vec<String> = lambda.indices().iter().map(|nu| nu.to_string()).collect();
    let cert_error = if relu { delta } else { 0.0 };

    let factors: Vec<(usize, u32)> =
        lambda.indices().iter().flat_map(|nu| nu.pairs().iter().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    if factors.is_empty() {
        let net = constant_net(&vec![1.0; lambda.len()], input_dim, 0, act)?;
        let mut c = CertifiedNet::new(net, 0.0, 1.0);
        c.output_names = Some(names);
        return Ok(c);
    }

    let univariate = factors
        .iter()
        .map(|&(_, j)| Ok(legendre_net(j as usize, factor_delta.min(0.25), act)?.net))
        .collect::<Result<Vec<_>>>()?;
    let univariate = pad_all(&univariate)?;
    let refs: Vec<&NeuralNet> = univariate.iter().collect();
    let map: Vec<usize> = factors.iter().map(|f| f.0).collect();
    let first = with_input_map(&parallelize(&refs)?, input_dim, &map)?;

    let mut pieces = Vec::with_capacity(lambda.len());
    let mut piece_inputs = Vec::new();
    let mut domains = Vec::new();
    for nu in lambda.indices() {
        let pos: Vec<usize> =
            nu.pairs().iter().map(|p| factors.binary_search(p).expect("factor present")).collect();
        let piece = match pos.len() {
            0 => {
                piece_inputs.push(0);
                constant_net(&[1.0], 1, 0, act)?
            }
            1 => {
                piece_inputs.push(pos[0]);
                identity_net(1, 1, act)?
            }
            n => {
                piece_inputs.extend_from_slice(&pos);
                let bound = 2.0 * nu.order() as f64 + 2.0;
                domains.push(bound);
                match act {
                    Activation::Relu => prod_net_relu(n, delta / 2.0, bound)?.net,
                    Activation::Repu { q } => prod_net_repu(n, q)?.net,
                }
            }
        };
        pieces.push(piece);
    }
    let pieces = pad_all(&pieces)?;
    let refs: Vec<&NeuralNet> = pieces.iter().collect();
    let second = with_input_map(&parallelize(&refs)?, factors.len(), &piece_inputs)?;
    let net = sparse_concat(&second, &first)?;

    let mut c = CertifiedNet::new(net, cert_error, 1.0);
    c.notes = vec![
        ("factor_delta".into(), factor_delta),
        ("effective_dim".into(), eff_dim as f64),
        ("max_order".into(), max_order as f64),
    ];
    if let Some(m) = domains.iter().copied().reduce(f64::max) {
        c.notes.push(("max_product_domain".into(), m));
    }
    c.output_names = Some(names);
    Ok(c)
}
