use crate::constructions::CertifiedNet;
use crate::error::{Error, Result};
use crate::nn::{Activation, Layer, NeuralNet};

/// Width of every hidden layer of the ReLU multiplier.
pub const MULT_RELU_WIDTH: usize = 14;

/// Neurons per squared variable in a sawtooth stage:
/// two copies of `sigma(t)`, four copies of `sigma(t - 1/2)` and the running value.
const STAGE: usize = 7;

/// Approximate product of two numbers in `[-D, D]` with a ReLU network.
///
/// The inputs are folded to `a = |x+y|/(2D)` and `b = |x-y|/(2D)` in `[0,1]`,
/// each is squared by subtracting scaled sawtooth iterates, and
/// `xy = D^2 (a^2 - b^2)` is recovered with doubling layers. All parameters
/// lie in `[-1, 1]` and the product of zero with anything is exactly zero.
pub fn mult_net_relu(delta: f64, d: f64) -> Result<CertifiedNet> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::input(format!("multiplier budget must lie in (0, 1/2), got {delta}")));
    }
    if !(d >= 1.0) || !d.is_finite() {
        return Err(Error::input(format!("multiplier domain bound must be at least 1, got {d}")));
    }
    let d2 = d * d;
    let stages = (((d2 / delta).log2() - 1.0) / 2.0).ceil().max(1.0) as usize;
    let mut doublings = d2.log2().ceil().max(0.0) as i32;
    while 2f64.powi(doublings) < d2 {
        doublings += 1;
    }

    let mut layers = Vec::with_capacity(stages + doublings as usize + 2);
    let s = 1.0 / (2.0 * d);
    layers.push(Layer::new(4, 2, vec![s, s, -s, -s, s, -s, -s, s], vec![0.0; 4])?);

    // Coefficients of `t` and of the running value in terms of the previous layer,
    // per variable and per previous neuron.
    let stage_input = |prev_cols: usize, first: bool, k: usize| -> [(Vec<f64>, Vec<f64>); 2] {
        std::array::from_fn(|v| {
            let mut t = vec![0.0; prev_cols];
            let mut acc = vec![0.0; prev_cols];
            if first {
                t[2 * v] = 1.0;
                t[2 * v + 1] = 1.0;
                acc.clone_from(&t);
            } else {
                let o = v * STAGE;
                t[o] = 1.0;
                t[o + 1] = 1.0;
                for j in 2..6 {
                    t[o + j] = -1.0;
                }
                let scale = 0.25f64.powi(k as i32 - 1);
                for j in 0..6 {
                    acc[o + j] = -scale * t[o + j];
                }
                acc[o + 6] = 1.0;
            }
            (t, acc)
        })
    };

    let mut prev_cols = 4;
    for k in 1..=stages {
        let inputs = stage_input(prev_cols, k == 1, k);
        let mut w = Vec::with_capacity(MULT_RELU_WIDTH * prev_cols);
        let mut b = Vec::with_capacity(MULT_RELU_WIDTH);
        for (t, acc) in &inputs {
            for j in 0..6 {
                w.extend_from_slice(t);
                b.push(if j < 2 { 0.0 } else { -0.5 });
            }
            w.extend_from_slice(acc);
            b.push(0.0);
        }
        layers.push(Layer::new(MULT_RELU_WIDTH, prev_cols, w, b)?);
        prev_cols = MULT_RELU_WIDTH;
    }

    // Running squares after the last stage, as rows over the last hidden layer.
    let last = stage_input(prev_cols, false, stages + 1);
    let sq_a = &last[0].1;
    let sq_b = &last[1].1;
    // Paired copies of the scaled squares, doubled until the scale reaches D^2.
    // The two halves are subtracted only at the very end, which keeps the
    // product with zero exact.
    let pair_layers = doublings.max(1);
    let c = d2 / 2f64.powi(pair_layers);
    let mut w = Vec::with_capacity(4 * prev_cols);
    for row in [sq_a, sq_a, sq_b, sq_b] {
        w.extend(row.iter().map(|v| c * v));
    }
    layers.push(Layer::new(4, prev_cols, w, vec![0.0; 4])?);
    let pair = vec![1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0];
    for _ in 1..pair_layers {
        layers.push(Layer::new(4, 4, pair.clone(), vec![0.0; 4])?);
    }
    layers.push(Layer::new(1, 4, vec![1.0, 1.0, -1.0, -1.0], vec![0.0])?);

    let net = NeuralNet::new(layers, Activation::Relu)?;
    let mut cert = CertifiedNet::new(net, delta, d);
    cert.notes = vec![
        ("delta".into(), delta),
        ("domain".into(), d),
        ("sawtooth_stages".into(), stages as f64),
        ("doublings".into(), doublings as f64),
    ];
    Ok(cert)
}

/// Exact product of two numbers with one hidden RePU(2) layer via polarization.
pub fn mult_net_repu(q: u32) -> Result<CertifiedNet> {
    if q != 2 {
        return Err(Error::Unsupported(format!("exact RePU multiplier only for q = 2, got {q}")));
    }
    let l0 = Layer::new(4, 2, vec![1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0], vec![0.0; 4])?;
    let l1 = Layer::new(1, 4, vec![0.25, 0.25, -0.25, -0.25], vec![0.0])?;
    let net = NeuralNet::new(vec![l0, l1], Activation::Repu { q })?;
    Ok(CertifiedNet::new(net, 0.0, f64::INFINITY))
}
