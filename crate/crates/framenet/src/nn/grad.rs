use crate::error::{check_dim, Result};
use crate::nn::NeuralNet;

/// Layer inputs and pre-activations recorded during a forward pass.
#[derive(Clone, Debug, Default)]
pub struct ForwardTrace {
    /// `inputs[l]` is the vector fed into layer `l`.
    pub inputs: Vec<Vec<f64>>,
    /// `pre[l]` is `W_l inputs[l] + b_l`.
    pub pre: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[f64] {
        self.pre.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl NeuralNet {
    pub fn forward_trace(&self, x: &[f64]) -> Result<ForwardTrace> {
        check_dim(self.input_dim(), x.len())?;
        let mut trace = ForwardTrace::default();
        let mut cur = x.to_vec();
        let last = self.layers().len() - 1;
        for (l, layer) in self.layers().iter().enumerate() {
            let mut z = Vec::new();
            layer.affine_into(&cur, &mut z);
            trace.inputs.push(cur);
            cur = if l < last { z.iter().map(|v| self.activation().apply(*v)).collect() } else { Vec::new() };
            trace.pre.push(z);
        }
        Ok(trace)
    }
}

/// Accumulates the gradient of `<upstream, f(x)>` into `acc`, using the
/// flattened parameter layout of [`NeuralNet::params`].
pub fn backprop(net: &NeuralNet, trace: &ForwardTrace, upstream: &[f64], acc: &mut [f64]) -> Result<()> {
    check_dim(net.output_dim(), upstream.len())?;
    check_dim(net.param_len(), acc.len())?;
    let layers = net.layers();
    let mut offsets = Vec::with_capacity(layers.len());
    let mut off = 0;
    for l in layers {
        offsets.push(off);
        off += l.weights().len() + l.bias().len();
    }
    let mut delta = upstream.to_vec();
    for l in (0..layers.len()).rev() {
        let layer = &layers[l];
        let (rows, cols) = (layer.rows(), layer.cols());
        let input = &trace.inputs[l];
        let base = offsets[l];
        for i in 0..rows {
            let d = delta[i];
            if d == 0.0 {
                continue;
            }
            let wrow = base + i * cols;
            let mrow = &layer.mask()[i * cols..(i + 1) * cols];
            for j in 0..cols {
                if mrow[j] {
                    acc[wrow + j] += d * input[j];
                }
            }
            acc[base + rows * cols + i] += d;
        }
        if l > 0 {
            let mut next = vec![0.0; cols];
            for i in 0..rows {
                let d = delta[i];
                if d == 0.0 {
                    continue;
                }
                let w = &layer.weights()[i * cols..(i + 1) * cols];
                for (n, wij) in next.iter_mut().zip(w) {
                    *n += d * wij;
                }
            }
            let pre = &trace.pre[l - 1];
            for (n, z) in next.iter_mut().zip(pre) {
                *n *= net.activation().derivative(*z);
            }
            delta = next;
        }
    }
    Ok(())
}

/// Gradient of `<upstream, f(x)>` with respect to all parameters; masked
/// weights get exactly zero.
pub fn grad(net: &NeuralNet, x: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
    let trace = net.forward_trace(x)?;
    let mut acc = vec![0.0; net.param_len()];
    backprop(net, &trace, upstream, &mut acc)?;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Layer};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_net_gradient_is_outer_product() {
        let net = NeuralNet::zeros_dense(&[3, 2], Activation::Relu).unwrap();
        let g = grad(&net, &[1.0, 2.0, 3.0], &[0.5, -1.0]).unwrap();
        assert_eq!(g, vec![0.5, 1.0, 1.5, -1.0, -2.0, -3.0, 0.5, -1.0]);
    }

    #[test]
    fn masked_entries_get_zero() {
        let l0 = Layer::new(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.1, 0.1]).unwrap();
        let l1 = Layer::new(1, 2, vec![1.0, 1.0], vec![0.0]).unwrap();
        let net = NeuralNet::new(vec![l0, l1], Activation::Relu).unwrap();
        let g = grad(&net, &[0.5, 0.7], &[1.0]).unwrap();
        assert_eq!(g[1], 0.0);
        assert_eq!(g[2], 0.0);
        assert!(g[0] != 0.0);
    }

    #[test]
    fn matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for act in [Activation::Relu, Activation::Repu { q: 2 }] {
            let dims = [3, 5, 4, 2];
            let mut net = NeuralNet::zeros_dense(&dims, act).unwrap();
            let p: Vec<f64> = (0..net.param_len()).map(|_| rng.random_range(-0.8..0.8)).collect();
            net.set_params(&p).unwrap();
            let x = [0.3, -0.6, 0.9];
            let up = [0.7, -1.3];
            let g = grad(&net, &x, &up).unwrap();
            let h = 1e-6;
            for k in 0..p.len() {
                let mut plus = p.clone();
                plus[k] += h;
                let mut minus = p.clone();
                minus[k] -= h;
                let mut np = net.clone();
                np.set_params(&plus).unwrap();
                let mut nm = net.clone();
                nm.set_params(&minus).unwrap();
                let fp: f64 = np.eval(&x).unwrap().iter().zip(up).map(|(a, b)| a * b).sum();
                let fm: f64 = nm.eval(&x).unwrap().iter().zip(up).map(|(a, b)| a * b).sum();
                let fd = (fp - fm) / (2.0 * h);
                let err = (fd - g[k]).abs() / g[k].abs().max(1e-3);
                assert!(err < 1e-5, "{act:?} param {k}: fd {fd} vs {}", g[k]);
            }
        }
    }
}
