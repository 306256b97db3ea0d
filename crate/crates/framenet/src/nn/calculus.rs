use crate::error::{check_dim, Error, Result};
use crate::nn::{Activation, Layer, NeuralNet};

/// Largest parameter magnitude produced by [`scalar_mult_net`] for the
/// supported activations.
pub const SM_MPAR_BOUND: f64 = 1.0;

/// One-dimensional identity realized by a single hidden layer: the hidden units
/// are `act(w_r x + b_r)` and `x = sum_r out_r * hidden_r`.
struct IdentityGadget {
    rows: &'static [(f64, f64)],
    outs: &'static [f64],
}

const RELU_GADGET: IdentityGadget = IdentityGadget { rows: &[(1.0, 0.0), (-1.0, 0.0)], outs: &[1.0, -1.0] };

// (x+1)^2 - (x-1)^2 = 4x, with z^2 = act(z) + act(-z).
const REPU2_GADGET: IdentityGadget = IdentityGadget {
    rows: &[(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)],
    outs: &[0.25, 0.25, -0.25, -0.25],
};

fn gadget(act: Activation) -> Result<&'static IdentityGadget> {
    match act {
        Activation::Relu => Ok(&RELU_GADGET),
        Activation::Repu { q: 2 } => Ok(&REPU2_GADGET),
        Activation::Repu { q } => Err(Error::Unsupported(format!("identity networks for RePU power {q}"))),
    }
}

fn gadget_input_layer(g: &IdentityGadget, dim: usize, copies: usize) -> Layer {
    let gl = g.rows.len();
    let rows = copies * dim * gl;
    let mut w = vec![0.0; rows * dim];
    let mut b = vec![0.0; rows];
    for c in 0..copies {
        for i in 0..dim {
            for (r, &(wr, br)) in g.rows.iter().enumerate() {
                let row = (c * dim + i) * gl + r;
                w[row * dim + i] = wr;
                b[row] = br;
            }
        }
    }
    Layer::new(rows, dim, w, b).expect("gadget layer is consistent")
}

fn gadget_output_layer(g: &IdentityGadget, dim: usize, copies: usize, scale: f64) -> Layer {
    let gl = g.rows.len();
    let cols = copies * dim * gl;
    let mut w = vec![0.0; dim * cols];
    for c in 0..copies {
        for i in 0..dim {
            for (s, &o) in g.outs.iter().enumerate() {
                w[i * cols + (c * dim + i) * gl + s] = scale * o;
            }
        }
    }
    Layer::new(dim, cols, w, vec![0.0; dim]).expect("gadget layer is consistent")
}

fn scaled_identity(dim: usize, depth: usize, act: Activation, scale: f64) -> Result<NeuralNet> {
    if depth == 0 {
        return Err(Error::input("identity networks need depth at least 1"));
    }
    let g = gadget(act)?;
    let gl = g.rows.len();
    let hidden = dim * gl;
    let mut layers = vec![gadget_input_layer(g, dim, 1)];
    for _ in 1..depth {
        let mut w = vec![0.0; hidden * hidden];
        let mut b = vec![0.0; hidden];
        for i in 0..dim {
            for (r, &(wr, br)) in g.rows.iter().enumerate() {
                let row = i * gl + r;
                b[row] = br;
                match act {
                    // Hidden ReLU units are nonnegative, so they pass through unchanged.
                    Activation::Relu => w[row * hidden + row] = 1.0,
                    _ => {
                        for (s, &o) in g.outs.iter().enumerate() {
                            w[row * hidden + i * gl + s] = wr * o;
                        }
                    }
                }
            }
        }
        layers.push(Layer::new(hidden, hidden, w, b)?);
    }
    layers.push(gadget_output_layer(g, dim, 1, scale));
    NeuralNet::new(layers, act)
}

/// Exact identity on `R^dim` with the given number of hidden layers.
pub fn identity_net(dim: usize, depth: usize, act: Activation) -> Result<NeuralNet> {
    scaled_identity(dim, depth, act, 1.0)
}

/// Block-diagonal stacking of networks of equal depth acting on disjoint inputs.
pub fn parallelize(nets: &[&NeuralNet]) -> Result<NeuralNet> {
    let first = nets.first().ok_or_else(|| Error::input("nothing to parallelize"))?;
    let depth = first.depth();
    let act = first.activation();
    for n in nets {
        if n.depth() != depth {
            return Err(Error::input(format!("parallelize needs equal depths, got {} and {}", depth, n.depth())));
        }
        if n.activation() != act {
            return Err(Error::input("parallelize needs a common activation"));
        }
    }
    let mut layers = Vec::with_capacity(depth + 1);
    for l in 0..=depth {
        let rows: usize = nets.iter().map(|n| n.layers()[l].rows()).sum();
        let cols: usize = nets.iter().map(|n| n.layers()[l].cols()).sum();
        let mut w = vec![0.0; rows * cols];
        let mut m = vec![false; rows * cols];
        let mut b = Vec::with_capacity(rows);
        let (mut r0, mut c0) = (0, 0);
        for n in nets {
            let layer = &n.layers()[l];
            for i in 0..layer.rows() {
                for j in 0..layer.cols() {
                    let k = (r0 + i) * cols + c0 + j;
                    w[k] = layer.weight(i, j);
                    m[k] = layer.mask()[i * layer.cols() + j];
                }
            }
            b.extend_from_slice(layer.bias());
            r0 += layer.rows();
            c0 += layer.cols();
        }
        layers.push(Layer::with_mask(rows, cols, w, m, b)?);
    }
    NeuralNet::new(layers, act)
}

/// Composition `f . g` that merges the output layer of `g` into the input layer
/// of `f`. Parameters are multiplied, so the largest parameter is not controlled.
pub(crate) fn plain_concat(f: &NeuralNet, g: &NeuralNet) -> Result<NeuralNet> {
    check_dim(f.input_dim(), g.output_dim())?;
    if f.activation() != g.activation() {
        return Err(Error::input("composition needs a common activation"));
    }
    let gl = g.layers().last().expect("nonempty");
    let f0 = &f.layers()[0];
    let (rows, inner, cols) = (f0.rows(), f0.cols(), gl.cols());
    let mut w = vec![0.0; rows * cols];
    let mut m = vec![false; rows * cols];
    let mut b = f0.bias().to_vec();
    for i in 0..rows {
        for k in 0..inner {
            let a = f0.weight(i, k);
            let am = f0.mask()[i * inner + k];
            if !am {
                continue;
            }
            b[i] += a * gl.bias()[k];
            for j in 0..cols {
                if gl.mask()[k * cols + j] {
                    w[i * cols + j] += a * gl.weight(k, j);
                    m[i * cols + j] = true;
                }
            }
        }
    }
    let merged = Layer::with_mask(rows, cols, w, m, b)?;
    let mut layers: Vec<Layer> = g.layers()[..g.layers().len() - 1].to_vec();
    layers.push(merged);
    layers.extend_from_slice(&f.layers()[1..]);
    NeuralNet::new(layers, f.activation())
}

/// Composition `f . g` through an identity layer, keeping parameters bounded.
///
/// The output layer of `g` is merged with the input side of an identity
/// network and the output side with the input layer of `f`; both merges only
/// copy parameters up to sign and fixed factors. Depth is
/// `depth(f) + depth(g) + 1`.
pub fn sparse_concat(f: &NeuralNet, g: &NeuralNet) -> Result<NeuralNet> {
    check_dim(f.input_dim(), g.output_dim())?;
    if f.activation() != g.activation() {
        return Err(Error::input("composition needs a common activation"));
    }
    let id = identity_net(g.output_dim(), 1, g.activation())?;
    plain_concat(&plain_concat(f, &id)?, g)
}

/// Sum of `m` blocks of dimension `dim`; a single affine layer.
pub fn summation_net(m: usize, dim: usize) -> Result<NeuralNet> {
    summation_net_with(m, dim, Activation::Relu)
}

pub(crate) fn summation_net_with(m: usize, dim: usize, act: Activation) -> Result<NeuralNet> {
    if m == 0 || dim == 0 {
        return Err(Error::input("summation needs at least one nonempty block"));
    }
    let cols = m * dim;
    let mut w = vec![0.0; dim * cols];
    for i in 0..dim {
        for k in 0..m {
            w[i * cols + k * dim + i] = 1.0;
        }
    }
    NeuralNet::new(vec![Layer::new(dim, cols, w, vec![0.0; dim])?], act)
}

/// Depth-one network computing `x -> 2x` from two parallel identity gadgets
/// whose outputs are summed.
fn doubler(dim: usize, act: Activation) -> Result<NeuralNet> {
    let g = gadget(act)?;
    NeuralNet::new(vec![gadget_input_layer(g, dim, 2), gadget_output_layer(g, dim, 2, 1.0)], act)
}

/// Exact multiplication by `alpha` on `R^dim`.
///
/// For `|alpha| <= 1` this is a scaled identity; otherwise `alpha = s 2^k`
/// with `s` in `(1/2, 1]` and the network chains `k` doubling blocks before
/// the scaled identity, so every parameter stays within [`SM_MPAR_BOUND`].
pub fn scalar_mult_net(alpha: f64, dim: usize, act: Activation) -> Result<NeuralNet> {
    if !alpha.is_finite() {
        return Err(Error::input("scalar must be finite"));
    }
    let mag = alpha.abs();
    if mag <= 1.0 {
        return scaled_identity(dim, 1, act, alpha);
    }
    let mut k = mag.log2().ceil().max(1.0) as u32;
    while 2f64.powi(k as i32) < mag {
        k += 1;
    }
    let rest = alpha / 2f64.powi(k as i32);
    let mut net = doubler(dim, act)?;
    let block = net.clone();
    for _ in 1..k {
        net = sparse_concat(&block, &net)?;
    }
    sparse_concat(&scaled_identity(dim, 1, act, rest)?, &net)
}

/// Network of the given depth whose output is the constant `value`.
pub(crate) fn constant_net(value: &[f64], in_dim: usize, depth: usize, act: Activation) -> Result<NeuralNet> {
    let mut layers = Vec::with_capacity(depth + 1);
    let mut cols = in_dim;
    for _ in 0..depth {
        layers.push(Layer::zeros(1, cols));
        cols = 1;
    }
    layers.push(Layer::new(value.len(), cols, vec![0.0; value.len() * cols], value.to_vec())?);
    NeuralNet::new(layers, act)
}

/// Appends identity layers after `net` until it has depth `target`.
pub(crate) fn pad_depth(net: &NeuralNet, target: usize) -> Result<NeuralNet> {
    let depth = net.depth();
    if target < depth {
        return Err(Error::input(format!("cannot pad depth {depth} down to {target}")));
    }
    if target == depth {
        return Ok(net.clone());
    }
    plain_concat(&identity_net(net.output_dim(), target - depth, net.activation())?, net)
}

/// Re-wires the inputs: input `j` of `net` reads `z[map[j]]` of a new input of
/// dimension `new_dim`.
pub(crate) fn with_input_map(net: &NeuralNet, new_dim: usize, map: &[usize]) -> Result<NeuralNet> {
    check_dim(net.input_dim(), map.len())?;
    if let Some(&bad) = map.iter().find(|&&k| k >= new_dim) {
        return Err(Error::input(format!("input map index {bad} out of range {new_dim}")));
    }
    let l0 = &net.layers()[0];
    let rows = l0.rows();
    let mut w = vec![0.0; rows * new_dim];
    let mut m = vec![false; rows * new_dim];
    for i in 0..rows {
        for (j, &k) in map.iter().enumerate() {
            if l0.mask()[i * l0.cols() + j] {
                w[i * new_dim + k] += l0.weight(i, j);
                m[i * new_dim + k] = true;
            }
        }
    }
    let mut layers = net.layers().to_vec();
    layers[0] = Layer::with_mask(rows, new_dim, w, m, l0.bias().to_vec())?;
    NeuralNet::new(layers, net.activation())
}

/// Adds `shift` to the output of `net`.
pub(crate) fn add_output_bias(net: &NeuralNet, shift: &[f64]) -> Result<NeuralNet> {
    check_dim(net.output_dim(), shift.len())?;
    let mut out = net.clone();
    let n = out.layers().len();
    let (_, _, b) = out.layers_mut()[n - 1].parts_mut();
    for (bi, s) in b.iter_mut().zip(shift) {
        *bi += s;
    }
    Ok(out)
}
