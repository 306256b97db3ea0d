use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng::seeded;

/// Activation applied after every hidden affine layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Repu { q: u32 },
}

impl Activation {
    pub fn repu(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::input("RePU power must be at least 2"));
        }
        Ok(Activation::Repu { q })
    }

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Repu { q } => {
                if x > 0.0 {
                    x.powi(q as i32)
                } else {
                    0.0
                }
            }
        }
    }

    /// Derivative, with the ReLU kink assigned slope 0.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Repu { q } => {
                if x > 0.0 {
                    q as f64 * x.powi(q as i32 - 1)
                } else {
                    0.0
                }
            }
        }
    }
}

/// One affine map `x -> W x + b` with a structural mask on `W`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    mask: Vec<bool>,
    bias: Vec<f64>,
}

impl Layer {
    /// Layer whose mask marks exactly the nonzero weights.
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        let mask = weights.iter().map(|w| *w != 0.0).collect();
        Self::with_mask(rows, cols, weights, mask, bias)
    }

    /// Layer with every weight trainable.
    pub fn dense(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        Self::with_mask(rows, cols, weights, vec![true; rows * cols], bias)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            mask: vec![false; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    pub fn with_mask(rows: usize, cols: usize, weights: Vec<f64>, mask: Vec<bool>, bias: Vec<f64>) -> Result<Self> {
        check_dim(rows * cols, weights.len())?;
        check_dim(rows * cols, mask.len())?;
        check_dim(rows, bias.len())?;
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::input("layer parameters must be finite"));
        }
        if weights.iter().zip(&mask).any(|(w, m)| !m && *w != 0.0) {
            return Err(Error::input("masked-out weights must be exactly zero"));
        }
        Ok(Self { rows, cols, weights, mask, bias })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.cols + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &[bool], &mut [f64]) {
        (&mut self.weights, &self.mask, &mut self.bias)
    }

    #[inline]
    pub(crate) fn affine_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(&self.bias);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.weights[i * self.cols..(i + 1) * self.cols];
            let mut acc = 0.0;
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            *o += acc;
        }
    }

    fn size(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count() + self.bias.iter().filter(|b| **b != 0.0).count()
    }

    fn mpar(&self) -> f64 {
        self.weights.iter().chain(&self.bias).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Size, depth, width and largest parameter magnitude of a network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetMetrics {
    pub depth: usize,
    pub width: usize,
    pub size: usize,
    pub mpar: f64,
}

/// Feedforward network: hidden layers apply the activation, the last layer is affine.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuralNet {
    layers: Vec<Layer>,
    activation: Activation,
}

impl NeuralNet {
    pub fn new(layers: Vec<Layer>, activation: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::input("a network needs at least one affine layer"));
        }
        if let Activation::Repu { q } = activation {
            if q < 2 {
                return Err(Error::input("RePU power must be at least 2"));
            }
        }
        for w in layers.windows(2) {
            check_dim(w[0].rows, w[1].cols)?;
        }
        Ok(Self { layers, activation })
    }

    /// Fully connected network with all parameters zero and every weight trainable.
    pub fn zeros_dense(dims: &[usize], activation: Activation) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::input("need input and output dimensions"));
        }
        let layers = dims
            .windows(2)
            .map(|w| Layer::dense(w[1], w[0], vec![0.0; w[0] * w[1]], vec![0.0; w[1]]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers, activation)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.rows).unwrap_or(0)
    }

    /// Number of hidden activation layers.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Dimensions `p_0, ..., p_{L+1}`.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.input_dim()];
        d.extend(self.layers.iter().map(|l| l.rows));
        d
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim(), x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            layer.affine_into(&cur, &mut next);
            if l < last {
                for v in next.iter_mut() {
                    *v = self.activation.apply(*v);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    pub fn metrics(&self) -> NetMetrics {
        NetMetrics {
            depth: self.depth(),
            width: self.dims().into_iter().max().unwrap_or(0),
            size: self.layers.iter().map(Layer::size).sum(),
            mpar: self.layers.iter().map(Layer::mpar).fold(0.0, f64::max),
        }
    }

    /// Lower estimate of `sup ||f(x)||_2` over `[-1,1]^{p_0}`.
    ///
    /// Uses a Latin hypercube of `samples` points and, for input dimension at
    /// most 12, every corner of the cube.
    pub fn mran_estimate(&self, samples: usize, seed: u64) -> f64 {
        let p0 = self.input_dim();
        let norm = |x: &[f64]| self.eval_unchecked(x).iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut best: f64 = 0.0;
        let mut rng = seeded(seed);
        let samples = samples.max(1);
        let mut columns: Vec<Vec<usize>> = (0..p0)
            .map(|_| {
                let mut perm: Vec<usize> = (0..samples).collect();
                for i in (1..samples).rev() {
                    let j = rng.random_range(0..=i);
                    perm.swap(i, j);
                }
                perm
            })
            .collect();
        let mut x = vec![0.0; p0];
        for s in 0..samples {
            for (k, col) in columns.iter_mut().enumerate() {
                let cell = col[s] as f64;
                let t: f64 = rng.random();
                x[k] = -1.0 + 2.0 * (cell + t) / samples as f64;
            }
            best = best.max(norm(&x));
        }
        if p0 <= 12 {
            for corner in 0..(1usize << p0) {
                for (k, v) in x.iter_mut().enumerate() {
                    *v = if corner >> k & 1 == 1 { 1.0 } else { -1.0 };
                }
                best = best.max(norm(&x));
            }
        }
        best
    }

    /// Number of trainable entries in the flattened parameter layout
    /// (per layer: weights row-major, then biases).
    pub fn param_len(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.param_len());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.bias);
        }
        p
    }

    /// Overwrites parameters from the flattened layout; masked weights stay zero.
    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        check_dim(self.param_len(), p.len())?;
        let mut off = 0;
        for l in &mut self.layers {
            for (k, w) in l.weights.iter_mut().enumerate() {
                *w = if l.mask[k] { p[off + k] } else { 0.0 };
            }
            off += l.weights.len();
            let nb = l.bias.len();
            l.bias.copy_from_slice(&p[off..off + nb]);
            off += nb;
        }
        Ok(())
    }

    /// Flattened mask: `true` for every trainable entry.
    pub fn param_mask(&self) -> Vec<bool> {
        let mut m = Vec::with_capacity(self.param_len());
        for l in &self.layers {
            m.extend_from_slice(&l.mask);
            m.extend(std::iter::repeat_n(true, l.bias.len()));
        }
        m
    }

    pub fn to_data(&self) -> NetData {
        NetData {
            activation: self.activation,
            dims: self.dims(),
            layers: self
                .layers
                .iter()
                .map(|l| LayerData {
                    weights: l.weights.clone(),
                    mask: l.mask.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                    bias: l.bias.clone(),
                })
                .collect(),
        }
    }

    pub fn from_data(data: &NetData) -> Result<Self> {
        check_dim(data.dims.len(), data.layers.len() + 1)?;
        let layers = data
            .layers
            .iter()
            .enumerate()
            .map(|(k, ld)| {
                let mask = ld
                    .mask
                    .chars()
                    .map(|c| match c {
                        '1' => Ok(true),
                        '0' => Ok(false),
                        _ => Err(Error::input(format!("layer {k}: mask must contain only 0 and 1"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Layer::with_mask(data.dims[k + 1], data.dims[k], ld.weights.clone(), mask, ld.bias.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers, data.activation)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerData {
    weights: Vec<f64>,
    mask: String,
    bias: Vec<f64>,
}

/// Serialized network: activation, shape header `dims`, row-major weights and
/// masks as bitstrings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetData {
    activation: Activation,
    dims: Vec<usize>,
    layers: Vec<LayerData>,
}

impl Serialize for NeuralNet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_data().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NeuralNet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let data = NetData::deserialize(d)?;
        NeuralNet::from_data(&data).map_err(serde::de::Error::custom)
    }
}
