use crate::constructions::{mult_net_relu, mult_net_repu, CertifiedNet};
use crate::error::{Error, Result};
use crate::nn::{parallelize, plain_concat, sparse_concat, Activation, Layer, NeuralNet};

/// Binary multiplication tree in pieces: the padding layer and one network per
/// level, with the magnitude bound asserted for the inputs of each level.
#[derive(Clone, Debug)]
pub struct ProdTree {
    pub pad: NeuralNet,
    pub levels: Vec<NeuralNet>,
    /// `bounds[l]` bounds every value entering level `l`.
    pub bounds: Vec<f64>,
    pub level_delta: f64,
}

impl ProdTree {
    /// Values entering each level followed by the final output.
    pub fn level_values(&self, y: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut cur = self.pad.eval(y)?;
        let mut out = vec![cur.clone()];
        for level in &self.levels {
            cur = level.eval(&cur)?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    pub fn into_net(self) -> Result<NeuralNet> {
        let mut iter = self.levels.into_iter();
        let first = iter.next().expect("at least one level");
        let mut net = plain_concat(&first, &self.pad)?;
        for level in iter {
            net = sparse_concat(&level, &net)?;
        }
        Ok(net)
    }
}

/// Builds the multiplication tree for `n` inputs in `[-d, d]`.
///
/// Inputs are padded with ones up to the next power of two. For ReLU each
/// level uses approximate multipliers with budget `delta / (N~^2 d^{2 N~})`
/// on the domain `2^l d^{2^l}`; for RePU(2) the multipliers are exact.
pub fn prod_tree(n: usize, delta: f64, d: f64, act: Activation) -> Result<ProdTree> {
    if n < 2 {
        return Err(Error::input("product needs at least two factors"));
    }
    let padded = n.next_power_of_two();
    let levels_count = padded.trailing_zeros() as usize;
    let mut w = vec![0.0; padded * n];
    let mut b = vec![0.0; padded];
    for i in 0..padded {
        if i < n {
            w[i * n + i] = 1.0;
        } else {
            b[i] = 1.0;
        }
    }
    let pad = NeuralNet::new(vec![Layer::new(padded, n, w, b)?], act)?;

    let (level_delta, bounds) = match act {
        Activation::Relu => {
            if !(delta > 0.0 && delta < 0.5) {
                return Err(Error::input(format!("product budget must lie in (0, 1/2), got {delta}")));
            }
            if !(d >= 1.0) || !d.is_finite() {
                return Err(Error::input(format!("product domain bound must be at least 1, got {d}")));
            }
            let ln_dp = (padded as f64).ln() * 2.0 + 2.0 * padded as f64 * d.ln();
            let level_delta = delta * (-ln_dp).exp();
            if !(level_delta >= f64::EPSILON) {
                return Err(Error::InfeasibleBudget(format!(
                    "per-multiplier budget {level_delta:.3e} is below machine precision"
                )));
            }
            let mut bounds = Vec::with_capacity(levels_count);
            let mut err = 0.0f64;
            for l in 0..levels_count {
                let exact = d.powi(1 << l);
                let bound = 2f64.powi(l as i32) * exact;
                if exact + err > bound * (1.0 + 1e-12) {
                    return Err(Error::InfeasibleBudget(format!("level {l} leaves its domain bound")));
                }
                bounds.push(bound);
                err = 2.0 * bound * err + err * err + level_delta;
            }
            if err > delta {
                return Err(Error::InfeasibleBudget(format!("accumulated error {err:.3e} exceeds {delta:.3e}")));
            }
            (level_delta, bounds)
        }
        Activation::Repu { q } => {
            mult_net_repu(q)?;
            (0.0, vec![f64::INFINITY; levels_count])
        }
    };

    let mut levels = Vec::with_capacity(levels_count);
    for (l, &bound) in bounds.iter().enumerate() {
        let m = match act {
            Activation::Relu => mult_net_relu(level_delta, bound)?,
            Activation::Repu { q } => mult_net_repu(q)?,
        };
        let copies = padded >> (l + 1);
        let refs: Vec<&NeuralNet> = std::iter::repeat_n(&m.net, copies).collect();
        levels.push(parallelize(&refs)?);
    }
    Ok(ProdTree { pad, levels, bounds, level_delta })
}

/// Approximate product of `n` numbers in `[-d, d]` with sup error `delta`.
pub fn prod_net_relu(n: usize, delta: f64, d: f64) -> Result<CertifiedNet> {
    let tree = prod_tree(n, delta, d, Activation::Relu)?;
    let mut notes = vec![("level_delta".to_string(), tree.level_delta), ("padded".to_string(), n.next_power_of_two() as f64)];
    notes.extend(tree.bounds.iter().enumerate().map(|(l, b)| (format!("level_bound_{l}"), *b)));
    let mut c = CertifiedNet::new(tree.into_net()?, delta, d);
    c.notes = notes;
    Ok(c)
}

/// Exact product of `n` numbers with a RePU(2) network.
pub fn prod_net_repu(n: usize, q: u32) -> Result<CertifiedNet> {
    let tree = prod_tree(n, 0.0, f64::INFINITY, Activation::Repu { q })?;
    let mut c = CertifiedNet::new(tree.into_net()?, 0.0, f64::INFINITY);
    c.notes = vec![("padded".to_string(), n.next_power_of_two() as f64)];
    Ok(c)
}
