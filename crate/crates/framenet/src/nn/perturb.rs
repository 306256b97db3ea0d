use rand::Rng;

use crate::nn::NeuralNet;

/// Sup-norm change guaranteed for ReLU networks of depth `l`, width `p` and
/// parameter bound `m` when every parameter moves by at most `eps`:
/// `eps (L+1) M^L (p+1)^(L+1)`.
pub fn perturbation_bound(l: usize, p: usize, m: f64, eps: f64) -> f64 {
    eps * (l as f64 + 1.0) * m.powi(l as i32) * (p as f64 + 1.0).powi(l as i32 + 1)
}

/// RePU analogue of [`perturbation_bound`]:
/// `eps L q^(L+q) (2pM)^(4 q^(2L+2)) / (2 M sqrt(p) (p^2+p) (L+1))`.
///
/// Evaluated in log space; the result is `+inf` when it overflows.
pub fn perturbation_bound_repu(l: usize, p: usize, m: f64, eps: f64, q: u32) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    let (lf, pf, qf) = (l as f64, p as f64, q as f64);
    let log = eps.ln() + lf.ln() + (lf + qf) * qf.ln() + 4.0 * qf.powf(2.0 * lf + 2.0) * (2.0 * pf * m).ln()
        - (2.0 * m * pf.sqrt() * (pf * pf + pf) * (lf + 1.0)).ln();
    log.exp()
}

/// Moves every parameter by an independent amount in `[-eps, eps]`, keeping
/// the result inside `[-m, m]` and respecting the mask.
pub fn perturb_params<R: Rng + ?Sized>(net: &NeuralNet, eps: f64, m: f64, rng: &mut R) -> NeuralNet {
    let mask = net.param_mask();
    let p: Vec<f64> = net
        .params()
        .iter()
        .zip(&mask)
        .map(|(v, &keep)| if keep { (v + rng.random_range(-eps..=eps)).clamp(-m, m) } else { 0.0 })
        .collect();
    let mut out = net.clone();
    out.set_params(&p).expect("same layout");
    out
}
