use crate::constructions::{mult_net_relu, mult_net_repu, CertifiedNet};
use crate::error::{Error, Result};
use crate::nn::{
    add_output_bias, constant_net, identity_net, parallelize, scalar_mult_net, sparse_concat, with_input_map, Activation,
    Layer, NeuralNet,
};

/// Replaces input `j` of `net` by the constant `value`, folding it into the first bias.
fn fix_input(net: &NeuralNet, j: usize, value: f64) -> Result<NeuralNet> {
    let l0 = &net.layers()[0];
    let (rows, cols) = (l0.rows(), l0.cols());
    let mut w = Vec::with_capacity(rows * (cols - 1));
    let mut m = Vec::with_capacity(rows * (cols - 1));
    let mut b = l0.bias().to_vec();
    for i in 0..rows {
        for k in 0..cols {
            if k == j {
                b[i] += l0.weight(i, k) * value;
            } else {
                w.push(l0.weight(i, k));
                m.push(l0.mask()[i * cols + k]);
            }
        }
    }
    let mut layers = net.layers().to_vec();
    layers[0] = Layer::with_mask(rows, cols - 1, w, m, b)?;
    NeuralNet::new(layers, net.activation())
}

/// Network evaluating `sum_i coeffs[i] x^i` on `[-d, d]`.
///
/// Horner's scheme runs on the coefficients divided by
/// `a = max(1, max_i |coeffs[i]|)` and the result is scaled back by `a` at the
/// end. With ReLU each multiplication gets budget `delta / (a sum_{k<m} d^k)`
/// and a domain covering the running Horner value; with RePU(2) every step is
/// exact.
pub fn poly_net(coeffs: &[f64], delta: f64, d: f64, act: Activation) -> Result<CertifiedNet> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::input("polynomial coefficients must be finite"));
    }
    if !(d >= 1.0) || !d.is_finite() {
        return Err(Error::input(format!("polynomial domain bound must be at least 1, got {d}")));
    }
    let relu = act == Activation::Relu;
    if relu && !(delta > 0.0 && delta < 0.5) {
        return Err(Error::input(format!("polynomial budget must lie in (0, 1/2), got {delta}")));
    }
    let degree = coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0);
    let coeffs = if coeffs.is_empty() { &[0.0][..] } else { &coeffs[..=degree] };
    let a_inf = coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let scaled: Vec<f64> = coeffs.iter().map(|c| c / a_inf).collect();

    let scale_back = |net: NeuralNet| -> Result<NeuralNet> {
        if a_inf > 1.0 {
            sparse_concat(&scalar_mult_net(a_inf, 1, act)?, &net)
        } else {
            Ok(net)
        }
    };

    if degree == 0 {
        let net = scale_back(constant_net(&[scaled[0]], 1, 0, act)?)?;
        let mut c = CertifiedNet::new(net, 0.0, d);
        c.notes = vec![("scale".into(), a_inf)];
        return Ok(c);
    }

    let step_delta = if relu { delta / (a_inf * (0..degree).map(|k| d.powi(k as i32)).sum::<f64>()) } else { 0.0 };
    // tail[k] bounds the exact Horner value at step k on [-d, d].
    let mut tail = vec![0.0; degree + 1];
    for k in (0..=degree).rev() {
        tail[k] = scaled[k].abs() + if k < degree { d * tail[k + 1] } else { 0.0 };
    }

    let mut net: Option<NeuralNet> = None;
    let mut err = 0.0f64;
    let mut domains = Vec::with_capacity(degree);
    for k in (0..degree).rev() {
        let dom = d.max(tail[k + 1] + err);
        let mult = if relu { mult_net_relu(step_delta, dom)? } else { mult_net_repu(match act {
            Activation::Repu { q } => q,
            Activation::Relu => unreachable!(),
        })? };
        domains.push(dom);
        err = step_delta + d * err;
        let step = if k == 0 {
            with_input_map(&mult.net, 2, &[0, 1])?
        } else {
            let id = identity_net(1, mult.net.depth(), act)?;
            with_input_map(&parallelize(&[&id, &mult.net])?, 2, &[0, 0, 1])?
        };
        let out_bias = if k == 0 { vec![scaled[0]] } else { vec![0.0, scaled[k]] };
        let step = add_output_bias(&step, &out_bias)?;
        net = Some(match net {
            None => fix_input(&step, 1, scaled[degree])?,
            Some(prev) => sparse_concat(&step, &prev)?,
        });
    }
    let net = scale_back(net.expect("degree at least one"))?;
    let mut c = CertifiedNet::new(net, if relu { delta } else { 0.0 }, d);
    c.notes = vec![("scale".into(), a_inf), ("step_delta".into(), step_delta)];
    c.notes.extend(domains.iter().enumerate().map(|(i, v)| (format!("step_domain_{i}"), *v)));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::grid_points;

    fn horner(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, a| acc * x + a)
    }

    #[test]
    fn constant_polynomials() {
        for a0 in [0.0, 0.7, -3.5] {
            for act in [Activation::Relu, Activation::Repu { q: 2 }] {
                let p = poly_net(&[a0], 1e-2, 1.0, act).unwrap();
                assert_eq!(p.certified_sup_error, 0.0);
                for x in [-1.0, 0.3, 1.0] {
                    assert!((p.eval(&[x]).unwrap()[0] - a0).abs() < 1e-15);
                }
            }
        }
        assert_eq!(poly_net(&[0.7, 0.0], 1e-2, 1.0, Activation::Relu).unwrap().net.depth(), 0);
    }

    #[test]
    fn relu_square() {
        let p = poly_net(&[0.0, 0.0, 1.0], 1e-3, 1.0, Activation::Relu).unwrap();
        assert!((p.eval(&[0.5]).unwrap()[0] - 0.25).abs() <= 1e-3);
        assert!(p.net.metrics().mpar <= 1.0);
    }

    #[test]
    fn relu_certificates() {
        let cases: [(&[f64], f64, f64); 4] = [
            (&[0.0, 0.0, 1.0], 1e-3, 1.0),
            (&[0.0, -1.0, 0.0, 3.0], 1e-2, 2.0),
            (&[5.0, -4.0, 0.5, 2.0, -1.5], 1e-3, 1.0),
            (&[0.1, 0.2], 1e-4, 3.0),
        ];
        for (c, delta, d) in cases {
            let p = poly_net(c, delta, d, Activation::Relu).unwrap();
            let r = p.verify(&grid_points(1, 2001, d), |x| vec![horner(c, x[0])]).unwrap();
            assert!(r.passed, "{c:?}: {r:?}");
            assert!(p.net.metrics().mpar <= 1.0);
        }
    }

    #[test]
    fn repu_exact_horner() {
        let p = poly_net(&[0.0, -1.0, 0.0, 3.0], 0.0, 1.0, Activation::Repu { q: 2 }).unwrap();
        assert!((p.eval(&[2.0]).unwrap()[0] - 22.0).abs() < 1e-11);
        let r = p.verify(&grid_points(1, 401, 1.0), |x| vec![horner(&[0.0, -1.0, 0.0, 3.0], x[0])]).unwrap();
        assert!(r.passed);
    }
}
