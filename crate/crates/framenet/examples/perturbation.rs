// Stability of ReLU networks under parameter perturbations: every parameter
// moves by at most `eps` and the sampled sup-norm change stays below the
// bound used for covering numbers.
//
// ```bash
// cargo run -p framenet --example perturbation
// ```

use framenet::constructions::mc_points;
use framenet::nn::{perturb_params, perturbation_bound, Activation, NeuralNet};
use framenet::rng::stream_rng;
use framenet::Result;
use rand::Rng;

pub fn run_example() -> Result<()> {
    let points = mc_points(3, 500, 1.0, 3);
    for (trial, dims) in [vec![3, 6, 1], vec![3, 5, 5, 2], vec![3, 4, 6, 6, 1]].into_iter().enumerate() {
        let mut rng = stream_rng(11, trial as u64);
        let mut net = NeuralNet::zeros_dense(&dims, Activation::Relu)?;
        let params: Vec<f64> = (0..net.param_len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        net.set_params(&params)?;
        let depth = dims.len() - 2;
        let width = *dims.iter().max().expect("nonempty");
        for eps in [1e-3, 1e-2] {
            let moved = perturb_params(&net, eps, 1.0, &mut rng);
            let mut worst = 0.0f64;
            for x in &points {
                let a = net.eval(x)?;
                let b = moved.eval(x)?;
                worst = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(worst, f64::max);
            }
            let bound = perturbation_bound(depth, width, 1.0, eps);
            println!("dims {dims:?}, eps {eps:e}: sampled change {worst:.3e} <= bound {bound:.3e}");
            assert!(worst <= bound);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
