// Constructive networks with certified sup-norm errors: the ReLU multiplier,
// exact RePU products, ReLU Legendre polynomials and a tensorized Legendre
// network, each verified against its reference function.
//
// ```bash
// cargo run -p framenet --example certified_networks
// ```

use framenet::constructions::{
    grid_points, legendre_eval, legendre_net, mc_points, mult_net_relu, prod_net_repu, tensor_legendre_net,
    MultiIndexSet,
};
use framenet::nn::Activation;
use framenet::Result;

pub fn run_example() -> Result<()> {
    let mult = mult_net_relu(1e-3, 2.0)?;
    let report = mult.verify(&grid_points(2, 101, 2.0), |x| vec![x[0] * x[1]])?;
    let m = mult.net.metrics();
    println!(
        "relu multiplier on [-2, 2]^2: max error {:.2e} <= {:.0e}, depth {}, size {}, mpar {}",
        report.max_error, report.tolerance, m.depth, m.size, m.mpar
    );
    assert!(report.passed);

    let prod = prod_net_repu(5, 2)?;
    let report = prod.verify(&mc_points(5, 2000, 1.5, 1), |x| vec![x.iter().product()])?;
    println!("repu product of 5 factors: max error {:.2e}", report.max_error);
    assert!(report.passed);

    for j in [2, 5, 8] {
        let net = legendre_net(j, 1e-3, Activation::Relu)?;
        let report = net.verify(&grid_points(1, 2001, 1.0), |x| vec![legendre_eval(j, x[0])])?;
        println!("relu Legendre degree {j}: max error {:.2e}, size {}", report.max_error, net.net.metrics().size);
        assert!(report.passed);
    }

    // Downward-closed anisotropic index set in three variables.
    let lambda = MultiIndexSet::anisotropic(3, 1.0, 3.0);
    let net = tensor_legendre_net(&lambda, 1e-2, Activation::Relu)?;
    let reference = |y: &[f64]| lambda.indices().iter().map(|nu| nu.legendre(y)).collect::<Vec<_>>();
    let report = net.verify(&mc_points(3, 2000, 1.0, 2), reference)?;
    println!(
        "tensor Legendre net with {} outputs: max error {:.2e}, mpar {}",
        lambda.len(),
        report.max_error,
        net.net.metrics().mpar
    );
    assert!(report.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
