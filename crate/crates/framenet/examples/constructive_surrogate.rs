// Constructive surrogate of the Darcy operator: Legendre coefficients of the
// output coordinates over the parameter cube, an optimal allocation of output
// modes, and a ReLU network assembled from certified Legendre blocks.
//
// ```bash
// cargo run -p framenet --example constructive_surrogate
// ```

use framenet::constructions::MultiIndexSet;
use framenet::darcy::DarcyConfig;
use framenet::erm::{FnPredictor, TestSet};
use framenet::framenet::{allocate_truncations, build_constructive_surrogate, estimate_legendre_coeffs, Quadrature};
use framenet::nn::Activation;
use framenet::Result;

pub fn run_example() -> Result<()> {
    let problem = DarcyConfig { n_per_dim: 16, input_modes: 5, output_modes: 5, ..Default::default() }.build()?;
    let dim = problem.input_modes();
    let lambda = MultiIndexSet::anisotropic(dim, 1.0, 2.0).truncate(8);
    let table = estimate_legendre_coeffs(
        |u| problem.operator_cube(u),
        &lambda,
        dim,
        problem.output_modes(),
        Quadrature::MonteCarlo { samples: 2000, seed: 1 },
    )?;
    let alloc = allocate_truncations(&table.c, &table.weights(), 8)?;
    println!("{} Legendre indices, allocation {:?}, weighted tail {:.3e}", lambda.len(), alloc.m, alloc.objective);

    let (model, report) = build_constructive_surrogate(
        &table,
        &alloc.m,
        0.05,
        Activation::Relu,
        problem.x_basis.frame.clone(),
        problem.scaling.clone(),
        problem.y_basis.frame.clone(),
    )?;
    println!("surrogate network: {} terms, size {}, mpar {}", report.terms, report.metrics.size, report.metrics.mpar);

    let truth = FnPredictor(|x: &[f64]| problem.operator(x));
    let test = TestSet::draw(&truth, &problem.scaling, &problem.x_basis.frame, 100, 5)?;
    let (mse, se) = test.error(&model)?;
    println!("surrogate mse {mse:.3e} +- {se:.1e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
