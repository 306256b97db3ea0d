// Learning the Darcy coefficient-to-solution operator by empirical risk
// minimization over an encoder, coefficient network and decoder, evaluated
// by its mean-square error under the input measure.
//
// ```bash
// cargo run -p framenet --example operator_learning
// ```

use framenet::darcy::{DarcyConfig, NoiseModel};
use framenet::erm::{budget_schedule, torus_rate, train_erm, FnPredictor, TestSet, TorusPipeline, TrainConfig};
use framenet::framenet::ArchitectureConfig;
use framenet::Result;

pub fn run_example() -> Result<()> {
    let cfg = DarcyConfig { n_per_dim: 16, input_modes: 5, output_modes: 5, ..Default::default() };
    let problem = cfg.build()?;
    let kappa = torus_rate(cfg.s, cfg.d, cfg.t0, cfg.tau2, TorusPipeline::L2)?.kappa;

    let truth = FnPredictor(|x: &[f64]| problem.operator(x));
    let test = TestSet::draw(&truth, &problem.scaling, &problem.x_basis.frame, 100, 99)?;
    let zero = FnPredictor(|_: &[f64]| Ok(vec![0.0; problem.y_basis.frame.ref_dim()]));
    println!("mse of the zero predictor: {:.3e}", test.error(&zero)?.0);

    let arch = ArchitectureConfig { c_l: 1.0, c_p: 1.0, ..Default::default() };
    let training = TrainConfig { epochs: 150, restarts: 2, ..Default::default() };
    for n in [50, 200] {
        let data = problem.generate_dataset(n, 1e-3, NoiseModel::White, n as u64)?;
        let budget = budget_schedule(n, kappa);
        let fit = train_erm(
            &arch,
            budget,
            &data,
            &training,
            &problem.x_basis.frame,
            &problem.scaling,
            &problem.y_basis.frame,
        )?;
        let (mse, se) = test.error(&fit.model)?;
        println!(
            "n = {n:>3}, N = {budget:>2}: depth {}, width {}, empirical risk {:.3e}, test mse {mse:.3e} +- {se:.1e}",
            fit.report.depth, fit.report.width, fit.report.best_risk
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
