// Finite-dimensional regression baseline: a Fourier sieve fitted by least
// squares to noisy samples of `sin(2 pi x)`, with the sieve dimension growing
// with the sample size.
//
// ```bash
// cargo run -p framenet --example sieve_regression
// ```

use std::f64::consts::TAU;

use framenet::erm::{regression_study, RegressionConfig};
use framenet::Result;

pub fn run_example() -> Result<()> {
    let cfg = RegressionConfig { n_grid: vec![128, 256, 512, 1024], reps: 3, ..Default::default() };
    let study = regression_study(|x| (TAU * x).sin(), &cfg)?;
    println!("    n  terms  mean mse");
    for s in &study.summary {
        println!("{:>5} {:>6} {:>9.3e}", s.n, s.big_n, s.mean_mse);
    }
    println!("fitted slope {:.3}, predicted {:.3}", study.fitted_slope, study.theoretical_slope);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
