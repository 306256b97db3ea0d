// Spectral Darcy solver on the torus: a manufactured solution, grid
// convergence, the energy identity and a small noisy dataset of the
// coefficient-to-solution operator.
//
// ```bash
// cargo run -p framenet --example darcy_solver
// ```

use std::f64::consts::TAU;

use framenet::darcy::{energy, manufactured_rhs, solve_darcy, DarcyConfig, NoiseModel, TorusGrid};
use framenet::Result;

fn manufactured_error(n: usize) -> Result<f64> {
    let grid = TorusGrid::new(2, n)?;
    let a = grid.sample(|x| 2.0 + (TAU * x[0]).cos() * (TAU * x[1]).sin());
    let u = grid.sample(|x| (TAU * x[0]).sin() * (TAU * 2.0 * x[1]).cos() + 0.5 * (TAU * x[1]).sin());
    let f = manufactured_rhs(&a, &u)?;
    let sol = solve_darcy(&a, &f, 1e-12)?;
    let (e, w) = energy(&a, &sol.u, &f)?;
    println!("  {n}x{n}: {} iterations, energy {e:.8}, work {w:.8}", sol.iterations);
    Ok(sol.u.sub(&u)?.l2_norm() / u.l2_norm())
}

pub fn run_example() -> Result<()> {
    println!("manufactured solution with a smooth coefficient:");
    for n in [8, 16, 32] {
        println!("  relative error on {n}x{n}: {:.2e}", manufactured_error(n)?);
    }

    let cfg = DarcyConfig { n_per_dim: 16, input_modes: 5, output_modes: 5, ..Default::default() };
    let problem = cfg.build()?;
    println!(
        "Darcy problem: {} input modes, {} output modes, input radius {:.4}",
        problem.input_modes(),
        problem.output_modes(),
        problem.scaling.radius
    );
    let data = problem.generate_dataset(8, 1e-3, NoiseModel::White, 42)?;
    let dir = std::env::temp_dir().join("framenet-darcy-example");
    data.save(&dir)?;
    println!("{} noisy samples written to {}", data.len(), dir.display());
    let first = &data.truth.as_ref().expect("generated data keeps the truth")[0];
    println!("first output coordinates: {:?}", &first[..3]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
