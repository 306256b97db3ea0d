// Rate exponents for learning the Darcy operator, critical radii of the
// chaining condition and entropy bounds of network classes.
//
// ```bash
// cargo run -p framenet --example rate_calculators
// ```

use framenet::erm::{fit_loglog_slope, predict_delta_n, torus_rate, DeltaRegime, TorusPipeline};
use framenet::framenet::{entropy_bound, EntropyInputs};
use framenet::nn::Activation;
use framenet::Result;

pub fn run_example() -> Result<()> {
    println!(" d    s   t0     r0  kappa  rate");
    for (d, s, t0) in [(2, 4.0, 0.0), (2, 8.0, 0.0), (2, 6.0, 0.5), (3, 6.0, 0.0)] {
        let r = torus_rate(s, d, t0, 0.25, TorusPipeline::L2)?;
        println!("{d:>2} {s:>4} {t0:>4} {:>6.3} {:>6.3} {:>5.3}", r.r0, r.kappa, r.rate);
    }

    let grid = [100usize, 1_000, 10_000, 100_000, 1_000_000];
    for (name, regime) in [
        ("parametric chaining", DeltaRegime::Chaining),
        ("entropy power 0.5", DeltaRegime::EntropyPower { alpha: 0.5 }),
        ("entropy power 1", DeltaRegime::EntropyPower { alpha: 1.0 }),
    ] {
        let rows = grid
            .iter()
            .map(|&n| Ok((n as f64, predict_delta_n(1, n, 1.0, 1.0, regime)?.powi(2))))
            .collect::<Result<Vec<_>>>()?;
        println!("{name}: delta_n^2 at n = 1e6 is {:.3e}, log-log slope {:.3}", rows[4].1, fit_loglog_slope(&rows)?);
    }

    let class = EntropyInputs { depth: 3, width: 8, size: 60, m: 1.0 };
    for delta in [1e-1, 1e-3] {
        println!(
            "entropy of the depth-3 width-8 class at delta {delta:e}: relu {:.2}, repu {:.2}",
            entropy_bound(class, 1.0, delta, Activation::Relu),
            entropy_bound(class, 1.0, delta, Activation::Repu { q: 2 })
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
