//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stdout so it shows up without `--nocapture`.

use std::f64::consts::{LN_2, PI, TAU};
use std::io::Write;
use std::time::Instant;

use framenet::constructions::{
    legendre_net, mult_net_relu, mult_net_repu, poly_net, prod_net_relu, prod_net_repu, tensor_legendre_net,
    MultiIndex, MultiIndexSet,
};
use framenet::darcy::{energy, solve_darcy, DarcyConfig, ScalarField, TorusGrid};
use framenet::erm::{
    fit_loglog_slope, predict_delta_n, rate_study, regression_study, surrogate_study, torus_rate, DeltaRegime,
    RegressionConfig, StudyConfig, SurrogateStudyConfig, TorusPipeline,
};
use framenet::framenet::{allocate_truncations, entropy_bound, EntropyInputs};
use framenet::nn::{perturb_params, Activation, NeuralNet};
use framenet::rng::stream_rng;
use rand::Rng;

fn report(criterion: &str, passed: bool, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{status} [{criterion}] {detail}").unwrap();
    out.flush().unwrap();
    assert!(passed, "{criterion}: {detail}");
}

fn uniform_points(dim: usize, n: usize, half_width: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, 0xacc);
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(-half_width..=half_width)).collect()).collect()
}

fn sup_error(net: &NeuralNet, points: &[Vec<f64>], reference: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    points
        .iter()
        .map(|x| {
            let got = net.eval(x).unwrap();
            got.iter().zip(reference(x)).map(|(g, r)| (g - r).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Normalized Legendre polynomial from the explicit sum
/// `P_n(x) = 2^-n sum_k C(n,k)^2 (x-1)^(n-k) (x+1)^k`.
fn legendre_oracle(n: usize, x: f64) -> f64 {
    let p: f64 = (0..=n as u64)
        .map(|k| binomial(n as u64, k).powi(2) * (x - 1.0).powi((n as u64 - k) as i32) * (x + 1.0).powi(k as i32))
        .sum::<f64>()
        / 2f64.powi(n as i32);
    (2.0 * n as f64 + 1.0).sqrt() * p
}

#[test]
fn relu_multiplication_certificate() {
    let mut ok = true;
    let mut detail = Vec::new();
    for (delta, d) in [(1e-2, 2.0), (1e-3, 4.0)] {
        let start = Instant::now();
        let cert = mult_net_relu(delta, d).unwrap();
        let step = 2.0 * d / 200.0;
        let grid: Vec<Vec<f64>> =
            (0..201).flat_map(|i| (0..201).map(move |j| vec![-d + i as f64 * step, -d + j as f64 * step])).collect();
        let err = sup_error(&cert.net, &grid, |x| vec![x[0] * x[1]]);
        let mpar = cert.net.metrics().mpar;
        let secs = start.elapsed().as_secs_f64();
        ok &= err <= delta && mpar <= 1.0 && secs < 5.0;
        detail.push(format!("delta={delta:e} D={d}: err {err:.2e}, mpar {mpar}, {secs:.2}s"));
    }
    report("multiplication certificate", ok, &detail.join("; "));
}

#[test]
fn repu_exactness() {
    let mut worst = 0.0f64;
    let mult = mult_net_repu(2).unwrap();
    worst = worst.max(sup_error(&mult.net, &uniform_points(2, 10_000, 1.0, 1), |x| vec![x[0] * x[1]]));
    for n in 2..=8 {
        let net = prod_net_repu(n, 2).unwrap();
        let err = sup_error(&net.net, &uniform_points(n, 10_000, 1.0, n as u64), |x| vec![x.iter().product()]);
        worst = worst.max(err);
    }
    let mut rng = stream_rng(3, 0);
    let line = uniform_points(1, 10_000, 1.0, 9);
    for degree in 0..=6 {
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let net = poly_net(&coeffs, 0.0, 1.0, Activation::Repu { q: 2 }).unwrap();
        let err = sup_error(&net.net, &line, |x| {
            vec![coeffs.iter().enumerate().map(|(k, c)| c * x[0].powi(k as i32)).sum()]
        });
        worst = worst.max(err);
    }
    report(
        "RePU(2) exactness",
        worst <= 1e-10,
        &format!("max error {worst:.2e} over multiplier, products N<=8 and polynomials of degree <=6"),
    );
}

#[test]
fn legendre_certificates() {
    let mut ok = true;
    let mut max_mpar = 0.0f64;
    let line: Vec<Vec<f64>> = (0..2001).map(|i| vec![-1.0 + i as f64 / 1000.0]).collect();
    let mut worst_ratio = 0.0f64;
    for j in 0..=8 {
        let net = legendre_net(j, 1e-3, Activation::Relu).unwrap();
        let err = sup_error(&net.net, &line, |x| vec![legendre_oracle(j, x[0])]);
        worst_ratio = worst_ratio.max(err / 1e-3);
        ok &= err <= 1e-3;
        max_mpar = max_mpar.max(net.net.metrics().mpar);
    }
    let lambda = MultiIndexSet::new(vec![
        MultiIndex::zero(),
        MultiIndex::unit(0),
        MultiIndex::unit(1),
        MultiIndex::from_dense(&[2, 0]),
        MultiIndex::from_dense(&[1, 1]),
        MultiIndex::from_dense(&[3, 0]),
    ])
    .unwrap();
    let shape_ok = lambda.len() == 6 && lambda.effective_dim() == 2 && lambda.max_order() == 3;
    let tensor = tensor_legendre_net(&lambda, 1e-2, Activation::Relu).unwrap();
    let pts = uniform_points(2, 10_000, 1.0, 4);
    let tensor_err = sup_error(&tensor.net, &pts, |y| {
        lambda
            .indices()
            .iter()
            .map(|nu| legendre_oracle(nu.get(0) as usize, y[0]) * legendre_oracle(nu.get(1) as usize, y[1]))
            .collect()
    });
    max_mpar = max_mpar.max(tensor.net.metrics().mpar);
    for other in [mult_net_relu(1e-2, 1.0).unwrap(), prod_net_relu(4, 1e-2, 1.0).unwrap()] {
        max_mpar = max_mpar.max(other.net.metrics().mpar);
    }
    ok &= shape_ok && tensor_err <= 1e-2 && max_mpar <= 1.0;
    report(
        "Legendre certificates",
        ok,
        &format!(
            "univariate worst err/delta {worst_ratio:.3}; tensor |Lambda|=6 err {tensor_err:.2e}; max ReLU mpar {max_mpar}"
        ),
    );
}

#[test]
fn entropy_perturbation_property() {
    let start = Instant::now();
    let mut violations = 0;
    let mut worst_ratio = 0.0f64;
    for trial in 0..100u64 {
        let mut rng = stream_rng(17, trial);
        let depth = rng.random_range(1..=3usize);
        let dims: Vec<usize> = (0..depth + 2).map(|_| rng.random_range(1..=6usize)).collect();
        let width = *dims.iter().max().unwrap();
        let mut net = NeuralNet::zeros_dense(&dims, Activation::Relu).unwrap();
        let params: Vec<f64> = (0..net.param_len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        net.set_params(&params).unwrap();
        let pts = uniform_points(dims[0], 200, 1.0, trial);
        for eps in [1e-3, 1e-2] {
            let moved = perturb_params(&net, eps, 1.0, &mut rng);
            let change = pts
                .iter()
                .map(|x| {
                    let a = net.eval(x).unwrap();
                    let b = moved.eval(x).unwrap();
                    a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            let bound = eps * (depth as f64 + 1.0) * ((width + 1) as f64).powi(depth as i32 + 1);
            worst_ratio = worst_ratio.max(change / bound);
            if change > bound {
                violations += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "entropy-perturbation property",
        violations == 0 && secs < 30.0,
        &format!("200 trials, {violations} violations, worst change/bound {worst_ratio:.3}, {secs:.2}s"),
    );
}

#[test]
fn entropy_formulas() {
    let (l2, l3, l5) = (LN_2, 3f64.ln(), 5f64.ln());
    let relu = Activation::Relu;
    let repu = Activation::Repu { q: 2 };
    // (s, L, p, M, frame bound, delta, activation, value worked out by prime
    // factorization of the argument).
    let cases = [
        (2, 1, 2, 1.0, 1.0, 0.5, relu, 3.0 * 13.0 * l2),
        (0, 1, 1, 1.0, 1.0, 1.0, relu, 7.0 * l2),
        (5, 2, 4, 1.0, 1.0, 1.0, relu, 6.0 * 22.0 * l2),
        (3, 2, 3, 2.0, 1.0, 0.25, relu, 4.0 * (15.0 * l2 + 6.0 * l3)),
        (1, 3, 2, 1.0, 2.0, 2.0, relu, 2.0 * (17.0 * l2 + 2.0 * l3)),
        (10, 1, 6, 1.0, 1.0, 1e-3, relu, 11.0 * (15.0 * l2 + 5.0 * l3 + 3.0 * l5)),
        (1, 1, 1, 1.0, 1.0, 1.0, repu, 2.0 * 67.0 * l2),
        (0, 1, 2, 1.0, 1.0, 0.5, repu, 132.0 * l2),
        (2, 2, 1, 1.0, 3.0, 1.0, repu, 3.0 * (261.0 * l2 + l3)),
        (4, 1, 3, 2.0, 1.0, 0.1, repu, 5.0 * (132.0 * l2 + 64.0 * l3 + l5)),
    ];
    let mut worst = 0.0f64;
    for (s, l, p, m, frame_upper, delta, act, expected) in cases {
        let got = entropy_bound(EntropyInputs { depth: l, width: p, size: s, m }, frame_upper, delta, act);
        worst = worst.max(((got - expected) / expected).abs());
    }
    let worked = (entropy_bound(EntropyInputs { depth: 1, width: 2, size: 2, m: 1.0 }, 1.0, 0.5, relu), entropy_bound(
        EntropyInputs { depth: 1, width: 1, size: 1, m: 1.0 },
        1.0,
        1.0,
        repu,
    ));
    let worked_ok = (worked.0 - 27.03).abs() < 5e-3 && (worked.1 - 92.88).abs() < 5e-3;
    report(
        "entropy formulas",
        worst <= 1e-9 && worked_ok,
        &format!("10 cases, worst relative error {worst:.1e}; worked values {:.2} and {:.2}", worked.0, worked.1),
    );
}

/// Smooth but not band-limited coefficient with a right-hand side computed in
/// closed form, so the discretization error is visible.
fn analytic_darcy(n: usize) -> (f64, f64, f64) {
    let grid = TorusGrid::new(2, n).unwrap();
    let a = grid.sample(|x| 1.0 + 0.5 / (1.2 + (TAU * x[0]).cos()) + 0.3 * (TAU * x[1]).sin());
    let u = grid.sample(|x| (TAU * x[0]).sin() * (TAU * x[1]).cos() + 0.3 * (TAU * x[1]).sin());
    let f = grid.sample(|x| {
        let (sx, cx) = (TAU * x[0]).sin_cos();
        let (sy, cy) = (TAU * x[1]).sin_cos();
        let a = 1.0 + 0.5 / (1.2 + cx) + 0.3 * sy;
        let ax = 0.5 * TAU * sx / (1.2 + cx).powi(2);
        let ay = 0.3 * TAU * cy;
        let ux = TAU * cx * cy;
        let uy = -TAU * sx * sy + 0.3 * TAU * cy;
        let lap = -8.0 * PI * PI * sx * cy - 0.3 * 4.0 * PI * PI * sy;
        -(ax * ux + ay * uy + a * lap)
    });
    let mean = f.mean();
    let f = ScalarField::new(grid, f.values.iter().map(|v| v - mean).collect()).unwrap();
    let start = Instant::now();
    let sol = solve_darcy(&a, &f, 1e-13).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let err = sol.u.sub(&u).unwrap().l2_norm() / u.l2_norm();
    let (e, w) = energy(&a, &sol.u, &f).unwrap();
    (err, ((e - w) / w).abs(), secs)
}

#[test]
fn darcy_solver() {
    let (e16, _, t16) = analytic_darcy(16);
    let (e32, _, t32) = analytic_darcy(32);
    let (e64, energy_gap, t64) = analytic_darcy(64);
    let ok = e64 <= 1e-7 && energy_gap <= 1e-6 && e16 / e32 >= 10.0 && t16.max(t32).max(t64) < 2.0;
    report(
        "Darcy solver",
        ok,
        &format!(
            "errors 16^2 {e16:.2e}, 32^2 {e32:.2e}, 64^2 {e64:.2e}; energy gap {energy_gap:.1e}; slowest solve {:.3}s",
            t16.max(t32).max(t64)
        ),
    );
}

#[test]
fn rate_calculators() {
    // (d, t0, s, r0, kappa), tabulated once with exact rational arithmetic at
    // tau2 = 1/4.
    let table = [
        (2, 0.0, 4.0, 1.25, 1.0),
        (2, 0.0, 8.0, 3.5, 3.5),
        (2, 0.0, 3.5, 1.25, 1.0),
        (2, 0.0, 5.0, 1.25, 1.0),
        (2, 0.5, 4.0, 1.25, 0.5),
        (2, 0.5, 6.0, 2.75, 2.25),
        (3, 0.0, 5.0, 1.75, 2.0 / 3.0),
        (3, 0.0, 9.0, 4.0, 7.0 / 3.0),
        (3, 0.5, 5.5, 1.75, 1.0 / 3.0),
        (4, 0.0, 7.0, 2.25, 0.5),
        (4, 0.0, 12.0, 5.5, 2.25),
        (3, 0.0, 7.0, 1.75, 2.0 / 3.0),
    ];
    let start = Instant::now();
    let mut mismatches = 0;
    let mut sub_parametric = true;
    for (d, t0, s, r0, kappa) in table {
        let got = torus_rate(s, d, t0, 0.25, TorusPipeline::L2).unwrap();
        if (got.r0 - r0).abs() > 1e-12 || (got.kappa - kappa).abs() > 1e-12 {
            mismatches += 1;
        }
        sub_parametric &= got.rate < 1.0 && (got.rate - kappa / (kappa + 1.0)).abs() < 1e-12;
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "rate calculators",
        mismatches == 0 && sub_parametric && secs < 0.1,
        &format!("12 cases, {mismatches} mismatches, all rates below 1: {sub_parametric}"),
    );
}

#[test]
fn delta_n_scaling() {
    let start = Instant::now();
    let grid = [100usize, 1_000, 10_000, 100_000, 1_000_000];
    let slope = |regime: DeltaRegime| {
        let rows: Vec<(f64, f64)> =
            grid.iter().map(|&n| (n as f64, predict_delta_n(1, n, 1.0, 1.0, regime).unwrap().powi(2))).collect();
        fit_loglog_slope(&rows).unwrap()
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.5, 1.0] {
        let s = slope(DeltaRegime::EntropyPower { alpha });
        let target = -2.0 / (2.0 + alpha);
        ok &= (s - target).abs() <= 0.05;
        detail.push(format!("alpha {alpha}: {s:.4} vs {target:.4}"));
    }
    let s = slope(DeltaRegime::Chaining);
    ok &= (-1.05..=-0.75).contains(&s);
    detail.push(format!("parametric: {s:.4} in [-1, -0.8]"));
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 10.0;
    report("delta_n scaling", ok, &format!("{}; {secs:.2}s", detail.join(", ")));
}

#[test]
fn regression_trend() {
    let start = Instant::now();
    let cfg = RegressionConfig::default();
    let study = regression_study(|x| (TAU * x).sin(), &cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let grid_ok = cfg.n_grid == [128, 256, 512, 1024, 2048, 4096] && cfg.reps == 5;
    let inversions = study.inversions();
    let ok = grid_ok && inversions <= 1 && study.fitted_slope <= -0.4 && secs < 600.0;
    let means: Vec<String> = study.summary.iter().map(|s| format!("{:.2e}", s.mean_mse)).collect();
    report(
        "finite-dimensional regression trend",
        ok,
        &format!("mean mse [{}], {inversions} inversions, slope {:.3}, {secs:.1}s", means.join(", "), study.fitted_slope),
    );
}

#[test]
fn operator_learning_trend() {
    let start = Instant::now();
    let problem_cfg = DarcyConfig::default();
    let problem = problem_cfg.build().unwrap();
    let kappa = torus_rate(problem_cfg.s, problem_cfg.d, problem_cfg.t0, problem_cfg.tau2, TorusPipeline::L2)
        .unwrap()
        .kappa;
    let setup_ok = problem_cfg.d == 2
        && problem_cfg.s == 4.0
        && problem_cfg.t0 == 0.0
        && problem.input_modes() <= 13
        && problem.output_modes() <= 13;

    let cfg = StudyConfig::default();
    let study = rate_study(&problem, &cfg, kappa).unwrap();
    let budgets_ok = cfg.n_grid == [100, 400, 1600]
        && cfg.reps == 3
        && study.summary.iter().all(|s| s.big_n == (s.n as f64).sqrt().ceil() as usize);
    let means: Vec<f64> = study.summary.iter().map(|s| s.mean_mse).collect();
    let decreasing = means.windows(2).all(|w| w[1] < w[0]);
    let ratio = means[means.len() - 1] / means[0];

    let points = surrogate_study(&problem, &SurrogateStudyConfig::default()).unwrap();
    let surrogate_ok = points.iter().map(|p| p.big_n).eq([4, 8, 16])
        && points.windows(2).all(|w| w[1].mse <= w[0].mse + 2.0 * (w[0].se.powi(2) + w[1].se.powi(2)).sqrt());
    let secs = start.elapsed().as_secs_f64();

    let ok = setup_ok && budgets_ok && decreasing && ratio <= 1.0 / 3.0 && surrogate_ok && secs < 3600.0;
    let fmt = |v: &[f64]| v.iter().map(|m| format!("{m:.2e}")).collect::<Vec<_>>().join(", ");
    let surrogate: Vec<f64> = points.iter().map(|p| p.mse).collect();
    report(
        "operator-learning trend",
        ok,
        &format!(
            "learned mse [{}] (final/first {ratio:.3}); surrogate mse over N=4,8,16 [{}]; {secs:.0}s",
            fmt(&means),
            fmt(&surrogate)
        ),
    );
}

/// Exhaustive minimum of the weighted tail over all allocations with the
/// given total, written independently of the library.
fn brute_force(c: &[Vec<f64>], w: &[f64], total: usize) -> f64 {
    fn go(c: &[Vec<f64>], w: &[f64], left: usize) -> f64 {
        match c.split_first() {
            None if left == 0 => 0.0,
            None => f64::INFINITY,
            Some((row, rest)) => (0..=row.len().min(left))
                .map(|m| {
                    let tail: f64 = row[m..].iter().map(|v| v * v).sum();
                    w[0].sqrt() * tail.sqrt() + go(rest, &w[1..], left - m)
                })
                .fold(f64::INFINITY, f64::min),
        }
    }
    go(c, w, total)
}

#[test]
fn allocation_oracle() {
    let start = Instant::now();
    let mut cases = 0;
    let mut mismatches = 0;
    let mut rng = stream_rng(5, 0);
    for rows in 1..=3 {
        for cols in 1..=4 {
            for _ in 0..20 {
                let c: Vec<Vec<f64>> =
                    (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
                let w: Vec<f64> = (0..rows).map(|_| rng.random_range(0.1..=3.0)).collect();
                for budget in 0..=4 {
                    let alloc = allocate_truncations(&c, &w, budget).unwrap();
                    let total = budget.min(rows * cols);
                    let best = brute_force(&c, &w, total);
                    let obj: f64 = c
                        .iter()
                        .zip(&w)
                        .zip(&alloc.m)
                        .map(|((row, wi), &m)| wi.sqrt() * row[m..].iter().map(|v| v * v).sum::<f64>().sqrt())
                        .sum();
                    cases += 1;
                    if alloc.m.iter().sum::<usize>() != total || (obj - best).abs() > 1e-12 * (1.0 + best) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "allocation oracle",
        mismatches == 0 && secs < 5.0,
        &format!("{cases} tables and budgets, {mismatches} mismatches, {secs:.2}s"),
    );
}
