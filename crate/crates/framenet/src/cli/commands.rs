use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::config::{ExperimentConfig, SolveInput};
use crate::cli::verify::certificate_suite;
use crate::darcy::{energy, Dataset, DarcyProblem};
use crate::erm::{
    budget_schedule, predict_delta_n, rate_study, surrogate_study, torus_rate, train_erm, FnPredictor, StudyConfig,
    TestSet, TorusPipeline,
};
use crate::error::{Error, Result};

/// Subcommands of the experiment runner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Rate exponents and critical radii tables.
    Rates,
    /// One Darcy solve with a residual and energy report.
    Solve,
    /// Noisy dataset generation.
    GenData,
    /// Constructive surrogates of the Darcy operator and the certificate suite.
    Construct,
    /// One empirical risk minimization run.
    Train,
    /// Rate study over a grid of sample sizes.
    Study,
    /// All constructive-network certificates.
    Verify,
}

/// Runs `command` with the artifacts written into `out`, returning a short
/// human-readable report.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    write_json(&out.join("config.json"), cfg)?;
    match command {
        Command::Rates => rates(cfg, out),
        Command::Solve => solve(cfg, out),
        Command::GenData => gen_data(cfg, out),
        Command::Construct => construct(cfg, out),
        Command::Train => train(cfg, out),
        Command::Study => study(cfg, out),
        Command::Verify => verify(cfg, out),
    }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RateRow {
    s: f64,
    d: usize,
    t0: f64,
    tau2: f64,
    r0: f64,
    r: f64,
    kappa: f64,
    rate: f64,
    high_smoothness: bool,
}

#[derive(Serialize)]
struct DeltaRow {
    n: usize,
    delta: f64,
    delta_sq: f64,
}

fn rates(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let rc = &cfg.rates;
    let mut report = String::from("s\td\tt0\tr0\tkappa\trate\n");
    let mut rows = Vec::with_capacity(rc.cases.len());
    for case in &rc.cases {
        let tr = torus_rate(case.s, case.d, case.t0, rc.tau2, rc.pipeline)?;
        writeln!(report, "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}", case.s, case.d, case.t0, tr.r0, tr.kappa, tr.rate).unwrap();
        rows.push(RateRow {
            s: case.s,
            d: case.d,
            t0: case.t0,
            tau2: rc.tau2,
            r0: tr.r0,
            r: tr.r,
            kappa: tr.kappa,
            rate: tr.rate,
            high_smoothness: tr.high_smoothness,
        });
    }
    write_csv(&out.join("rates.csv"), &rows)?;

    let dc = &rc.delta;
    let deltas = dc
        .n_grid
        .iter()
        .map(|&n| {
            let delta = predict_delta_n(dc.n_params, n, dc.sigma, dc.c, dc.regime)?;
            Ok(DeltaRow { n, delta, delta_sq: delta * delta })
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(&out.join("delta_n.csv"), &deltas)?;
    writeln!(report, "delta_n at {} sample sizes written", deltas.len()).unwrap();
    Ok(report)
}

#[derive(Serialize)]
struct SolveReport {
    grid: usize,
    iterations: usize,
    relative_residual: f64,
    energy: f64,
    work: f64,
    min_permeability: f64,
    output_coords: Vec<f64>,
}

fn solve(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let problem = cfg.problem.build()?;
    let x = match cfg.solve.input {
        SolveInput::Zero => vec![0.0; problem.input_modes()],
        SolveInput::Random => problem.sample_input(&mut ChaCha8Rng::seed_from_u64(cfg.seed))?.1,
    };
    let a = problem.permeability(&x)?;
    let sol = problem.solve(&x)?;
    let (e, w) = energy(&a, &sol.u, &problem.f)?;
    let report = SolveReport {
        grid: problem.grid.n,
        iterations: sol.iterations,
        relative_residual: sol.relative_residual,
        energy: e,
        work: w,
        min_permeability: a.min(),
        output_coords: problem.operator(&x)?,
    };
    write_json(&out.join("solve.json"), &report)?;
    if cfg.solve.write_field {
        let mut wtr = csv::Writer::from_path(out.join("solution.csv"))?;
        let header: Vec<String> = (0..problem.grid.d).map(|k| format!("x{k}")).chain(["a".into(), "u".into()]).collect();
        wtr.write_record(&header)?;
        for idx in 0..problem.grid.len() {
            let mut rec: Vec<String> = problem.grid.point(idx).iter().map(|p| format!("{p:e}")).collect();
            rec.push(format!("{:e}", a.values[idx]));
            rec.push(format!("{:e}", sol.u.values[idx]));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
    }
    Ok(format!(
        "solved on {}^{} in {} iterations, relative residual {:.2e}, energy {:.6e}, work {:.6e}\n",
        problem.grid.n, problem.grid.d, sol.iterations, sol.relative_residual, e, w
    ))
}

fn gen_data(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let problem = cfg.problem.build()?;
    let dc = &cfg.data;
    let data = problem.generate_dataset(dc.samples, dc.sigma, dc.noise, cfg.seed)?;
    let dir = out.join("data");
    data.save(&dir)?;
    Ok(format!(
        "{} samples with {} input and {} output modes written to {}",
        data.len(),
        data.input_modes(),
        data.output_modes(),
        dir.display()
    ))
}

fn construct(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let problem = cfg.problem.build()?;
    let points = surrogate_study(&problem, &cfg.surrogate)?;
    write_csv(&out.join("surrogate.csv"), &points)?;
    let checks = certificate_suite(cfg.seed)?;
    write_csv(&out.join("certificates.csv"), &checks)?;
    let mut report = String::from("N\trho\tterms\tsize\tmse\n");
    for p in &points {
        writeln!(report, "{}\t{:.4}\t{}\t{}\t{:.3e}", p.big_n, p.rho, p.terms, p.size, p.mse).unwrap();
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(report, "{} certificates, {} failed", checks.len(), failed).unwrap();
    if failed > 0 {
        return Err(Error::Verification(format!("{failed} certificates failed; see certificates.csv")));
    }
    Ok(report)
}

fn problem_kappa(cfg: &ExperimentConfig) -> Result<f64> {
    let p = &cfg.problem;
    Ok(torus_rate(p.s, p.d, p.t0, p.tau2, TorusPipeline::L2)?.kappa)
}

fn load_or_generate(cfg: &ExperimentConfig, problem: &DarcyProblem) -> Result<Dataset> {
    match &cfg.data.dir {
        Some(dir) => Dataset::load(dir),
        None => problem.generate_dataset(cfg.data.samples, cfg.data.sigma, cfg.data.noise, cfg.seed),
    }
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    samples: usize,
    budget: usize,
    test_mse: f64,
    test_se: f64,
    report: &'a crate::erm::TrainReport,
}

fn train(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let problem = cfg.problem.build()?;
    let data = load_or_generate(cfg, &problem)?;
    let budget = match cfg.train.budget {
        Some(b) => b,
        None => budget_schedule(data.len(), problem_kappa(cfg)?),
    };
    let fit = train_erm(
        &cfg.architecture,
        budget,
        &data,
        &cfg.training,
        &problem.x_basis.frame,
        &problem.scaling,
        &problem.y_basis.frame,
    )?;
    let truth = FnPredictor(|x: &[f64]| problem.operator(x));
    let test = TestSet::draw(&truth, &problem.scaling, &problem.x_basis.frame, cfg.train.mc_samples, cfg.seed ^ 0x7e57)?;
    let (mse, se) = test.error(&fit.model)?;
    fit.model.save(&out.join("model.json"))?;
    let summary = TrainSummary { samples: data.len(), budget, test_mse: mse, test_se: se, report: &fit.report };
    write_json(&out.join("train.json"), &summary)?;
    Ok(format!(
        "budget {budget}: depth {}, width {}, empirical risk {:.4e}, test mse {mse:.4e} (se {se:.1e})",
        fit.report.depth, fit.report.width, fit.report.best_risk
    ))
}

fn study(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let problem = cfg.problem.build()?;
    let kappa = problem_kappa(cfg)?;
    let sc = StudyConfig { seed: cfg.seed, ..cfg.study.clone() };
    let result = rate_study(&problem, &sc, kappa)?;
    result.write_csv(&out.join("study.csv"))?;
    result.write_summary(&out.join("summary.json"))?;
    let mut report = String::from("n\tN\tmean_mse\tsd\n");
    for s in &result.summary {
        writeln!(report, "{}\t{}\t{:.4e}\t{:.2e}", s.n, s.big_n, s.mean_mse, s.sd).unwrap();
    }
    writeln!(
        report,
        "fitted slope {:.3}, predicted {:.3} (kappa {kappa})",
        result.fitted_slope, result.theoretical_slope
    )
    .unwrap();
    Ok(report)
}

fn verify(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let checks = certificate_suite(cfg.seed)?;
    write_csv(&out.join("certificates.csv"), &checks)?;
    let mut report = String::new();
    for c in &checks {
        let status = if c.passed { "ok" } else { "FAIL" };
        writeln!(
            report,
            "{status:4} {:28} max error {:.3e} <= {:.1e}, mpar {:.3}, {:.2}s",
            c.name, c.max_error, c.tolerance, c.mpar, c.seconds
        )
        .unwrap();
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Error::Verification(format!("{failed} of {} certificates failed\n{report}", checks.len())));
    }
    writeln!(report, "all {} certificates passed", checks.len()).unwrap();
    Ok(report)
}
