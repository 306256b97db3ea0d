mod frame_coding {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/frame_coding.rs"));
}

#[test]
fn frame_coding_example_runs() {
    frame_coding::run_example().expect("frame coding example should run");
}

mod certified_networks {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/certified_networks.rs"));
}

#[test]
fn certified_networks_example_runs() {
    certified_networks::run_example().expect("certified networks example should run");
}

mod darcy_solver {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/darcy_solver.rs"));
}

#[test]
fn darcy_solver_example_runs() {
    darcy_solver::run_example().expect("darcy solver example should run");
}

mod rate_calculators {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rate_calculators.rs"));
}

#[test]
fn rate_calculators_example_runs() {
    rate_calculators::run_example().expect("rate calculators example should run");
}

mod sieve_regression {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sieve_regression.rs"));
}

#[test]
fn sieve_regression_example_runs() {
    sieve_regression::run_example().expect("sieve regression example should run");
}

mod operator_learning {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/operator_learning.rs"));
}

#[test]
fn operator_learning_example_runs() {
    operator_learning::run_example().expect("operator learning example should run");
}

mod constructive_surrogate {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/constructive_surrogate.rs"));
}

#[test]
fn constructive_surrogate_example_runs() {
    constructive_surrogate::run_example().expect("constructive surrogate example should run");
}

mod perturbation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/perturbation.rs"));
}

#[test]
fn perturbation_example_runs() {
    perturbation::run_example().expect("perturbation example should run");
}
