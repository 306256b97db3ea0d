//! Periodic Darcy flow `-div((abar + a) grad u) = f` on the d-torus: grids,
//! spectral differentiation, a preconditioned conjugate-gradient solver,
//! field/basis transforms and noisy dataset generation.

mod dataset;
mod grid;
mod problem;
mod solver;
mod spectral;
mod transform;

pub use dataset::{noise_vector, Dataset, DatasetMeta, NoiseModel};
pub use grid::{ScalarField, TorusGrid};
pub use problem::{DarcyConfig, DarcyProblem};
pub use solver::{energy, manufactured_rhs, solve_darcy, DarcySolution, DEFAULT_TOL};
pub use spectral::Spectral;
pub use transform::{check_resolution, coords_to_field, field_to_coords, field_to_xi, xi_to_field};
