//! The FrameNet operator class `D_Y . g . S_r . E_X`: model assembly,
//! architecture schedules, entropy bounds and the constructive surrogate built
//! from estimated Legendre coefficients.

mod allocation;
mod architecture;
mod coefficients;
mod entropy;
mod model;
mod surrogate;

pub use allocation::{allocate_truncations, weighted_tail, Allocation};
pub use architecture::{make_architecture, Architecture, ArchitectureConfig, Family};
pub use coefficients::{estimate_legendre_coeffs, gauss_legendre, CoefficientTable, Quadrature};
pub use entropy::{entropy_bound, log_entropy_argument, EntropyInputs};
pub use model::{FrameNetModel, ModelData, StageOutputs};
pub use surrogate::{build_constructive_surrogate, rho_schedule, SurrogateReport};
