//! Truncated Hilbert spaces: frames, dual frames, the torus sine/cosine basis,
//! smoothness weights and the cube scaling maps.

mod frame;
mod scaling;
mod torus;

pub use frame::{CoefficientVector, Frame, FrameData, DEGENERATE_CONDITION};
pub use scaling::{sample_uniform_cube, smooth_norm, ScaledCoefficients, ScalingMap, SmoothnessWeights};
pub use torus::{torus_basis, xi_1d, TorusBasis};
