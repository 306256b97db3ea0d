//! Operator learning between truncated Hilbert spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`hilbert`]: frames, duals, the torus basis and the cube scaling maps.
//! * [`nn`]: feedforward networks with exact size/depth/width/mpar accounting and
//!   the composition calculus used by the constructions.
//! * [`constructions`]: certified ReLU and RePU networks for products,
//!   polynomials and tensorized Legendre polynomials.
//! * [`framenet`]: the encoder/net/decoder operator class, architecture
//!   schedules, entropy bounds and the constructive surrogate.
//! * [`darcy`]: a spectral Darcy solver on the torus and dataset generation.
//! * [`erm`]: empirical risks, training, error metrics, rate studies and rate
//!   calculators.
//! * [`cli`]: config-driven experiment runner behind the `framenet` binary.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod constructions;
pub mod darcy;
pub mod erm;
mod error;
pub mod framenet;
pub mod hilbert;
pub mod nn;
pub mod rng;

pub use error::{Error, Result};
