//! Feedforward networks with exact metric accounting and the composition
//! calculus used by the certified constructions.

mod calculus;
mod grad;
mod net;
mod perturb;

pub use calculus::{identity_net, parallelize, scalar_mult_net, sparse_concat, summation_net, SM_MPAR_BOUND};
pub(crate) use calculus::{add_output_bias, constant_net, pad_depth, plain_concat, with_input_map};
pub use grad::{backprop, grad, ForwardTrace};
pub use net::{Activation, Layer, NetData, NetMetrics, NeuralNet};
pub use perturb::{perturb_params, perturbation_bound, perturbation_bound_repu};
