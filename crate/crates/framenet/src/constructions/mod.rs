//! Certified network constructions: products, polynomials and tensorized
//! Legendre polynomials, in ReLU (approximate) and RePU(2) (exact) variants.

mod certified;
mod legendre;
mod multi_index;
mod mult;
mod poly;
mod product;
mod tensor;

pub use certified::{cube_corners, grid_points, mc_points, sup_error, CertifiedNet, VerifyReport};
pub use legendre::{legendre_eval, legendre_monomial_coeffs, legendre_net};
pub use multi_index::{MultiIndex, MultiIndexSet};
pub use mult::{mult_net_relu, mult_net_repu, MULT_RELU_WIDTH};
pub use poly::poly_net;
pub use product::{prod_net_relu, prod_net_repu, prod_tree, ProdTree};
pub use tensor::{tensor_legendre_net, tensor_legendre_net_with_dim};
