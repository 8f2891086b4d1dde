//! Divided differences, Fréchet derivatives of matrix and spectral functions
//! up to third order, their integral representations, and finite-difference
//! oracles.

pub mod bound;
pub mod divided;
pub mod fd;
pub mod frechet;
pub mod functions;
pub mod quadrature;
pub mod sendov;

pub use bound::{bentkus_d3_bound_check, DerivativeReport};
pub use divided::divided_diff;
pub use fd::{fd_matrix_d1, fd_matrix_d2, fd_spectral_oracle, FdEstimate};
pub use frechet::{frechet_d1, frechet_d2, spectral_d1, spectral_d2};
pub use functions::{
    CustomFunction, MultivariateSymmetricFunction, Partials, ProductFunction, ScalarFunction, SeparableFunction,
};
pub use quadrature::{d2_gauss_integral, dyson_d1_exp, gauss_legendre};
pub use sendov::{frechet_d3_spectral, sendov_tensors, D3Options, SendovCoefficients, TERM_MULTIPLICITY};
