//! Pseudorandom generators for regular positive spectrahedra, the Bentkus
//! spectral mollifier, third-order Fréchet derivatives of spectral functions,
//! and Monte-Carlo harnesses for the associated probabilistic bounds.
//!
//! Dense linear algebra and the spectrahedron model are generic over
//! [`Scalar`] (`f32` or `f64`); the mollifier, the spectral derivative
//! formulas and the estimators work in `f64`.

pub mod error;
pub mod estimators;
pub mod instance;
pub mod linalg;
pub mod mollifier;
pub mod normal;
pub mod prg;
pub mod scalar;
pub mod spectrahedron;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{eig_sym, eigvals_sym, lambda_max, lambda_min, EigDecomposition, Mat, SymMatrix};
pub use scalar::Scalar;
pub use spectrahedron::{
    check_regularity, pack_intersection, CubeFunction, Declared, PositiveSpectrahedron, RegularityReport, Sign,
    Spectrahedron, SpectrahedronPair,
};

pub type SymMatrixF64 = SymMatrix<f64>;
pub type SymMatrixF32 = SymMatrix<f32>;
pub type EigDecompositionF64 = EigDecomposition<f64>;
pub type PositiveSpectrahedronF64 = PositiveSpectrahedron<f64>;
pub type PositiveSpectrahedronF32 = PositiveSpectrahedron<f32>;
pub type SpectrahedronPairF64 = SpectrahedronPair<f64>;
