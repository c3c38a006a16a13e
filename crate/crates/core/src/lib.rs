//! Matrix-coefficient superoperator algebra for multi-mode bosonic Lindblad
//! dynamics with thermal damping.
//!
//! The crate is generic over the real scalar type (`f32` or `f64`); the
//! aliases at the bottom fix the common `f64` instantiation.

pub mod algebra;
pub mod coeff;
pub mod error;
pub mod fock;
pub mod identities;
pub mod liouvillian;
pub mod sample;
pub mod scalar;
pub mod spectrum;

pub use algebra::{commutator, expr_add, expr_scale, similarity_kpm, GeneratorKind, Sign, SuperOpExpr};
pub use coeff::CoeffMatrix;
pub use error::{Error, Result, SpecViolation};
pub use fock::{DensityMatrix, FockCutoff, SuperOpMatrix};
pub use liouvillian::{
    build_liouvillian, conjugate, diagonalize, solve_riccati, transform_once, transform_twice, zero_order,
    DiagonalizationResult, SystemSpec, TransformIntermediate,
};
pub use scalar::Real;
pub use spectrum::{SectorIndex, SectorMatrix};

pub type Complex64 = num_complex::Complex<f64>;

pub type CoeffMatrixF64 = CoeffMatrix<f64>;
pub type SuperOpExprF64 = SuperOpExpr<f64>;
pub type SystemSpecF64 = SystemSpec<f64>;
pub type DensityMatrixF64 = DensityMatrix<f64>;
pub type SuperOpMatrixF64 = SuperOpMatrix<f64>;
pub type SectorMatrixF64 = SectorMatrix<f64>;
pub type DiagonalizationResultF64 = DiagonalizationResult<f64>;

pub type CoeffMatrixF32 = CoeffMatrix<f32>;
pub type SuperOpExprF32 = SuperOpExpr<f32>;
pub type SystemSpecF32 = SystemSpec<f32>;
