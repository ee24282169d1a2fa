//! Exact field arithmetic and dense matrices.

pub mod field;
pub mod matrix;

pub use field::{Field, FieldSpec, Scalar};
pub use matrix::{ExactMatrix, PowerTail, RankFactorization, RankProfile};
