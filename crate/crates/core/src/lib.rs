//! Exact construction, certification and brute-force cross-checking of
//! Mathieu-Zhao subspaces of matrix algebras `M_n(F)`.
//!
//! A subspace `V` of an algebra `A` is a Mathieu-Zhao subspace (MS) when, for
//! every `a` whose powers all lie in `V`, the products `b·a^m·c` eventually lie in
//! `V` for all `b, c`. For proper subspaces of `M_n(F)` this is equivalent to `V`
//! containing no nonzero idempotent, which is the criterion most of this crate is
//! built around.

pub mod algebra;
pub mod census;
pub mod classify2;
pub mod constructions;
pub mod error;
pub mod literal;
pub mod maximality;
pub mod mscore;
mod scan;
pub mod subspace;

pub use algebra::{ExactMatrix, Field, FieldSpec, PowerTail, RankFactorization, RankProfile, Scalar};
pub use error::{Error, Result};
pub use mscore::{MaximalityVerdict, MsStatus, MsVerdict};
pub use subspace::MatSubspace;
