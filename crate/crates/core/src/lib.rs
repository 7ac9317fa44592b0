//! Exact-arithmetic toolkit for p-ary plateaued functions and the
//! few-weight linear codes they generate.
//!
//! Everything is computed over the integers: Walsh transform values live in
//! the cyclotomic ring Z[ξ_p] represented by integer coefficient vectors, so
//! classification (plateau amplitude, sign partitions, regularity) never
//! touches floating point. On top of the spectral layer sit two code
//! constructions, closed-form weight-distribution predictions, power-moment
//! analysis of dual codes, and Massey-style secret sharing.

pub mod codes;
pub mod field;
pub mod funcspace;
pub mod sss;
pub mod theory;
pub mod walsh;

pub use field::{CycInt, FieldCtx, WalshForm};
pub use funcspace::{FunctionTable, PolyExpr};
pub use theory::WeightDistribution;
pub use walsh::{PlateauProfile, WalshSpectrum};
