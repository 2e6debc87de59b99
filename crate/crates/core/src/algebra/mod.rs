//! Finite fields, polynomials and the small amount of series arithmetic the
//! curve code needs.

pub mod embed;
pub mod field;
pub mod multipoly;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod series;

pub use embed::{embed, Embedding};
pub use field::{Fe, FiniteField};
pub use multipoly::MPoly;
pub use poly::Poly;
pub use ratfunc::RationalFunction;
pub use series::Series;
