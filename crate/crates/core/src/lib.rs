//! Pointless curves over finite fields: construction, point counting,
//! zeta functions and the searches that find them.

pub mod algebra;
pub mod curves;
pub mod density;
pub mod elliptic;
pub mod error;
pub mod harness;
pub mod search;
pub mod zeta;

pub use error::{Error, Result};
