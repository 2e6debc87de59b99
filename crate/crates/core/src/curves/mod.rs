//! Curve models with genus bookkeeping and exact point counts over F_{q^i}.

mod artin_schreier;
mod fiber;
mod hyperelliptic;
mod quartic;
mod tower;
mod trigonal;

pub use artin_schreier::ArtinSchreierCurve;
pub use fiber::{FiberProduct, FiberProductProperties};
pub use hyperelliptic::HyperellipticOdd;
pub use quartic::PlaneQuartic;
pub use tower::AsTower;
pub use trigonal::{TrigonalCurve, TrigonalShape};

use rayon::prelude::*;

use crate::algebra::{embed, Embedding, Fe, FiniteField};
use crate::error::{Error, Result};

/// Largest extension field enumerated point by point.
pub const COUNT_LIMIT: u64 = 1 << 30;

/// Any of the supported models.
#[derive(Clone, Debug)]
pub enum Curve {
    Hyperelliptic(HyperellipticOdd),
    ArtinSchreier(ArtinSchreierCurve),
    Quartic(PlaneQuartic),
    FiberProduct(FiberProduct),
    Tower(AsTower),
    Trigonal(TrigonalCurve),
}

impl Curve {
    pub fn base(&self) -> &FiniteField {
        match self {
            Curve::Hyperelliptic(c) => c.base(),
            Curve::ArtinSchreier(c) => c.base(),
            Curve::Quartic(c) => c.base(),
            Curve::FiberProduct(c) => c.base(),
            Curve::Tower(c) => c.base(),
            Curve::Trigonal(c) => c.base(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Curve::Hyperelliptic(_) => "hyperelliptic",
            Curve::ArtinSchreier(_) => "artin_schreier",
            Curve::Quartic(_) => "plane_quartic",
            Curve::FiberProduct(_) => "fiber_product",
            Curve::Tower(_) => "as_tower",
            Curve::Trigonal(_) => "trigonal",
        }
    }

    /// Genus computed from the model. Towers report their claimed genus.
    pub fn genus(&self) -> Result<u32> {
        match self {
            Curve::Hyperelliptic(c) => Ok(c.genus()),
            Curve::ArtinSchreier(c) => Ok(c.genus()),
            Curve::Quartic(_) => Ok(3),
            Curve::FiberProduct(_) => Ok(4),
            Curve::Tower(c) => Ok(c.claimed_genus()),
            Curve::Trigonal(c) => Ok(c.genus()),
        }
    }

    /// Number of F_{q^i}-rational points of the smooth model.
    pub fn count(&self, i: u32) -> Result<u64> {
        match self {
            Curve::Hyperelliptic(c) => c.count(i),
            Curve::ArtinSchreier(c) => c.count(i),
            Curve::Quartic(c) => c.count(i),
            Curve::FiberProduct(c) => c.count(i),
            Curve::Tower(c) => c.count(i),
            Curve::Trigonal(c) => c.count(i),
        }
    }

    pub fn is_pointless(&self) -> Result<bool> {
        Ok(self.count(1)? == 0)
    }

    pub fn describe(&self) -> String {
        match self {
            Curve::Hyperelliptic(c) => c.to_string(),
            Curve::ArtinSchreier(c) => c.to_string(),
            Curve::Quartic(c) => c.to_string(),
            Curve::FiberProduct(c) => c.to_string(),
            Curve::Tower(c) => c.to_string(),
            Curve::Trigonal(c) => c.to_string(),
        }
    }
}

/// F_{q^i} together with the embedding of the base field, after checking
/// that enumerating it is affordable.
pub(crate) fn extension(base: &FiniteField, i: u32) -> Result<(FiniteField, Embedding)> {
    if i == 0 {
        return Err(Error::ExtensionTooLarge(0));
    }
    let size = (base.q() as u128).checked_pow(i).unwrap_or(u128::MAX);
    if size > COUNT_LIMIT as u128 {
        return Err(Error::ExtensionTooLarge(i));
    }
    embed(base, i as usize)
}

/// Sums `f` over all elements, in parallel for large fields.
pub(crate) fn sum_over_field<F>(field: &FiniteField, f: F) -> u64
where
    F: Fn(Fe) -> u64 + Sync,
{
    let q = field.q();
    if q < 4096 {
        return field.elements().map(&f).sum();
    }
    let chunk = 1024u64;
    (0..q.div_ceil(chunk))
        .into_par_iter()
        .map(|c| (c * chunk..((c + 1) * chunk).min(q)).map(|v| f(Fe(v))).sum::<u64>())
        .sum()
}

/// 1 + chi(v): the number of square roots of v.
#[inline]
pub(crate) fn sqrt_count(field: &FiniteField, v: Fe) -> u64 {
    if v.is_zero() {
        1
    } else if field.is_square(v) {
        2
    } else {
        0
    }
}
