//! Floating scalar abstraction: f32 or f64.
//!
//! Exact quantities (field elements, norms, mod-p residues) never pass
//! through this trait; it only carries embeddings, house bounds and the
//! spectral/expansion estimates derived from them.

use num::traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lossy conversion from an exact rational, rounding to the nearest scalar.
pub fn scalar_from_rational<S: Scalar>(r: &num::BigRational) -> S {
    S::from_f64(r.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(S::nan)
}
