//! Quantitative checks for a Property-τ style construction over number
//! fields: exact field arithmetic and house bounds, free-group generator
//! systems in SL(2) with their girth constant C = 1/(n·ln 3M), reduction
//! modulo completely split primes, and Cayley-graph girth / spectral /
//! expansion reports over SL(2,p) and products of such groups.
//!
//! The floating side (embeddings, house bounds, spectral and expansion
//! estimates) is generic over [`scalar::Scalar`] (f32 or f64); the aliases
//! below pin the default f64 instantiation used by the CLI and most tests.

pub mod cayley;
pub mod matgroup;
pub mod numberfield;
pub mod poly;
pub mod reduction;
pub mod roots;
pub mod scalar;
pub mod verify;

/// Default floating scalar.
pub type Real = f64;

pub type NumberField = numberfield::NumberField<Real>;
pub type FieldElement = numberfield::FieldElement<Real>;
pub type HouseBound = numberfield::HouseBound<Real>;
pub type Mat2K = matgroup::Mat2K<Real>;
pub type ClearedMatrix = matgroup::ClearedMatrix<Real>;
pub type GeneratorSystem = matgroup::GeneratorSystem<Real>;
pub type PrimeSite = reduction::PrimeSite<Real>;
pub type IdealProduct = reduction::IdealProduct<Real>;
pub type SpectralReport = cayley::SpectralReport<Real>;
pub type ExpansionReport = cayley::ExpansionReport<Real>;
