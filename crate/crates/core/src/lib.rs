//! Exact computations for composition operators C_φ f = f∘φ on product
//! probability spaces Ω = ∏ ℤ/m_iℤ, for the odometer, the diagonal
//! translation and weighted shifts on ℤ or ℤ₊.

pub mod criteria;
pub mod error;
pub mod function;
pub mod gallery;
pub mod maps;
pub mod report;
pub mod scalar;
pub mod shift;
pub mod solve;
pub mod space;
pub mod spec;
pub mod transport;
pub mod witness;

pub use error::{Error, Result};
pub use scalar::{Backend, Rational, Scalar};
pub use spec::{AnySpec, MapKind, SystemSpec};
