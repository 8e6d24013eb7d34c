//! Exact computation in Steinberg algebras of ample groupoids.
//!
//! The algebra layer is generic over the coefficient type; [`ExactComplex`]
//! (complex numbers with rational parts) is the one every command uses.

pub mod element;
pub mod error;
pub mod gen;
pub mod groupoid;
pub mod oracle;
pub mod representation;
pub mod rewriting;
pub mod scalar;
pub mod syntax;
pub mod verify;

use num_complex::{Complex, Complex32, Complex64};
use num_rational::BigRational;

pub use element::{AlgebraElement, Spectrum, Support, SupportClass, Term};
pub use error::{Error, Result};
pub use groupoid::{AmpleGroupoid, ClopenSet, FiniteGroupoid, Region, SnakeGroupoid, SnakePoint};
pub use scalar::{Magnitude, RealScalar, Scalar};

pub type ExactComplex = Complex<BigRational>;
pub type Element<G> = AlgebraElement<G, ExactComplex>;
pub type FiniteElement = Element<FiniteGroupoid>;
pub type SnakeElement = Element<SnakeGroupoid>;
pub type F64Element<G> = AlgebraElement<G, Complex64>;
pub type F32Element<G> = AlgebraElement<G, Complex32>;
