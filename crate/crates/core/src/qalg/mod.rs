//! Twisted monomial algebras: quantum polydiscs, quantum tori and the free
//! Tate algebra, with exact Gauss norms.

mod element;
mod free;
mod twist;

pub use element::{Domain, Exponent, TwistedAlgebra, TwistedElement};
pub(crate) use element::dot;
pub use free::{FreeElement, Word};
pub use twist::TwistForm;
