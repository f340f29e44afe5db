//! Exact computation in quantum Tate algebras and quantum tori over the
//! non-archimedean field `K = Q((t))`.
//!
//! The scalar and algebra layers are generic over the coefficient field
//! (see [`field::Coefficient`]); the aliases below fix it to exact
//! rationals, which is what every higher-level module uses.

pub mod error;
pub mod field;
pub mod k3model;
pub mod qalg;
pub mod scalars;
pub mod scatter;
pub mod sheaf;
pub mod spectra;

pub use error::{Error, Result};
pub use field::{int, rat, Coefficient, Rational};
pub use scalars::{default_precision, LaurentSeries, LogNorm, DEFAULT_PRECISION};

/// An element of `Q((t))` modulo `t^N`.
pub type Scalar = LaurentSeries<Rational>;
/// A twisted monomial algebra over [`Scalar`].
pub type Algebra = qalg::TwistedAlgebra<Rational>;
/// An element of a quantum polydisc or quantum torus over [`Scalar`].
pub type Element = qalg::TwistedElement<Rational>;
/// An element of the free Tate algebra over [`Scalar`].
pub type Free = qalg::FreeElement<Rational>;

/// Same series type over machine-size rationals; overflows panic.
pub type Scalar64 = LaurentSeries<num_rational::Rational64>;
