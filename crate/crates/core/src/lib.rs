//! Exact tropical differential algebra over the ring of formal power series.
//!
//! The library works over two parallel worlds and the maps between them:
//!
//! * the classical side: formal power series `K[[t]]` with exact rational
//!   coefficients ([`TruncatedSeries`]), differential polynomials in
//!   variables `x_ij` over that ring ([`DiffPolynomial`]), and finite-level
//!   jet polynomials obtained by differentiating and evaluating at `t = 0`;
//! * the tropical side: the min-plus semiring `(Z≥0 ∪ {inf}, min, +)`
//!   ([`TropValue`]), supports of series ([`SupportSet`]), and tropical
//!   differential polynomials ([`TropDiffPolynomial`]) acting on support
//!   tuples.
//!
//! The [`solver`] module enumerates tropical solutions over finite windows,
//! tropicalizes parametric solution families, searches for jet-level
//! witnesses, and compares `Sol(trop(G))` against `trop(Sol(G))` on
//! desk-scale instances.

pub mod diffpoly;
pub mod error;
pub mod ordinary;
pub mod parse;
pub mod semiring;
pub mod series;
pub mod solver;
pub mod support;
pub mod tropical;

pub use diffpoly::{DiffPolynomial, ExponentMatrix};
pub use error::{Error, Result};
pub use ordinary::OrdinaryPolynomial;
pub use semiring::TropValue;
pub use series::{psi, psi_inverse, CoeffSequence, Precision, Rational, TruncatedSeries};
pub use support::SupportSet;
pub use tropical::{tropicalize, TropDiffPolynomial};
