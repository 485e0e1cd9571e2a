//! Exact motivic invariants of unibranch plane curve singularities.
//!
//! * [`semigroup`]: numerical semigroups, their ideals, independent tuples.
//! * [`poly`]: Laurent polynomials in the Lefschetz class.
//! * [`hilb`]: classes of Hilbert schemes of points with fixed generator count.
//! * [`resolution`]: embedded resolution graphs of `(p,q)`-curves.
//! * [`zeta`]: contact-locus classes and the motivic Igusa zeta function.
//! * [`jets`]: brute-force jet counts over prime fields, used as an oracle.
//! * [`checks`]: the property suites behind `curvemotive check`.

pub mod checks;
pub mod hilb;
pub mod jets;
pub mod poly;
pub mod resolution;
pub mod semigroup;
pub mod zeta;

use num_bigint::BigInt;

pub use poly::{Coefficient, LaurentPolynomial, PolyError};
pub use semigroup::{MemberSet, NumericalSemigroup, SemigroupIdeal};

/// A class in `Z[L, L^-1]` with arbitrary-precision coefficients.
pub type MotivicClass = LaurentPolynomial<BigInt>;

/// Machine-integer classes, for scratch computations that cannot overflow.
pub type SmallClass = LaurentPolynomial<i64>;
