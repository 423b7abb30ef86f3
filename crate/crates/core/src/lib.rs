//! Exact computations for horospherical Fano varieties: root systems,
//! rational polytopes, the `B`-stable curve table, and the pseudo-index
//! inequality `(ι − 1)ρ ≤ d` with its equality case.
//!
//! The core is generic over an exact [`Scalar`]. Floats are never used.

pub mod curves;
pub mod enumerate;
pub mod exactal;
pub mod horo;
pub mod instance;
pub mod polytope;
pub mod report;
pub mod rootsys;
pub mod theorem;

pub use exactal::{LatticeVector, Scalar};

/// Arbitrary precision rationals, the default scalar.
pub type Rational = num_rational::BigRational;
/// Fixed-width rationals for enumeration; overflow panics in debug builds.
pub type SmallRational = num_rational::Ratio<i64>;

pub type Polytope = polytope::RationalPolytope<Rational>;
pub type Embedding = horo::FanoEmbedding<Rational>;
pub type Report = theorem::TheoremReport<Rational>;

pub type SmallPolytope = polytope::RationalPolytope<SmallRational>;
pub type SmallEmbedding = horo::FanoEmbedding<SmallRational>;
