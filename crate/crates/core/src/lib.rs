//! Exact invariants and cotangent-cohomology dimensions of reduced curve
//! singularities given by a polynomial parametrization.
//!
//! All algebra is generic over an exact [`Field`]; the aliases below fix it
//! to arbitrary-precision rationals, which is what the parser produces.

pub mod check;
pub mod ci;
pub mod cotangent;
pub mod germ;
pub mod io;
pub mod jet;
pub mod pipeline;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod series;
pub mod subalgebra;

pub use io::{parse_instance, render_instance};
pub use pipeline::{run, Classification, RunOutcome, Stage};
pub use report::render_report;
pub use scalar::Field;

/// Arbitrary-precision rational numbers.
pub type Rational = num_rational::BigRational;

pub type Series = series::TruncSeries<Rational>;
pub type Multi = series::MultiSeries<Rational>;
pub type Germ = germ::Parametrization<Rational>;
pub type Ideal = germ::IdealSpec<Rational>;
pub type Instance = germ::ProblemInstance<Rational>;
pub type Basis = jet::JetBasis<Rational>;
pub type Ring = subalgebra::CertifiedRing<Rational>;
