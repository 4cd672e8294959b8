//! Kauffman bracket skein modules and SL(2,C) character varieties of small
//! Seifert fibered spaces.
//!
//! The main objects are Seifert fibered spaces over `S^2` with at most three
//! exceptional fibers ([`SeifertData`]).  For these the crate computes:
//!
//! * first homology and counts of abelian, binary dihedral, and irreducible
//!   SL(2,C) characters ([`homology`], [`characters`]);
//! * the dimension of the Kauffman bracket skein module over `Q(A)`, with an
//!   explicit spanning set of multicurves and the evaluation matrix that
//!   certifies linear independence ([`characters`]);
//! * a terminating rewriting system on the natural spanning set of the skein
//!   module, giving an explicit finite generating set ([`reduction`]);
//! * unitary and SL(2,C) representations of the fundamental group together
//!   with twisted cohomology dimensions, the ingredients of the smoothness
//!   and reducedness checks ([`reps`]).
//!
//! Coefficients are exact: Laurent polynomials in the framing variable `A`
//! over the integers ([`ring::LaurentPoly`]), rationals, and exact angle
//! classes ([`characters::AngleIndex`]) wherever possible; floating point
//! enters only in rank computations and explicit matrix representations,
//! always with stated tolerances.

pub mod characters;
pub mod homology;
pub mod reduction;
pub mod report;
pub mod reps;
pub mod ring;
pub mod seifert;
pub mod torus;

pub use characters::{
    enumerate_characters, evaluation_matrix, skein_dimension, AngleIndex, BasisDescriptor,
    CharacterRecord, Reducedness, SkeinDimension,
};
pub use homology::{character_counts, CharacterCounts};
pub use reps::{
    build_rp2_rep, build_su2_s2base, cocycle_dims, construct_sl2_rep, su2_residual, CocycleReport,
    Quaternion, RepSpec, Rp2Rep, Sl2Rep,
};
pub use reduction::{
    generating_set, reduce, GeneratorIndex, R5CoefficientTable, ReductionTrace, SkeinElement,
};
pub use report::{
    build_report, lookup_known, parse_slope_list, run_census, CensusSummary, InvariantReport,
    KnownValue, QPolicy, ReportOptions,
};
pub use ring::{LaurentPoly, Rational};
pub use seifert::{
    classify_character_variety, BaseSurface, Classification, Finiteness, GeneralSeifertData,
    SeifertData, Slope,
};
pub use torus::{ts_chebyshev, ts_product, TorusClass, TorusSkein};

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid slope {q}/{p}: need p >= 1 and gcd(p, q) = 1")]
    InvalidSlope { p: i64, q: i64 },

    #[error(
        "Euler number is zero: the manifold is reducible or Haken, the character \
         variety has positive dimension, and the skein module is not finitely generated"
    )]
    EulerZero,

    #[error("enumeration over H_1 of order {order} exceeds the bound {bound}")]
    GroupTooLarge { order: u128, bound: u128 },

    #[error("hypothesis not met for {rule}: {detail}")]
    HypothesisNotMet { rule: &'static str, detail: String },

    #[error("rewriting step {rule} failed to decrease complexity: {detail}")]
    DescentViolation { rule: &'static str, detail: String },

    #[error("no unitary representation with the requested angles: {0}")]
    NotRealizable(String),

    #[error("no admissible rotation angle for any exceptional fiber")]
    NoAdmissibleAngle,

    #[error("inconsistent construction data: {0}")]
    InconsistentData(String),

    #[error("numerical rank is ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("unknown manifold label {0:?}")]
    UnknownManifold(String),
}
