//! Exact arithmetic for the computable core of the genus-3 Torelli group story:
//! the rank-6 symplectic homology lattice and its mod-2 reduction, Sp-quadratic
//! forms and the Boolean algebras they generate, Birman--Craggs--Johnson
//! evaluation on symbolic twist generators, the multiset combinatorics of the
//! complex of cycles, the stabilizer homomorphism tables, formal E^1 chains
//! with the d^1 differential, and the weight-descent verification of the
//! sigma- and lambda-systems.
//!
//! Everything is exact: integers are arbitrary precision, GF(2) data is
//! bit-packed, and real comparisons go through certified interval refinement
//! over a fixed Q-linearly independent reference tuple.

pub mod bcj;
pub mod chainlab;
pub mod cyclecomplex;
pub mod descent;
pub mod gf2;
pub mod homlattice;
pub mod quadbool;
pub mod stabrep;
pub mod suites;
pub mod zmat;

mod par;

pub use par::par_map;

/// Errors shared across the crate. Every fallible operation names its
/// precondition violation through one of these variants.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("zero class")]
    ZeroClass,
    #[error("more than three classes (genus-3 bound)")]
    GenusBound,
    #[error("classes are dependent or not pairwise orthogonal")]
    BadIsotropicInput,
    #[error("class is not primitive")]
    NotPrimitive,
    #[error("set is not a member of H0'")]
    NotInH0Prime,
    #[error("sub-multiset is not contained in the ambient multiset")]
    NotASubset,
    #[error("outside characterized taxonomy")]
    OutsideTaxonomy,
    #[error("taxonomy mismatch: {0}")]
    TaxonomyMismatch(&'static str),
    #[error("word does not lie in ker f")]
    NotInKerF,
    #[error("element does not lie in the BCJ kernel")]
    NotInC,
    #[error("missing tag: {0}")]
    MissingTag(String),
    #[error("five-curve word has odd nu, internal inconsistency")]
    OddNu,
    #[error("degenerate linear form")]
    DegenerateForm,
    #[error("malformed generator: {0}")]
    MalformedGenerator(&'static str),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
