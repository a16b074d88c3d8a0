use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Fock dimensions: na = {na}, nb = {nb} (need na >= 1, nb >= 2)")]
    Dimensions { na: usize, nb: usize },

    #[error("beam waist must be positive and finite, got {0}")]
    Waist(f64),

    #[error("state has non-finite coefficients")]
    NonFinite,

    #[error("state dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },

    #[error("beam waists differ: {0} vs {1}")]
    WaistMismatch(f64, f64),

    #[error("cannot normalize a zero state")]
    ZeroNorm,

    #[error("overlap length {len} must exceed the Fock index {n}")]
    OverlapLength { n: usize, len: usize },

    #[error("parameter {name} = {value} is outside its domain {domain}")]
    Parameter { name: &'static str, value: f64, domain: &'static str },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("postselection impossible: unnormalized pointer norm {0:e} below 1e-14")]
    DestructiveInterference(f64),

    #[error("cross-correlation undefined: mean photon numbers <a+a> = {na:e}, <b+b> = {nb:e}")]
    UndefinedCorrelation { na: f64, nb: f64 },

    #[error("pointer shift without postselection vanishes (|dx'| = {0:e})")]
    DegenerateShift(f64),

    #[error("position variance is not positive ({which}: {value:e})")]
    VarianceCollapse { which: &'static str, value: f64 },

    #[error("Wigner closed form has imaginary residue {0:e}")]
    WignerResidue(f64),

    #[error("empty parameter set")]
    EmptyParameterSet,
}
