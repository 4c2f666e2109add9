use thiserror::Error;

use crate::bifurcation::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("a = {0} is not in 𝔸 (some prime factor is not 1 mod 4)")]
    NotInA(u64),

    #[error("invalid group parameters: {0}")]
    InvalidParams(String),

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("root {root} is not a simple root of x^2 + 1 modulo {p}")]
    HenselLift { root: u64, p: u64 },

    /// A singular value fell inside the band `[cut, 10 cut)`, so the rank
    /// cannot be decided.
    #[error("numerical ambiguity in {context}: singular value {value:e} near cut {cut:e}")]
    NumericalAmbiguity {
        context: &'static str,
        value: f64,
        cut: f64,
    },

    #[error("numerical inconsistency in {context}: rounding residue {residue:e}")]
    NumericalInconsistency { context: &'static str, residue: f64 },

    #[error("unsupported degree {0} (only degrees up to 3 are implemented)")]
    UnsupportedDegree(u32),

    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("cubic truncation does not preserve Fix(K): output {output} has residue {residue:e}")]
    RestrictionInconsistent { output: usize, residue: f64 },

    #[error("point is not on the unit sphere (norm {0})")]
    NonUnitVector(f64),

    #[error("coefficients are not generic: {}", join_violations(.0))]
    NotGeneric(Vec<Violation>),

    #[error("could not serialize report: {0}")]
    Serialize(String),

    #[error("Newton corrector did not converge at r = {r} (last residual {residual:e})")]
    Continuation { r: f64, residual: f64 },
}

impl Error {
    /// Process exit status for command-line front ends: 2 for invalid input,
    /// 3 for non-generic coefficients, 4 for numerical trouble, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::NotInA(_)
            | Error::InvalidParams(_)
            | Error::NotCoprime(..)
            | Error::UnsupportedDegree(_)
            | Error::OutOfRange { .. }
            | Error::NonUnitVector(_) => 2,
            Error::NotGeneric(_) => 3,
            Error::NumericalAmbiguity { .. }
            | Error::NumericalInconsistency { .. }
            | Error::Continuation { .. } => 4,
            Error::HenselLift { .. }
            | Error::RestrictionInconsistent { .. }
            | Error::Serialize(_) => 1,
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
