//! Finite groups `H_{a,b} ⊂ SO(4)` and `G_{a,b} ⊂ O(8)` built from a square
//! root `ρ` of −1 modulo `a`, together with the tools to study their
//! equivariant bifurcations: normal-form arithmetic, matrix realizations,
//! isotropy classification, characters and Molien coefficients, cubic
//! equivariant bases, and the phase field and equilibrium branch of a cubic
//! truncation.
//!
//! Matrices and polynomial maps are generic over [`scalar::Scalar`]; the
//! aliases below fix the common choices.

pub mod bifurcation;
pub mod characters;
pub mod equivariants;
pub mod error;
pub mod group;
pub mod isotropy;
pub mod linalg;
pub mod modular;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod verify;

pub use bifurcation::{
    branch_continuation, genericity_check, phase_jacobian_at_y0, sphere_zero_search, BranchPoint,
    CubicTruncation, PhaseField, PhaseFieldReport, Violation,
};
pub use characters::{character, molien, MolienReport};
pub use equivariants::{canonical_e, equivariant_basis, span_match};
pub use error::{Error, Result};
pub use group::{enumerate_group, Family, GroupElement, GroupParams, Realization};
pub use isotropy::{classify_isotropy, IsotropyClass};
pub use linalg::DenseMatrix;
pub use modular::{rho_for, RhoWitness};
pub use poly::PolyMap;
pub use scalar::{RealScalar, Scalar};

pub type Matrix64 = DenseMatrix<f64>;
pub type Matrix32 = DenseMatrix<f32>;
pub type ExactMatrix = DenseMatrix<num_rational::Rational64>;
pub type PolyMap64 = PolyMap<f64>;
pub type PolyMap32 = PolyMap<f32>;
pub type ExactPolyMap = PolyMap<num_rational::Rational64>;
pub type Realization64 = Realization<f64>;
