//! Exact construction, evaluation and auditing of maximally
//! non-exchangeable copulas.
//!
//! For any d-copula `C` and permutation `π`, `|C(u) - C(u_π)| <= (d-1)/(d+1)`,
//! and the bound is sharp. This crate builds the extremal copulas as
//! shuffles of min, evaluates them in exact rational arithmetic, computes the
//! pointwise bounds on the difference, checks the copula axioms, and runs a
//! certified grid search for the maximal difference.

pub mod axioms;
pub mod bounds;
pub mod cli;
pub mod copula;
pub mod error;
pub mod perm;
pub mod point;
pub mod rational;
pub mod sample;
pub mod search;
pub mod shuffle;

pub use copula::{box_volume, c_star_closed_form, evaluate, margin, u_star, Copula, CopulaTerm};
pub use error::{Error, Result};
pub use perm::{Perm, Transposition};
pub use point::{HyperBox, UnitPoint};
pub use rational::Rational;
pub use shuffle::{
    build_c_star_structure, build_manifold_structure, BaseCopula, DeltaVector, ShuffleStructure,
    ValidatedShuffle,
};
