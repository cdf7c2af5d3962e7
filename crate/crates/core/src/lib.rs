//! Exact consistency checking for systems of credal sets of
//! finite-dimensional distributions over a finite index set `T` and a finite
//! outcome set `Y`.
//!
//! The pipeline is:
//!
//! 1. [`credal`] checks the permutation and marginal consistency conditions
//!    of a [`credal::CredalCollection`];
//! 2. [`joint`] builds the joint set `P` of measures on `Ω = Y^T` whose
//!    coordinate pushforwards land in every prescribed set;
//! 3. [`joint::verify_representation`] checks that the pushforwards of `P`
//!    reproduce every prescribed set exactly.
//!
//! All arithmetic is exact ([`exactq`]); there are no tolerances anywhere.

pub mod cli;
pub mod credal;
pub mod error;
pub mod exactq;
pub mod joint;
pub mod polytope;
pub mod spaces;

pub use error::{Error, Result};
