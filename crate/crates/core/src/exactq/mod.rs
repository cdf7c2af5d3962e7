//! Exact rational arithmetic, dense linear algebra and a certificate
//! producing linear-programming solver.

pub mod linalg;
pub mod lp;
pub mod rational;

pub use linalg::{
    inverse, nullspace, rref, solve_linear_system, LinearSolution, QMatrix, QVector,
};
pub use lp::{lp_solve, Direction, FarkasCertificate, LpOutcome, LpProblem, Sense, VarBound};
pub use rational::{format_rational, is_canonical, parse_rational, ratio, Rational};
