//! Exact arithmetic substrate: rationals, log-linear numbers, rigorous
//! intervals, dense matrices and piecewise-linear functions.

pub mod interval;
pub mod lognum;
pub mod matrix;
pub mod pl;
pub mod rational;

pub use lognum::LogNumber;
pub use matrix::{semidef_analyze, solve_consistent, QMatrix, QVector, SemidefReport};
pub use pl::{PLFunction, PlOp};
pub use rational::{parse_rational, q, qi, Rational};
