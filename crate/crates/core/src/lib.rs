//! Optimal value ranges of absolute value linear programs with interval
//! coefficients,
//!
//! ```text
//! maximize c·x  subject to  A x - D|x| <= b,   A, b, c, D in given boxes.
//! ```
//!
//! [`range`] computes the exact best case, a lower bound on the worst case
//! with a sufficient exactness test, and an iterative upper bound.
//! [`stability`] certifies that one basis is optimal throughout the relaxed
//! interval LP and then gives the exact worst case from one absolute value
//! equation.

// `!(a <= b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod avlp;
pub mod cli;
pub mod error;
pub mod gave;
pub mod interval;
pub mod linalg;
pub mod lp;
pub mod options;
pub mod problem;
pub mod problem_file;
pub mod range;
pub mod regularity;
pub mod report;
pub mod sampling;
pub mod stability;

pub use error::{Error, ErrorKind, Result};
pub use interval::{Interval, IntervalMatrix, IntervalVector, SignVector};
pub use options::Options;
pub use problem::{AvlpProblem, Realization};
