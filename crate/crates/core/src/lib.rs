//! Random linearly-constrained programs and their Gaussian-comparison bounds.
//!
//! The crate samples programs of the form
//!
//! ```text
//! min f(x)  s.t.  Ax = a,  Bx <= b,  ||x||_2 <= 1
//! ```
//!
//! with i.i.d. standard normal `A` and `B`, solves them directly
//! ([`primal`]), evaluates the single-constraint auxiliary programs whose
//! optimum predicts the original one ([`auxiliary`]), computes the
//! closed-form large-`n` limits ([`theory`]) and drives Monte Carlo
//! experiments that put the three side by side ([`harness`]).

pub mod auxiliary;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod primal;
pub mod problem;
pub mod theory;

pub use error::{Error, Result};
