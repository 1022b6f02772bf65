//! Shared numerical building blocks: reproducible Gaussian streams, dense
//! linear algebra, special functions and one-dimensional maximization.

mod linalg;
mod rng;
mod scalar;
mod special;

pub use linalg::{dot, norm2, CholeskyFactor, DenseMatrix, NullspaceProjector};
pub use rng::{gaussian_vector, RngStream};
pub use scalar::{maximize_scalar, ScalarOptResult, DEFAULT_SCALAR_TOL};
pub(crate) use scalar::brent_max;
pub use special::{erfc, normal_pdf};
