//! Spectral solver for the mixed Riemann-Hilbert problem on the unit disk:
//! find `f` holomorphic in the disk with `Im(conj(a) f) = 0` on one boundary
//! arc and `f(xi)` on a prescribed star-shaped curve over every point of the
//! other arc.
//!
//! The pipeline is [`reduction`] (normalize the arc and symbol), [`corners`]
//! (endpoint exponents and the corner substitution), [`solver`] (Newton steps
//! through [`linear_rh`] along a continuation from circle fibers), and
//! [`verify`] (residuals, analyticity, an independent oracle).
//!
//! ```
//! use mrh_core::fibers::FiberPreset;
//! use mrh_core::problem::Problem;
//! use mrh_core::solver::solve_problem;
//!
//! let fibers = FiberPreset::RadialTheta { eps: 0.1 }.build().unwrap();
//! let solved = solve_problem(&Problem::standard(fibers).with_grid(256)).unwrap();
//! assert!(solved.bundle.residuals.sup_residual() < 1e-7);
//! ```

// Range checks are written as `!(x < bound)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circlefn;
pub mod corners;
pub mod error;
pub mod fibers;
pub mod linear_rh;
pub mod problem;
pub mod reduction;
pub mod solver;
pub mod verify;

pub use error::{Error, ErrorClass, Result};
