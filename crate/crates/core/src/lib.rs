//! Discrete supersymmetric nonlinear sigma model with gravitino.
//!
//! Fields live on a periodic grid over the flat torus with a conformal metric
//! `g = e^{2u}(dx² + dy²)`. The map `φ` takes values in an embedded target
//! `N ⊂ ℝᴷ`, the spinor `ψ` is a tangent vector-spinor along `φ` and the
//! gravitino `χ` is a spinor-valued one-form. The crate evaluates the action,
//! its Euler–Lagrange residuals, runs a projected gradient flow and provides
//! Morrey and Riesz diagnostics.

// Index loops mirror the tensor notation; `!(x <= tol)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod analysis;
pub mod checks;
pub mod clifford;
pub mod euler_lagrange;
mod error;
pub mod fields;
pub mod geometry;
pub mod io;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
