//! The periodic grid and the embedded target manifold.

mod grid;
mod target;

pub use grid::{Grid, Stencil};
pub use target::{Ellipsoid, Embedding, LocalFrame, TargetManifold, FRAME_STEP, NABLA_STEP};
pub(crate) use target::{bilinear, mat_vec, norm};
