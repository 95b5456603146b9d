//! Constrained zonotope set algebra, least-squares approximations of the
//! Pontryagin difference, and robust controllable set recursions.
//!
//! A constrained zonotope `(G, c, A, b)` is the set
//! `{G ξ + c : ‖ξ‖∞ ≤ 1, A ξ = b}`. Everything here works on that
//! representation directly; H-Rep polyhedra appear only as inputs
//! (state constraints) and as polyhedral covers.

pub mod compare;
pub mod czops;
mod error;
pub mod io;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod pdiff;
pub mod rcset;
pub mod sets;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use sets::{ConstrainedZonotope, HPolyhedron, Halfspace, ReprComplexity, SymmetricSet};
