//! Computable invariants of lagrangian subspaces: Maslov indices of closed
//! loops of frames, Cech cocycle representatives of Chern classes over
//! finite covers, parallel transport in the flat Z4 line bundle over the
//! real grassmannian of lines, and the Z2 square-root gerbe over the
//! grassmannian of complex lagrangian lines, evaluated through two
//! independent routes that must agree.
//!
//! The crate works at desk scale: frames are small dense matrices, loops
//! and covers are finite sample paths, and every headline value is an exact
//! integer or root of unity produced by winding-number accumulation with
//! guarded branch tracking.

pub mod bundles;
pub mod cech;
pub mod charts;
pub mod error;
pub mod gerbe;
pub(crate) mod linalg;
pub mod json;
pub mod num;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
