//! Euclidean vacuum for linearized gravity on global de Sitter space, built
//! sector by sector from Calderón projectors on the four-sphere.

pub mod calderon;
pub mod cauchy_ops;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod maxwell;
pub mod phase_space;
pub mod radial_ode;
pub mod rational;
pub mod sector_algebra;
pub mod state_verify;

pub use error::{Error, Result};
