pub mod diagnostics;
pub mod error;
pub mod galerkin;
pub mod physics;
pub mod spectral;

pub use error::{Error, Result};
