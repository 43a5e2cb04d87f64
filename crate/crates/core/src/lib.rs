//! Reproducing kernel Hilbert spaces induced by feature maps, with
//! inversion formulas for the associated integral transforms.

pub mod cli;
pub mod error;
pub mod inversion;
pub mod numerics;
pub mod plancherel;
pub mod rkhs;
pub mod spaces;

pub use error::{Error, Result};
