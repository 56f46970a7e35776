//! Stochastic wave-optics toolkit for the two-source intensity interferometer.
//!
//! The pipeline is: [`source`] generates phase-noise-only field traces, [`bench`]
//! pushes two of them through the polarised Mach-Zehnder network, and
//! [`correlate`] estimates first- and second-order correlations from the
//! resulting detector intensities. [`oracle`] holds the closed-form
//! zero-delay predictions, and [`poincare`] the polarisation geometry that
//! connects polariser angles to the enclosed solid angle.

pub mod bench;
pub mod correlate;
mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pipeline;
pub mod poincare;
pub mod source;

pub use error::{Error, Result};
