//! Maxwell-Bloch simulation of slow light, light storage and stationary
//! light pulses in cold Rb-87 inside a hollow-core fiber.
//!
//! Frequencies are in units of the excited-state linewidth Gamma and times in
//! 1/Gamma; positions along the medium are normalized to its length.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod calibration;
#[cfg(feature = "cli")]
pub mod config;
pub mod drive;
pub mod error;
pub mod io;
pub mod medium;
pub mod optimize;
pub mod quadrature;
#[cfg(feature = "cli")]
pub mod run;
pub mod scenarios;
pub mod solver;
pub mod spectra;

pub use error::{Error, Result};
