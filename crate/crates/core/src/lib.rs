//! Norm inflation laboratory for cubic (fractional) NLS on scaled tori.

pub mod constructions;
pub mod error;
pub mod evolution;
pub mod fft;
pub mod inflation_lab;
pub mod profile;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
