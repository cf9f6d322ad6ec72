//! Numerical toolkit for the isothermal compressible Navier-Stokes-Korteweg
//! system on a periodic box.

pub mod bony;
pub mod error;
pub mod gevrey;
pub mod linear;
pub mod littlewood_paley;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
