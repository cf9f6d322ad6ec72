//! Periodic-box discretization: grids, Fourier fields, multipliers, the
//! Leray projector, discrete Lebesgue norms, padded products and snapshots.
//!
//! The whole-space setting is replaced by the torus `[0, L)^d`. Homogeneous
//! multipliers act as zero on the mean unless a value is supplied.

pub mod field;
pub mod grid;
pub mod io;
pub mod ops;
pub mod product;
pub mod random;

pub use field::{forward, forward_complex, inverse, inverse_complex, PhysicalField, SpectralField, State};
pub use grid::Grid;
pub use ops::{
    apply_multiplier, divergence, gradient, laplacian, leray_project, lp_norm, partial, symbols,
    Frequency, ZeroMode,
};
pub use product::{Padding, ProductEngine};
pub use random::{random_radial_field, smooth_random_field, Spectrum};
