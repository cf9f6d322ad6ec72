//! Gevrey weights, analyticity-radius estimation, multiplier kernel checks
//! and decay-rate fits.

mod decay;
mod kernels;
mod radius;
mod weight;

pub use decay::{fit_decay, DecayFit, DecayModel, MIN_FIT_SAMPLES};
pub use kernels::{
    kernel_check, poisson_kernel, radius_gap_exponent, KernelCheck, KernelReport, KernelSettings, SHELL_DECAY_RATE,
};
pub use radius::{estimate_radius, linear_fit, shell_maxima, GevreyFit, MIN_SHELLS, RADIUS_CEILING, RADIUS_FLOOR};
pub use weight::{gevrey_weight, GAIN_CAP};
