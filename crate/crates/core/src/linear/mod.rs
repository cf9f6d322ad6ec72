//! Linearized dynamics about the constant state: exact per-mode propagator,
//! mode functional, effective-velocity frame and the field-level semigroup.

pub mod frame;
pub mod mode;
pub mod params;
pub mod semigroup;
pub mod sweep;

pub use frame::{effective_frame, frame_alpha, frame_residuals, EffectiveFrame, FrameResiduals};
pub use mode::{
    coalescence_points, eig2, eigenvalues, envelope_ratio, frame_discriminant, frame_matrix, generator_discriminant, lyapunov,
    lyapunov_rate, mode_generator, propagate_mode_exact, propagator, rk4_mode, weighted_growth, Mat2,
    ModeState, ScaledPropagator,
};
pub use params::{lyapunov_bracket, LinearParams};
pub use sweep::{mode_sweep, SweepRow};
pub use semigroup::{apply_semigroup, FlowTable, complex_heat_check, heat_block_constant, HEAT_RATE};

#[cfg(test)]
mod tests;
