//! Nonlinear simulator for the normalized system
//! `a_t + div u = f`, `u_t - A u + grad a - k grad Lap a = g` on the torus.

pub mod diagnostics;
pub mod model;
pub mod rhs;
pub mod run;
pub mod stepper;

pub use diagnostics::{data_smallness, validate_diagnostic_p, split_norms, Diagnostics, SmallnessTracker};
pub use model::{denormalize, normalize, CoefficientModel, DerivedSeries, RawModel, ScalingMaps};
pub use rhs::{nonlinear_rhs, NonlinearOperator, NonlinearTerms};
pub use run::{
    initial_state, run, run_from, DiagnosticsConfig, GridConfig, InitialData, RunStatus, SimConfig, Trajectory,
    BLOW_UP_LIMIT, CFL,
};
pub use stepper::{check_gevrey_rate, gain_certificate, step, step_log_gain, StepMode, Stepper};

#[cfg(test)]
mod tests;
