//! Integrating-factor RK4 with the exact linear flow.
//!
//! Lawson form: with `E(s)` the linear flow and `N` the nonlinear forcing,
//! ```text
//! k1 = N(U)
//! k2 = N(E(h/2)(U + h/2 k1))
//! k3 = N(E(h/2)U + h/2 k2)
//! k4 = N(E(h)U + h E(h/2) k3)
//! U' = E(h)U + h/6 (E(h)k1 + 2E(h/2)(k2 + k3) + k4)
//! ```
//! The capillary and viscous terms sit inside `E`, so only transport limits `h`.

use serde::{Deserialize, Serialize};

use super::model::CoefficientModel;
use super::rhs::NonlinearOperator;
use crate::error::{Error, Result};
use crate::gevrey::gevrey_weight;
use crate::linear::{FlowTable, LinearParams};
use crate::spectral::{Grid, ProductEngine, State};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum StepMode {
    Plain,
    /// Evolves `A = exp(sqrt(c0 t) Lambda_1) U`.
    GevreyWeighted { c0: f64 },
}

pub struct Stepper {
    grid: Grid,
    params: LinearParams,
    nonlinear: Option<NonlinearOperator>,
    tables: Option<(f64, FlowTable, FlowTable)>,
}

impl Stepper {
    /// `model = None` switches the nonlinearity off.
    pub fn new(grid: &Grid, params: LinearParams, model: Option<&CoefficientModel>) -> Result<Self> {
        params.validate()?;
        let nonlinear = model
            .map(|m| NonlinearOperator::new(ProductEngine::padded(grid), params, m))
            .transpose()?;
        Ok(Stepper {
            grid: grid.clone(),
            params,
            nonlinear,
            tables: None,
        })
    }

    pub fn params(&self) -> &LinearParams {
        &self.params
    }

    fn tables(&mut self, h: f64) -> Result<(&FlowTable, &FlowTable)> {
        let stale = self.tables.as_ref().is_none_or(|(t, _, _)| *t != h);
        if stale {
            let full = FlowTable::new(&self.grid, h, &self.params)?;
            let half = FlowTable::new(&self.grid, 0.5 * h, &self.params)?;
            self.tables = Some((h, full, half));
        }
        let (_, full, half) = self.tables.as_ref().expect("tables were just built");
        Ok((full, half))
    }

    fn forcing(&self, state: &State) -> Result<Option<State>> {
        match &self.nonlinear {
            None => Ok(None),
            Some(op) => {
                let terms = op.evaluate(state)?;
                Ok(Some(State::new(terms.f, terms.g)?))
            }
        }
    }

    pub fn step(&mut self, state: &State, h: f64) -> Result<State> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step {h} must be positive")));
        }
        let Some(k1) = self.forcing(state)? else {
            let (full, _) = self.tables(h)?;
            return full.apply(state);
        };
        // The tables borrow self mutably; clone the two small handles out.
        let (full, half) = {
            let (f, hf) = self.tables(h)?;
            (f.clone(), hf.clone())
        };
        let half_u = half.apply(state)?;
        let k2 = self.forcing(&half.apply(&state.axpy(0.5 * h, &k1))?)?.expect("nonlinear");
        let k3 = self.forcing(&half_u.axpy(0.5 * h, &k2))?.expect("nonlinear");
        let k4_arg = full.apply(state)?.axpy(h, &half.apply(&k3)?);
        let k4 = self.forcing(&k4_arg)?.expect("nonlinear");
        let mid = half.apply(&k2.axpy(1.0, &k3))?;
        let out = full
            .apply(state)?
            .axpy(h / 6.0, &full.apply(&k1)?)
            .axpy(h / 3.0, &mid)
            .axpy(h / 6.0, &k4);
        Ok(out)
    }

    /// Weighted step from `t` to `t + h`: unweights, steps, reweights.
    /// Returns the new weighted state and the per-step log-gain certificate
    /// `max_xi (dphi |xi|_1 - c1 |xi|^2 h)`.
    pub fn gevrey_step(&mut self, weighted: &State, t: f64, h: f64, c0: f64) -> Result<(State, f64)> {
        let phi0 = (c0 * t).sqrt();
        let phi1 = (c0 * (t + h)).sqrt();
        let plain = weighted.map_fields_result(|f| gevrey_weight(f, -phi0))?;
        let next = self.step(&plain, h)?;
        let out = next.map_fields_result(|f| gevrey_weight(f, phi1))?;
        Ok((out, step_log_gain(&self.grid, phi1 - phi0, h, self.params.decay_rate())))
    }
}

/// `max over the lattice of dphi |xi|_1 - c1 |xi|^2 h`, never below 0.
pub fn step_log_gain(grid: &Grid, dphi: f64, h: f64, c1: f64) -> f64 {
    grid.norms1()
        .iter()
        .zip(grid.norms())
        .map(|(n1, n)| dphi * n1 - c1 * n * n * h)
        .fold(0.0, f64::max)
}

/// Bound `c0 d / (4 c1)` on [`step_log_gain`] valid for `c0 <= c1 / d`.
pub fn gain_certificate(c0: f64, d: usize, c1: f64) -> f64 {
    c0 * d as f64 / (4.0 * c1)
}

/// One step in either mode; builds its own operator.
pub fn step(
    state: &State,
    dt: f64,
    t: f64,
    params: &LinearParams,
    model: Option<&CoefficientModel>,
    mode: StepMode,
) -> Result<State> {
    let mut s = Stepper::new(state.grid(), *params, model)?;
    match mode {
        StepMode::Plain => s.step(state, dt),
        StepMode::GevreyWeighted { c0 } => {
            check_gevrey_rate(c0, state.grid().dim(), params)?;
            Ok(s.gevrey_step(state, t, dt, c0)?.0)
        }
    }
}

pub fn check_gevrey_rate(c0: f64, d: usize, params: &LinearParams) -> Result<()> {
    let limit = params.decay_rate() / d as f64;
    if !(c0 >= 0.0 && c0 <= limit * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "Gevrey rate {c0} must lie in [0, c1/d = {limit}]"
        )));
    }
    Ok(())
}
