//! Simulation driver: configuration, initial data and trajectories.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::diagnostics::{split_norms, validate_diagnostic_p, Diagnostics, SmallnessTracker};
use super::model::CoefficientModel;
use super::rhs::NonlinearOperator;
use super::stepper::{check_gevrey_rate, gain_certificate, StepMode, Stepper};
use crate::error::{Error, Result};
use crate::gevrey::{estimate_radius, gevrey_weight};
use crate::linear::LinearParams;
use crate::littlewood_paley::{build_partition, DyadicPartition};
use crate::spectral::{inverse, random_radial_field, smooth_random_field, Grid, ProductEngine, SpectralField, Spectrum, State};

/// Any diagnostic above this flags the run as diverged.
pub const BLOW_UP_LIMIT: f64 = 1e6;
/// Transport CFL number in `dt <= CFL * dx / |u|_inf`.
pub const CFL: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.dim, self.n, self.length)
    }
}

/// Seeded initial data; amplitudes are sup norms of `a` and of the largest
/// velocity component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialData {
    /// `|xi|^{-gamma} exp(-|xi| / xi_c)` spectra with seeded phases.
    Random { amplitude: f64, gamma: f64, xi_c: f64, seed: u64 },
    /// Seeded phases on the modes with `|k|_inf <= max_mode`, flat amplitude.
    BandLimited { amplitude: f64, max_mode: i32, seed: u64 },
    /// `|xi|^{1-d} exp(-(|xi| / width)^2)`, the low-frequency profile used for
    /// decay rates. Narrow widths delay the algebraic regime.
    LowFrequency { amplitude: f64, width: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    pub p: f64,
    /// Low/high threshold; the partition default when absent.
    pub k0: Option<i32>,
    pub radius: bool,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            p: 2.0,
            k0: None,
            radius: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: GridConfig,
    pub params: LinearParams,
    /// `None` runs the linear system.
    pub model: Option<CoefficientModel>,
    /// Largest step; the transport CFL may shorten it.
    pub dt: f64,
    /// Smallest step the CFL may demand before the run is abandoned.
    pub dt_min: f64,
    pub t_end: f64,
    pub output_interval: f64,
    pub initial: InitialData,
    pub mode: StepMode,
    pub diagnostics: DiagnosticsConfig,
    pub keep_states: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let grid = self.grid.build()?;
        if let Some(m) = &self.model {
            m.validate()?;
        }
        for (name, v) in [("dt", self.dt), ("t_end", self.t_end), ("output_interval", self.output_interval)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt) {
            return Err(Error::InvalidParameter(format!(
                "dt_min = {} must lie in (0, dt = {}]",
                self.dt_min, self.dt
            )));
        }
        validate_diagnostic_p(grid.dim(), self.diagnostics.p)?;
        if let StepMode::GevreyWeighted { c0 } = self.mode {
            check_gevrey_rate(c0, grid.dim(), &self.params)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum RunStatus {
    Healthy,
    Diverged { t: f64, reason: String },
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub diagnostics: Vec<Diagnostics>,
    /// Unweighted states at the output times when requested.
    pub states: Vec<State>,
    pub status: RunStatus,
    pub steps: usize,
    /// Largest per-step log gain of the weighted multiplier, with its bound.
    pub gain: Option<(f64, f64)>,
    pub final_state: State,
}

fn scale_to_sup(f: &SpectralField, amplitude: f64) -> SpectralField {
    let sup = inverse(f).sup();
    if sup == 0.0 {
        f.clone()
    } else {
        f.scaled(amplitude / sup)
    }
}

pub fn initial_state(grid: &Grid, data: &InitialData) -> Result<State> {
    let d = grid.dim();
    let (amplitude, fields): (f64, Vec<SpectralField>) = match *data {
        InitialData::Random {
            amplitude,
            gamma,
            xi_c,
            seed,
        } => {
            let s = Spectrum::new(gamma, xi_c);
            (
                amplitude,
                (0..=d).map(|c| smooth_random_field(grid, seed.wrapping_add(c as u64 * 7919), s)).collect(),
            )
        }
        InitialData::BandLimited {
            amplitude,
            max_mode,
            seed,
        } => {
            if max_mode < 1 {
                return Err(Error::InvalidParameter(format!("max_mode {max_mode} must be >= 1")));
            }
            let fields = (0..=d)
                .map(|c| {
                    let f = random_radial_field(grid, seed.wrapping_add(c as u64 * 7919), |_| 1.0);
                    f.map(|p, z| {
                        if grid.lattice_index(p).iter().all(|k| k.abs() <= max_mode) {
                            z
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                })
                .collect();
            (amplitude, fields)
        }
        InitialData::LowFrequency { amplitude, width, seed } => {
            if !(width > 0.0) {
                return Err(Error::InvalidParameter(format!("profile width {width} must be > 0")));
            }
            let fields = (0..=d)
                .map(|c| {
                    random_radial_field(grid, seed.wrapping_add(c as u64 * 7919), |r| {
                        r.powf(1.0 - d as f64) * (-(r / width).powi(2)).exp()
                    })
                })
                .collect();
            (amplitude, fields)
        }
    };
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidParameter(format!("amplitude {amplitude} must be finite and >= 0")));
    }
    let a = scale_to_sup(&fields[0], amplitude);
    let u_raw: Vec<SpectralField> = fields[1..].to_vec();
    let u_sup = u_raw.iter().map(|c| inverse(c).sup()).fold(0.0, f64::max);
    let u = if u_sup == 0.0 {
        u_raw
    } else {
        u_raw.iter().map(|c| c.scaled(amplitude / u_sup)).collect()
    };
    State::new(a, u)
}

struct Recorder {
    partition: DyadicPartition,
    tracker: SmallnessTracker,
    p: f64,
    k0: i32,
    radius: bool,
    engine: Option<NonlinearOperator>,
}

impl Recorder {
    fn record(&mut self, t: f64, state: &State) -> Result<Diagnostics> {
        let smallness = self.tracker.push(t, state)?;
        let (low, a_high, u_high) = split_norms(state, self.p, self.k0, &self.partition)?;
        let fit = if self.radius { estimate_radius(&state.a).ok() } else { None };
        let truncation_tail = match &self.engine {
            Some(op) => op.evaluate(state).map(|n| n.truncation_tail).unwrap_or(f64::INFINITY),
            None => 0.0,
        };
        Ok(Diagnostics {
            t,
            energy: 0.5 * state.l2_norm().powi(2),
            mean_a: state.a.mean().re,
            sup_a: inverse(&state.a).sup(),
            smallness,
            low,
            a_high,
            u_high,
            radius: fit.map(|f| f.radius),
            radius_residual: fit.map(|f| f.residual),
            truncation_tail,
        })
    }
}

fn max_velocity(state: &State) -> f64 {
    state.u.iter().map(|c| inverse(c).sup()).fold(0.0, f64::max)
}

pub fn run(config: &SimConfig) -> Result<Trajectory> {
    let grid = config.grid.build()?;
    let initial = initial_state(&grid, &config.initial)?;
    run_from(config, initial)
}

/// Runs from explicit data; the configured initial recipe is ignored.
pub fn run_from(config: &SimConfig, initial: State) -> Result<Trajectory> {
    config.validate()?;
    let grid = config.grid.build()?;
    if *initial.grid() != grid {
        return Err(Error::GridMismatch("initial data and configured grid differ".into()));
    }
    let partition = build_partition(&grid)?;
    let k0 = config.diagnostics.k0.unwrap_or_else(|| partition.default_k0());
    let mut recorder = Recorder {
        tracker: SmallnessTracker::new(&partition, config.diagnostics.p, k0)?,
        partition,
        p: config.diagnostics.p,
        k0,
        radius: config.diagnostics.radius,
        engine: config
            .model
            .as_ref()
            .map(|m| NonlinearOperator::new(ProductEngine::padded(&grid), config.params, m))
            .transpose()?,
    };
    let mut stepper = Stepper::new(&grid, config.params, config.model.as_ref())?;
    let c0 = match config.mode {
        StepMode::Plain => None,
        StepMode::GevreyWeighted { c0 } => Some(c0),
    };
    let c1 = config.params.decay_rate();

    let mut plain = initial;
    // Weighted variable in Gevrey mode; the weight is 1 at t = 0.
    let mut weighted = plain.clone();
    let mut traj = Trajectory {
        times: vec![0.0],
        diagnostics: vec![recorder.record(0.0, &plain)?],
        states: if config.keep_states { vec![plain.clone()] } else { Vec::new() },
        status: RunStatus::Healthy,
        steps: 0,
        gain: c0.map(|c| (0.0, gain_certificate(c, grid.dim(), c1))),
        final_state: plain.clone(),
    };
    let outputs = (config.t_end / config.output_interval - 1e-9).ceil().max(1.0) as usize;
    let mut t = 0.0;
    'outer: for k in 1..=outputs {
        let target = (k as f64 * config.output_interval).min(config.t_end);
        let span = target - t;
        let umax = max_velocity(&plain);
        let cfl = if umax > 0.0 { CFL * grid.dx() / umax } else { f64::INFINITY };
        let h_allowed = config.dt.min(cfl);
        if h_allowed < config.dt_min {
            traj.status = RunStatus::Diverged {
                t,
                reason: format!("transport CFL demands dt = {h_allowed:e} below dt_min"),
            };
            break;
        }
        let n = (span / h_allowed - 1e-9).ceil().max(1.0) as usize;
        let h = span / n as f64;
        for i in 0..n {
            let t_i = t + i as f64 * h;
            let result = match c0 {
                None => stepper.step(&plain, h).map(|s| (s, None)),
                Some(c) => stepper.gevrey_step(&weighted, t_i, h, c).map(|(w, g)| (w, Some(g))),
            };
            let next = match result {
                Ok(x) => x,
                Err(e) => {
                    traj.status = RunStatus::Diverged {
                        t: t_i,
                        reason: e.to_string(),
                    };
                    break 'outer;
                }
            };
            traj.steps += 1;
            match next {
                (s, None) => plain = s,
                (w, Some(g)) => {
                    plain = w.map_fields_result(|f| gevrey_weight(f, -(c0.unwrap() * (t_i + h)).sqrt()))?;
                    weighted = w;
                    if let Some(gain) = traj.gain.as_mut() {
                        gain.0 = gain.0.max(g);
                    }
                }
            }
            if !plain.is_finite() {
                traj.status = RunStatus::Diverged {
                    t: t_i + h,
                    reason: "non-finite state".into(),
                };
                break 'outer;
            }
        }
        t = target;
        let diag = recorder.record(t, &plain)?;
        if !diag.is_finite() || diag.largest() > BLOW_UP_LIMIT {
            traj.status = RunStatus::Diverged {
                t,
                reason: format!("diagnostic size {:e} exceeds {BLOW_UP_LIMIT:e}", diag.largest()),
            };
            break;
        }
        traj.times.push(t);
        traj.diagnostics.push(diag);
        if config.keep_states {
            traj.states.push(plain.clone());
        }
        traj.final_state = plain.clone();
    }
    Ok(traj)
}
