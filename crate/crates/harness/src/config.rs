//! TOML run configuration: sections `[grid]`, `[physics]`, `[coefficients]`,
//! `[time]`, `[initial]` and `[diagnostics]`. Unknown keys are errors, every
//! omitted key has a default, and validation names the key at fault.

use std::f64::consts::PI;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nsk_core::bony::{PowerSeries, DEFAULT_TRUNCATION};
use nsk_core::linear::LinearParams;
use nsk_core::solver::{
    check_gevrey_rate, validate_diagnostic_p, CoefficientModel, DiagnosticsConfig, GridConfig, InitialData,
    SimConfig, StepMode,
};
use nsk_core::spectral::Grid;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub capillarity: f64,
    #[serde(default = "default_shear")]
    pub shear: f64,
    /// Defaults to `1 - 2 shear`; if given it must satisfy that relation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bulk: Option<f64>,
}

/// Shape functions as coefficient lists in the density fluctuation; each
/// list starts with 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsSection {
    /// `false` runs the linear system and ignores the lists.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "one")]
    pub mu: Vec<f64>,
    #[serde(default = "one")]
    pub lambda: Vec<f64>,
    #[serde(default = "one")]
    pub kappa: Vec<f64>,
    #[serde(default = "one")]
    pub pressure_slope: Vec<f64>,
    /// Common convergence radius of the lists; polynomials when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

impl Default for CoefficientsSection {
    fn default() -> Self {
        CoefficientsSection {
            nonlinear: true,
            mu: one(),
            lambda: one(),
            kappa: one(),
            pressure_slope: one(),
            radius: None,
            truncation: DEFAULT_TRUNCATION,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Plain,
    GevreyWeighted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_output")]
    pub output_interval: f64,
    #[serde(default = "default_mode")]
    pub mode: ModeName,
    /// Gevrey rate; defaults to the largest admissible value `c1 / d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            dt: default_dt(),
            dt_min: default_dt_min(),
            t_end: default_t_end(),
            output_interval: default_output(),
            mode: default_mode(),
            c0: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum InitialSection {
    Random {
        amplitude: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default = "default_xi_c")]
        xi_c: f64,
    },
    BandLimited {
        amplitude: f64,
        max_mode: i32,
    },
    LowFrequency {
        amplitude: f64,
        #[serde(default = "default_width")]
        width: f64,
    },
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection::Random {
            amplitude: 1e-2,
            gamma: default_gamma(),
            xi_c: default_xi_c(),
        }
    }
}

impl InitialSection {
    fn recipe(&self, seed: u64) -> InitialData {
        match *self {
            InitialSection::Random { amplitude, gamma, xi_c } => InitialData::Random {
                amplitude,
                gamma,
                xi_c,
                seed,
            },
            InitialSection::BandLimited { amplitude, max_mode } => InitialData::BandLimited {
                amplitude,
                max_mode,
                seed,
            },
            InitialSection::LowFrequency { amplitude, width } => InitialData::LowFrequency {
                amplitude,
                width,
                seed,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<i32>,
    #[serde(default = "yes")]
    pub radius: bool,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection {
            p: default_p(),
            k0: None,
            radius: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    #[serde(default)]
    pub coefficients: CoefficientsSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

fn two_pi() -> f64 {
    2.0 * PI
}
fn default_shear() -> f64 {
    0.3
}
fn yes() -> bool {
    true
}
fn one() -> Vec<f64> {
    vec![1.0]
}
fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}
fn default_dt() -> f64 {
    0.05
}
fn default_dt_min() -> f64 {
    1e-6
}
fn default_t_end() -> f64 {
    1.0
}
fn default_output() -> f64 {
    0.1
}
fn default_mode() -> ModeName {
    ModeName::Plain
}
fn default_gamma() -> f64 {
    1.5
}
fn default_xi_c() -> f64 {
    2.0
}
fn default_width() -> f64 {
    4.0
}
fn default_p() -> f64 {
    2.0
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        bail!("{key} = {v}: must be positive and finite")
    }
}

fn series(key: &str, coeffs: &[f64], radius: Option<f64>) -> Result<PowerSeries> {
    if coeffs.first() != Some(&1.0) {
        bail!("coefficients.{key}: the constant term must be 1 after normalization, got {coeffs:?}");
    }
    match radius {
        None => Ok(PowerSeries::polynomial(coeffs.to_vec())),
        Some(r) => PowerSeries::new(coeffs.to_vec(), r).map_err(|e| anyhow!("coefficients.radius: {e}")),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| anyhow!("invalid config: {e}"))?;
        cfg.params()?;
        Ok(cfg)
    }

    /// Echo of the configuration with every default written out.
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    fn params(&self) -> Result<LinearParams> {
        let ph = &self.physics;
        if !(ph.capillarity > 0.0 && ph.capillarity.is_finite()) {
            bail!("physics.capillarity = {}: capillarity must be positive", ph.capillarity);
        }
        positive("physics.shear", ph.shear)?;
        let bulk = 1.0 - 2.0 * ph.shear;
        if let Some(b) = ph.bulk {
            if (b - bulk).abs() > 1e-12 {
                bail!("physics.bulk = {b}: normalization needs 2 shear + bulk = 1, i.e. bulk = {bulk}");
            }
        }
        LinearParams::new(ph.capillarity, ph.shear).map_err(|e| anyhow!("physics: {e}"))
    }

    fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        if !(1..=3).contains(&g.dim) {
            bail!("grid.dim = {}: must be 1, 2 or 3", g.dim);
        }
        if !(g.n >= 8 && g.n.is_power_of_two()) {
            bail!("grid.n = {}: must be a power of two, at least 8", g.n);
        }
        positive("grid.length", g.length)?;
        Grid::new(g.dim, g.n, g.length).map_err(|e| anyhow!("grid: {e}"))
    }

    fn model(&self) -> Result<Option<CoefficientModel>> {
        let c = &self.coefficients;
        if !c.nonlinear {
            return Ok(None);
        }
        if c.truncation < 2 {
            bail!("coefficients.truncation = {}: must be at least 2", c.truncation);
        }
        let model = CoefficientModel::new(
            series("mu", &c.mu, c.radius)?,
            series("lambda", &c.lambda, c.radius)?,
            series("kappa", &c.kappa, c.radius)?,
            series("pressure_slope", &c.pressure_slope, c.radius)?,
            c.truncation,
        )
        .map_err(|e| anyhow!("coefficients: {e}"))?;
        Ok(Some(model))
    }

    /// Fully validated solver configuration; `seed` drives the initial data.
    pub fn to_sim_config(&self, seed: u64) -> Result<SimConfig> {
        let params = self.params()?;
        let grid = self.grid()?;
        let model = self.model()?;
        let t = &self.time;
        for (key, v) in [
            ("time.dt", t.dt),
            ("time.dt_min", t.dt_min),
            ("time.t_end", t.t_end),
            ("time.output_interval", t.output_interval),
        ] {
            positive(key, v)?;
        }
        if t.dt_min > t.dt {
            bail!("time.dt_min = {}: must not exceed time.dt = {}", t.dt_min, t.dt);
        }
        let mode = match t.mode {
            ModeName::Plain => {
                if t.c0.is_some() {
                    bail!("time.c0: only meaningful with mode = \"gevrey-weighted\"");
                }
                StepMode::Plain
            }
            ModeName::GevreyWeighted => {
                let c0 = t.c0.unwrap_or(params.decay_rate() / grid.dim() as f64);
                check_gevrey_rate(c0, grid.dim(), &params).map_err(|e| anyhow!("time.c0 = {c0}: {e}"))?;
                StepMode::GevreyWeighted { c0 }
            }
        };
        let d = &self.diagnostics;
        validate_diagnostic_p(grid.dim(), d.p).map_err(|e| anyhow!("diagnostics.p = {}: {e}", d.p))?;
        let cfg = SimConfig {
            grid: GridConfig {
                dim: self.grid.dim,
                n: self.grid.n,
                length: self.grid.length,
            },
            params,
            model,
            dt: t.dt,
            dt_min: t.dt_min,
            t_end: t.t_end,
            output_interval: t.output_interval,
            initial: self.initial.recipe(seed),
            mode,
            diagnostics: DiagnosticsConfig {
                p: d.p,
                k0: d.k0,
                radius: d.radius,
            },
            keep_states: false,
        };
        cfg.validate().map_err(|e| anyhow!("{e}"))?;
        Ok(cfg)
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RunConfig::from_toml(&text).with_context(|| format!("in {}", path.display()))
}
