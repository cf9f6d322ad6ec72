//! Coefficient functions and the change of units to the normalized system.

use serde::{Deserialize, Serialize};

use crate::bony::{PowerSeries, DEFAULT_TRUNCATION};
use crate::error::{Error, Result};
use crate::linear::LinearParams;

const UNIT_TOLERANCE: f64 = 1e-12;

/// Shape functions in the normalized density fluctuation `a`: viscosities and
/// capillarity as `mu(1 + a)`, `lambda(1 + a)`, `kappa(1 + a)`, pressure as
/// its slope `P'(1 + a)`. Each equals 1 at `a = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientModel {
    pub mu: PowerSeries,
    pub lambda: PowerSeries,
    pub kappa: PowerSeries,
    pub pressure_slope: PowerSeries,
    pub truncation: usize,
}

/// Series that enter the nonlinear terms; all vanish at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedSeries {
    pub mu_tilde: PowerSeries,
    pub lambda_tilde: PowerSeries,
    pub kappa_tilde: PowerSeries,
    pub kappa_tilde_prime: PowerSeries,
    /// `a / (1 + a)`.
    pub inertia: PowerSeries,
    /// `1 - P'(1 + a) / (1 + a)`.
    pub pressure: PowerSeries,
}

impl CoefficientModel {
    pub fn new(
        mu: PowerSeries,
        lambda: PowerSeries,
        kappa: PowerSeries,
        pressure_slope: PowerSeries,
        truncation: usize,
    ) -> Result<Self> {
        let m = CoefficientModel {
            mu,
            lambda,
            kappa,
            pressure_slope,
            truncation,
        };
        m.validate()?;
        Ok(m)
    }

    /// Constant viscosities and capillarity with the isothermal law `P = rho`.
    pub fn isothermal() -> Self {
        let one = PowerSeries::polynomial(vec![1.0]);
        CoefficientModel {
            mu: one.clone(),
            lambda: one.clone(),
            kappa: one.clone(),
            pressure_slope: one,
            truncation: DEFAULT_TRUNCATION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, s) in [
            ("mu", &self.mu),
            ("lambda", &self.lambda),
            ("kappa", &self.kappa),
            ("pressure_slope", &self.pressure_slope),
        ] {
            if (s.coeff(0) - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::InvalidParameter(format!(
                    "{name} must equal 1 at the reference density, got {}",
                    s.coeff(0)
                )));
            }
        }
        if self.truncation < 2 {
            return Err(Error::InvalidParameter(format!(
                "truncation order {} must be >= 2",
                self.truncation
            )));
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedSeries {
        let kappa_tilde = self.kappa.with_constant(0.0);
        let pressure = self
            .pressure_slope
            .mul(&PowerSeries::reciprocal_one_plus_z())
            .scaled(-1.0)
            .with_constant(0.0);
        DerivedSeries {
            mu_tilde: self.mu.with_constant(0.0),
            lambda_tilde: self.lambda.with_constant(0.0),
            kappa_tilde_prime: kappa_tilde.derivative(),
            kappa_tilde,
            inertia: PowerSeries::z_over_one_plus_z(),
            pressure,
        }
    }

    /// Smallest convergence radius among the derived functions.
    pub fn analyticity_radius(&self) -> f64 {
        let d = self.derived();
        [
            d.mu_tilde.radius(),
            d.lambda_tilde.radius(),
            d.kappa_tilde.radius(),
            d.inertia.radius(),
            d.pressure.radius(),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

/// Physical constants and shape series in powers of `rho - rho_ref`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawModel {
    pub rho_ref: f64,
    pub mu_ref: f64,
    pub lambda_ref: f64,
    pub kappa_ref: f64,
    /// Viscosity and capillarity shapes, equal to 1 at `rho_ref`.
    pub mu: PowerSeries,
    pub lambda: PowerSeries,
    pub kappa: PowerSeries,
    /// Pressure law `P(rho)`; its slope at `rho_ref` sets the pressure scale.
    pub pressure: PowerSeries,
}

/// Units of the normalized variables, for reporting in original units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingMaps {
    pub density: f64,
    pub velocity: f64,
    pub time: f64,
    pub length: f64,
    /// `2 mu_ref + lambda_ref`.
    pub viscosity: f64,
    /// `P(rho_ref)`, invisible to the dynamics but kept for the inverse map.
    pub pressure_offset: f64,
}

impl ScalingMaps {
    pub fn time_to_physical(&self, t: f64) -> f64 {
        t * self.time
    }

    pub fn length_to_physical(&self, x: f64) -> f64 {
        x * self.length
    }

    pub fn density_to_physical(&self, rho: f64) -> f64 {
        rho * self.density
    }

    pub fn velocity_to_physical(&self, u: f64) -> f64 {
        u * self.velocity
    }
}

/// Normalized parameters, shape functions and unit maps.
///
/// With `nu = 2 mu_ref + lambda_ref` and `p = P'(rho_ref)`, time is measured
/// in units of `nu / (rho_ref p)`, length in `nu / (rho_ref sqrt p)`, and the
/// constants become `(1, mu_ref / nu, lambda_ref / nu, 1, kappa_ref rho_ref^2 / nu^2)`.
pub fn normalize(raw: &RawModel, truncation: usize) -> Result<(LinearParams, CoefficientModel, ScalingMaps)> {
    if !(raw.rho_ref > 0.0) {
        return Err(Error::InvalidParameter(format!("reference density {} must be > 0", raw.rho_ref)));
    }
    let nu = 2.0 * raw.mu_ref + raw.lambda_ref;
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("2 mu + lambda = {nu} must be > 0")));
    }
    let p_slope = raw.pressure.coeff(1);
    if !(p_slope > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pressure slope {p_slope} at the reference density must be > 0"
        )));
    }
    let rho = raw.rho_ref;
    let params = LinearParams {
        capillarity: raw.kappa_ref * rho * rho / (nu * nu),
        shear: raw.mu_ref / nu,
        bulk: raw.lambda_ref / nu,
    };
    params.validate()?;
    // rho - rho_ref = rho_ref a.
    let model = CoefficientModel::new(
        raw.mu.rescaled_argument(rho),
        raw.lambda.rescaled_argument(rho),
        raw.kappa.rescaled_argument(rho),
        raw.pressure.derivative().rescaled_argument(rho).scaled(1.0 / p_slope),
        truncation,
    )?;
    let maps = ScalingMaps {
        density: rho,
        velocity: p_slope.sqrt(),
        time: nu / (rho * p_slope),
        length: nu / (rho * p_slope.sqrt()),
        viscosity: nu,
        pressure_offset: raw.pressure.coeff(0),
    };
    Ok((params, model, maps))
}

/// Inverse of [`normalize`].
pub fn denormalize(params: &LinearParams, model: &CoefficientModel, maps: &ScalingMaps) -> Result<RawModel> {
    let rho = maps.density;
    let nu = maps.viscosity;
    let p_slope = maps.velocity * maps.velocity;
    let slope = model.pressure_slope.scaled(p_slope).rescaled_argument(1.0 / rho);
    // Integrate the slope back to the pressure law.
    let mut coeffs = vec![maps.pressure_offset];
    coeffs.extend(slope.coeffs().iter().enumerate().map(|(n, c)| c / (n + 1) as f64));
    Ok(RawModel {
        rho_ref: rho,
        mu_ref: params.shear * nu,
        lambda_ref: params.bulk * nu,
        kappa_ref: params.capillarity * nu * nu / (rho * rho),
        mu: model.mu.rescaled_argument(1.0 / rho),
        lambda: model.lambda.rescaled_argument(1.0 / rho),
        kappa: model.kappa.rescaled_argument(1.0 / rho),
        pressure: PowerSeries::new(coeffs, slope.radius())?,
    })
}
