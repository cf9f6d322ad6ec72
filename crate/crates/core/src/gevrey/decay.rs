use serde::{Deserialize, Serialize};

use super::radius::linear_fit;
use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayModel {
    /// `C t^{-gamma}`.
    Algebraic,
    /// `C exp(-c sqrt(t))`.
    Stretched,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub model: DecayModel,
    /// `gamma` or `c`.
    pub rate: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Least-squares fit of `log norm` against `log t` or `sqrt t` over the
/// samples with `t` in `window`.
pub fn fit_decay(series: &[(f64, f64)], model: DecayModel, window: (f64, f64)) -> Result<DecayFit> {
    let (ta, tb) = window;
    if !(ta > 0.0 && tb > ta) {
        return Err(Error::DegenerateFit(format!("window [{ta}, {tb}]")));
    }
    let inside: Vec<(f64, f64)> = series.iter().copied().filter(|&(t, _)| t >= ta && t <= tb).collect();
    if inside.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            need: MIN_FIT_SAMPLES,
            got: inside.len(),
        });
    }
    if let Some(&(t, v)) = inside.iter().find(|&&(_, v)| !(v > 0.0)) {
        return Err(Error::DegenerateFit(format!("norm {v} at t = {t} is not positive")));
    }
    let pts: Vec<(f64, f64)> = inside
        .iter()
        .map(|&(t, v)| {
            let x = match model {
                DecayModel::Algebraic => t.ln(),
                DecayModel::Stretched => t.sqrt(),
            };
            (x, v.ln())
        })
        .collect();
    let (slope, intercept, _) = linear_fit(&pts);
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let r_squared = if ss_tot <= 1e-30 * pts.len() as f64 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(DecayFit {
        model,
        rate: -slope,
        prefactor: intercept.exp(),
        r_squared,
        window,
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..=40).map(|i| 1.0 + 0.2 * i as f64).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn synthetic_rates() {
        let fit = fit_decay(&samples(|t| 5.0 / t), DecayModel::Algebraic, (1.0, 9.0)).unwrap();
        assert!((fit.rate - 1.0).abs() < 0.01 && (fit.prefactor - 5.0).abs() < 1e-9);
        let fit = fit_decay(&samples(|t| 3.0 * (-2.0 * t.sqrt()).exp()), DecayModel::Stretched, (1.0, 9.0)).unwrap();
        assert!((fit.rate - 2.0).abs() < 0.02 && fit.r_squared > 0.999);
        let fit = fit_decay(&samples(|_| 4.0), DecayModel::Algebraic, (1.0, 9.0)).unwrap();
        assert!(fit.rate.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_series() {
        assert!(fit_decay(&samples(|t| 1.0 / t), DecayModel::Algebraic, (2.0, 1.0)).is_err());
        assert!(fit_decay(&samples(|t| 1.0 / t), DecayModel::Algebraic, (1.0, 1.5)).is_err());
        assert!(fit_decay(&samples(|t| t - 3.0), DecayModel::Algebraic, (1.0, 9.0)).is_err());
    }
}
