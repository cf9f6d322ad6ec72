//! Effective-velocity frame: `v = Qu + (-Delta)^{-1} grad a` and
//! `w = v + alpha grad a` with `alpha (1 - alpha) = capillarity`.
//!
//! Along the linear flow `w` obeys a heat equation with diffusivity
//! `1 - alpha` and `v` one with diffusivity `alpha`, coupled only through
//! lower-order terms. For capillarity above 1/4 `alpha` is complex and the
//! frame fields are complex valued.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::mode::{propagate_mode_exact, ModeState};
use super::params::LinearParams;
use super::semigroup::apply_semigroup;
use crate::error::{Error, Result};
use crate::spectral::{SpectralField, State};

/// `(1 + sqrt(1 - 4 capillarity)) / 2`, complex past capillarity 1/4.
pub fn frame_alpha(capillarity: f64) -> Complex64 {
    0.5 * (Complex64::new(1.0, 0.0) + Complex64::new(1.0 - 4.0 * capillarity, 0.0).sqrt())
}

#[derive(Clone, Debug)]
pub struct EffectiveFrame {
    pub alpha: Complex64,
    pub v: Vec<SpectralField>,
    pub w: Vec<SpectralField>,
}

pub fn effective_frame(state: &State, params: &LinearParams) -> Result<EffectiveFrame> {
    params.validate()?;
    let grid = state.grid().clone();
    let alpha = frame_alpha(params.capillarity);
    let i = Complex64::new(0.0, 1.0);
    let longitudinal = |p: usize| -> Option<(Vec<f64>, Complex64, Complex64)> {
        let k = grid.deriv_wavevector(p);
        let r2: f64 = k.iter().map(|x| x * x).sum();
        if p == 0 || r2 == 0.0 {
            return None;
        }
        // Qu + (-Delta)^{-1} grad a has coefficient (k.u + i a) k / r^2.
        let ku: Complex64 = k.iter().zip(&state.u).map(|(x, c)| c.coeffs()[p] * x).sum();
        let a = state.a.coeffs()[p];
        Some((k.to_vec(), (ku + i * a) / r2, i * a))
    };
    let d = grid.dim();
    let v = (0..d)
        .map(|c| SpectralField::from_fn(&grid, |p| longitudinal(p).map_or(Complex64::new(0.0, 0.0), |(k, s, _)| s * k[c])))
        .collect();
    let w = (0..d)
        .map(|c| {
            SpectralField::from_fn(&grid, |p| {
                longitudinal(p).map_or(Complex64::new(0.0, 0.0), |(k, s, ia)| (s + alpha * ia) * k[c])
            })
        })
        .collect();
    Ok(EffectiveFrame { alpha, v, w })
}

/// Residuals of the two frame equations, relative to the state norm.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrameResiduals {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub w_residual: f64,
    pub v_residual: f64,
    pub state_norm: f64,
}

/// Evolves `state` to time `t` with the exact flow and measures how well
/// the frame equations hold there, with time derivatives taken by a
/// one-sided five-point stencil whose step follows each mode's stiffness.
pub fn frame_residuals(state: &State, t: f64, params: &LinearParams) -> Result<FrameResiduals> {
    params.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time {t} must be finite and >= 0")));
    }
    let grid = state.grid().clone();
    let alpha = frame_alpha(params.capillarity);
    let kappa = params.capillarity;
    let i = Complex64::new(0.0, 1.0);
    let sums: Vec<(f64, f64)> = (1..grid.len())
        .into_par_iter()
        .map(|p| -> Result<(f64, f64)> {
            let k = grid.deriv_wavevector(p);
            let r = k.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r == 0.0 {
                return Ok((0.0, 0.0));
            }
            let along: Complex64 = k.iter().zip(&state.u).map(|(x, c)| c.coeffs()[p] * (x / r)).sum();
            let start = ModeState::new(r, state.a.coeffs()[p], i * along);
            // Longitudinal coefficients of (grad a, v, w) along k / r.
            let frame = |s: f64| -> Result<(Complex64, Complex64, Complex64)> {
                let m = propagate_mode_exact(&start, s, params)?;
                let grad_a = i * r * m.a;
                let v = -i * m.v + i * m.a / r;
                Ok((grad_a, v, v + alpha * grad_a))
            };
            let h = 1e-3 / (r * r * (1.0 + kappa)).max(1.0);
            let samples = (0..5).map(|n| frame(t + n as f64 * h)).collect::<Result<Vec<_>>>()?;
            let stencil = [-25.0, 48.0, -36.0, 16.0, -3.0];
            let mut dv = Complex64::new(0.0, 0.0);
            let mut dw = Complex64::new(0.0, 0.0);
            for (s, c) in samples.iter().zip(stencil) {
                dv += s.1 * c;
                dw += s.2 * c;
            }
            dv /= 12.0 * h;
            dw /= 12.0 * h;
            let (grad_a, v, w) = samples[0];
            let lower = v - grad_a / (r * r);
            let rw = dw + (1.0 - alpha) * r * r * w - (-alpha * grad_a + lower);
            let rv = dv + alpha * r * r * v - (-(kappa / alpha) * r * r * w + lower);
            Ok((rw.norm_sqr(), rv.norm_sqr()))
        })
        .collect::<Result<_>>()?;
    let vol = grid.volume();
    let (sw, sv) = sums.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let state_norm = apply_semigroup(state, t, params)?.l2_norm();
    if state_norm == 0.0 {
        return Err(Error::InvalidParameter("state vanishes; relative residuals undefined".into()));
    }
    Ok(FrameResiduals {
        alpha_re: alpha.re,
        alpha_im: alpha.im,
        w_residual: (sw * vol).sqrt() / state_norm,
        v_residual: (sv * vol).sqrt() / state_norm,
        state_norm,
    })
}
