//! The linear flow on whole fields and the complex heat smoothing check.

use num_complex::Complex64;
use rayon::prelude::*;

use super::mode::propagator;
use super::params::LinearParams;
use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicPartition;
use crate::spectral::ops::lp_norm_values;
use crate::spectral::{inverse_complex, Grid, SpectralField, State};

/// Per-mode data of the linear flow over a fixed time step.
#[derive(Clone, Debug)]
struct ModeFlow {
    khat: Vec<f64>,
    matrix: [[f64; 2]; 2],
    transverse: f64,
}

/// The linear flow over one time `t`, tabulated once per grid so repeated
/// application costs one small matrix product per mode.
///
/// Each mode splits into `(a, v)` with `v = i k.u` and a transverse part that
/// decays at rate `shear |xi|^2`. The mean and modes whose derivative
/// wavevector vanishes are left unchanged.
#[derive(Clone, Debug)]
pub struct FlowTable {
    grid: Grid,
    t: f64,
    modes: Vec<Option<ModeFlow>>,
}

impl FlowTable {
    pub fn new(grid: &Grid, t: f64, params: &LinearParams) -> Result<Self> {
        params.validate()?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("time {t} must be finite and >= 0")));
        }
        let modes = (0..grid.len())
            .into_par_iter()
            .map(|p| -> Result<Option<ModeFlow>> {
                let k = grid.deriv_wavevector(p);
                let r = k.iter().map(|x| x * x).sum::<f64>().sqrt();
                if p == 0 || r == 0.0 || t == 0.0 {
                    return Ok(None);
                }
                let m = propagator(r, t, params)?.unscaled();
                // exp(t M) is real for a real generator.
                let matrix = [[m[0][0].re, m[0][1].re], [m[1][0].re, m[1][1].re]];
                Ok(Some(ModeFlow {
                    khat: k.iter().map(|x| x / r).collect(),
                    matrix,
                    transverse: (-params.shear * r * r * t).exp(),
                }))
            })
            .collect::<Result<_>>()?;
        Ok(FlowTable {
            grid: grid.clone(),
            t,
            modes,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn apply(&self, state: &State) -> Result<State> {
        if *state.grid() != self.grid {
            return Err(Error::GridMismatch("state and flow table use different grids".into()));
        }
        let d = self.grid.dim();
        let i = Complex64::new(0.0, 1.0);
        let evolved: Vec<(Complex64, Vec<Complex64>)> = (0..self.grid.len())
            .into_par_iter()
            .map(|p| {
                let a = state.a.coeffs()[p];
                let u: Vec<Complex64> = state.u.iter().map(|c| c.coeffs()[p]).collect();
                let Some(mf) = &self.modes[p] else {
                    return (a, u);
                };
                let along: Complex64 = mf.khat.iter().zip(&u).map(|(kh, c)| c * kh).sum();
                let v = i * along;
                let m = mf.matrix;
                let a_t = a * m[0][0] + v * m[0][1];
                let v_t = a * m[1][0] + v * m[1][1];
                let along_t = -i * v_t;
                let u_t = (0..d)
                    .map(|c| (u[c] - along * mf.khat[c]) * mf.transverse + along_t * mf.khat[c])
                    .collect();
                (a_t, u_t)
            })
            .collect();
        let a = SpectralField::from_fn(&self.grid, |p| evolved[p].0);
        let u = (0..d)
            .map(|c| SpectralField::from_fn(&self.grid, |p| evolved[p].1[c]))
            .collect();
        State::new(a, u)
    }
}

/// Exact solution of the linearized system at time `t`.
pub fn apply_semigroup(state: &State, t: f64, params: &LinearParams) -> Result<State> {
    FlowTable::new(state.grid(), t, params)?.apply(state)
}

/// Rate used by [`complex_heat_check`] in `exp(-c Re(beta) t 4^j)`.
pub const HEAT_RATE: f64 = 0.125;

/// Smallest `C` with `|D_j e^{beta t Delta} z|_p <= C e^{-c r t 4^j} |D_j z|_p`
/// over the sampled times, for a caller-chosen reference rate `r`.
pub fn heat_block_constant(
    beta: Complex64,
    reference_rate: f64,
    c: f64,
    z: &SpectralField,
    j: i32,
    p: f64,
    times: &[f64],
    partition: &DyadicPartition,
) -> Result<f64> {
    let grid = partition.grid().clone();
    if *z.grid() != grid {
        return Err(Error::GridMismatch("datum and partition live on different grids".into()));
    }
    let weights = partition.weights(j);
    let block_norm = |t: f64| -> Result<f64> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for &(q, w) in weights {
            let r2 = grid.norms()[q].powi(2);
            coeffs[q] = z.coeffs()[q] * w * (-beta * t * r2).exp();
        }
        let values = inverse_complex(&SpectralField::from_coeffs(&grid, coeffs)?);
        let moduli: Vec<f64> = values.iter().map(|v| v.norm()).collect();
        lp_norm_values(&moduli, &grid, p)
    };
    let base = block_norm(0.0)?;
    if base == 0.0 {
        return Err(Error::InvalidParameter(format!("block {j} of the datum is empty")));
    }
    let scale = 4f64.powi(j);
    let mut worst: f64 = 0.0;
    for &t in times {
        let ratio = block_norm(t)? / base * (c * reference_rate * t * scale).exp();
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// `(C, c)` for the complex heat smoothing bound at the fixed rate `c = 1/8`.
pub fn complex_heat_check(
    beta: Complex64,
    z: &SpectralField,
    j: i32,
    p: f64,
    times: &[f64],
    partition: &DyadicPartition,
) -> Result<(f64, f64)> {
    if !(beta.re > 0.0) {
        return Err(Error::InvalidParameter(format!("Re beta = {} must be positive", beta.re)));
    }
    let cst = heat_block_constant(beta, beta.re, HEAT_RATE, z, j, p, times, partition)?;
    Ok((cst, HEAT_RATE))
}
