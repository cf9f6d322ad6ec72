//! Per-mode linear dynamics of `(a^, v^)` with `v = Lambda^{-1} div u`:
//! `d/dt (a, v) = M (a, v)`, `M = [[0, -xi], [xi (1 + k xi^2), -xi^2]]`.

use num_complex::Complex64;
use serde::Serialize;

use super::params::LinearParams;
use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn mat_vec(m: &Mat2, x: [Complex64; 2]) -> [Complex64; 2] {
    [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Spectral norm of a 2x2 complex matrix.
pub fn mat_norm(m: &Mat2) -> f64 {
    // Largest eigenvalue of m^* m.
    let mut g = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
        }
    }
    let tr = (g[0][0] + g[1][1]).re;
    let det = (g[0][0] * g[1][1] - g[0][1] * g[1][0]).re;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    (0.5 * tr + disc).max(0.0).sqrt()
}

/// Mode amplitudes at one frequency modulus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeState {
    pub xi: f64,
    pub a: Complex64,
    pub v: Complex64,
}

impl ModeState {
    pub fn new(xi: f64, a: Complex64, v: Complex64) -> Self {
        ModeState { xi, a, v }
    }

    /// `|(a, xi a, v)|`.
    pub fn weighted_norm(&self) -> f64 {
        ((1.0 + self.xi * self.xi) * self.a.norm_sqr() + self.v.norm_sqr()).sqrt()
    }

    fn vec(&self) -> [Complex64; 2] {
        [self.a, self.v]
    }
}

pub fn mode_generator(xi: f64, params: &LinearParams) -> Result<Mat2> {
    if !(xi > 0.0) {
        return Err(Error::InvalidParameter(format!("mode modulus {xi} must be > 0")));
    }
    let k = params.capillarity;
    Ok([[c(0.0), c(-xi)], [c(xi * (1.0 + k * xi * xi)), c(-xi * xi)]])
}

/// `tr(M)^2 - 4 det(M) = xi^2 ((1 - 4k) xi^2 - 4)`; zero where the
/// eigenvalues of `M` coalesce.
pub fn generator_discriminant(xi: f64, capillarity: f64) -> f64 {
    xi * xi * ((1.0 - 4.0 * capillarity) * xi * xi - 4.0)
}

/// Relative size of the discriminant below which the Jordan branch is used.
pub const JORDAN_TOLERANCE: f64 = 1e-10;

/// `sinh(z) / z`, with a series near zero.
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 0.1 {
        let z2 = z * z;
        let mut term = c(1.0);
        let mut sum = c(1.0);
        for k in 1..10 {
            term = term * z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    } else {
        z.sinh() / z
    }
}

/// `exp(t M) = exp(scale) * P` with `P` bounded, so tiny propagators can be
/// compared without underflow.
#[derive(Clone, Copy, Debug)]
pub struct ScaledPropagator {
    pub log_scale: f64,
    pub matrix: Mat2,
}

impl ScaledPropagator {
    pub fn unscaled(&self) -> Mat2 {
        let s = self.log_scale.exp();
        let m = self.matrix;
        [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
    }
}

/// Closed-form `exp(t M)` written as `exp(m t) [cosh(s t) I + sinh(s t)/s (M - m I)]`
/// with `m = tr M / 2` and `s^2 = disc / 4`.
pub fn propagator(xi: f64, t: f64, params: &LinearParams) -> Result<ScaledPropagator> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time {t} must be >= 0")));
    }
    let m_gen = mode_generator(xi, params)?;
    let m = -0.5 * xi * xi;
    let disc = generator_discriminant(xi, params.capillarity);
    let shifted = [[m_gen[0][0] - m, m_gen[0][1]], [m_gen[1][0], m_gen[1][1] - m]];
    let scale = xi.powi(4).max(1.0);
    let (log_scale, ch, sh) = if disc.abs() < JORDAN_TOLERANCE * scale {
        // Coalesced eigenvalues: exp(t M) = exp(m t) (I + t (M - m I)).
        (m * t, c(1.0), c(t))
    } else if disc > 0.0 {
        let s = 0.5 * disc.sqrt();
        let e = (-2.0 * s * t).exp();
        // Factor exp((m + s) t) out; the rest stays within [0, 1].
        let sh = if s * t < 0.05 {
            sinhc(c(s * t)) * t * (-s * t).exp()
        } else {
            c((1.0 - e) / (2.0 * s))
        };
        ((m + s) * t, c(0.5 * (1.0 + e)), sh)
    } else {
        let w = 0.5 * (-disc).sqrt();
        let z = Complex64::new(0.0, w * t);
        (m * t, c((w * t).cos()), sinhc(z) * t)
    };
    let mut matrix = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { ch } else { c(0.0) };
            matrix[i][j] = id + sh * shifted[i][j];
        }
    }
    Ok(ScaledPropagator { log_scale, matrix })
}

pub fn propagate_mode_exact(state: &ModeState, t: f64, params: &LinearParams) -> Result<ModeState> {
    if t == 0.0 {
        return Ok(*state);
    }
    let p = propagator(state.xi, t, params)?.unscaled();
    let [a, v] = mat_vec(&p, state.vec());
    Ok(ModeState { xi: state.xi, a, v })
}

/// Mode functional `(1 + k xi^2)|a|^2 + |v|^2 + beta (xi^2 |a|^2 - 2 xi Re(a conj v))`.
pub fn lyapunov(state: &ModeState, params: &LinearParams, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!("mixing weight {beta} must lie in (0, 1)")));
    }
    let xi = state.xi;
    let a2 = state.a.norm_sqr();
    Ok((1.0 + params.capillarity * xi * xi) * a2
        + state.v.norm_sqr()
        + beta * (xi * xi * a2 - 2.0 * xi * (state.a * state.v.conj()).re))
}

/// `D exp(t M) D^{-1}` with `D = diag(sqrt(1 + xi^2), 1)`: its norm is the worst
/// growth of `|(a, xi a, v)|` over all initial states.
pub fn weighted_growth(xi: f64, t: f64, params: &LinearParams) -> Result<(f64, f64)> {
    let p = propagator(xi, t, params)?;
    let w = (1.0 + xi * xi).sqrt();
    let m = p.matrix;
    let weighted = [[m[0][0], m[0][1] * w], [m[1][0] / w, m[1][1]]];
    Ok((mat_norm(&weighted), p.log_scale))
}

/// Envelope ratio `|X(t)| / (C exp(-c1 xi^2 t) |X(0)|)` maximized over states.
pub fn envelope_ratio(xi: f64, t: f64, params: &LinearParams) -> Result<f64> {
    let (norm, log_scale) = weighted_growth(xi, t, params)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    let log_ratio = norm.ln() + log_scale + params.decay_rate() * xi * xi * t - params.envelope_constant().ln();
    Ok(log_ratio.exp())
}

/// Eigenvalues `(1 + xi^2 +- sqrt((1 - 4k) xi^4 - 2 xi^2 + 1)) / 2` of the
/// effective-velocity system, with `sqrt(r) = i sqrt(|r|)` for `r < 0`.
pub fn eigenvalues(xi: f64, capillarity: f64) -> (Complex64, Complex64) {
    let disc = frame_discriminant(xi, capillarity);
    let root = if disc >= 0.0 {
        c(disc.sqrt())
    } else {
        Complex64::new(0.0, (-disc).sqrt())
    };
    let half_trace = c(0.5 * (1.0 + xi * xi));
    (half_trace + 0.5 * root, half_trace - 0.5 * root)
}

/// `(1 - 4k) xi^4 - 2 xi^2 + 1`.
pub fn frame_discriminant(xi: f64, capillarity: f64) -> f64 {
    let x2 = xi * xi;
    (1.0 - 4.0 * capillarity) * x2 * x2 - 2.0 * x2 + 1.0
}

/// Positive roots in `xi` of the frame discriminant, found by bracketing
/// and bisection on `xi^2`.
pub fn coalescence_points(capillarity: f64) -> Vec<f64> {
    let f = |x2: f64| (1.0 - 4.0 * capillarity) * x2 * x2 - 2.0 * x2 + 1.0;
    // Sign changes of a quadratic in x2 >= 0 lie left of its vertex or right of it.
    let mut roots = Vec::new();
    let mut grid: Vec<f64> = (0..=4000).map(|i| i as f64 * 1e-3).collect();
    grid.extend((1..=200).map(|i| 4.0 * 1.05f64.powi(i)));
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            roots.push(lo.sqrt());
            continue;
        }
        if flo * fhi > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) * f(lo) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        roots.push((0.5 * (lo + hi)).sqrt());
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    roots
}

/// Principal part of `-d/dt (grad a, v)` in the frame variables,
/// `[[1, -xi^2], [k xi^2, xi^2]]`; its eigenvalues are [`eigenvalues`].
pub fn frame_matrix(xi: f64, capillarity: f64) -> [[f64; 2]; 2] {
    let x2 = xi * xi;
    [[1.0, -x2], [capillarity * x2, x2]]
}

/// Eigenvalues of a real 2x2 matrix, larger real part first.
pub fn eig2(m: [[f64; 2]; 2]) -> (Complex64, Complex64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let root = c(0.25 * tr * tr - det).sqrt();
    (c(0.5 * tr) + root, c(0.5 * tr) - root)
}

/// Reference solution by classical RK4 with step `h_scale / rho(M)`.
pub fn rk4_mode(state: &ModeState, t: f64, params: &LinearParams, h_scale: f64) -> Result<ModeState> {
    let m = mode_generator(state.xi, params)?;
    let rho = m
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let steps = ((t * rho / h_scale).ceil() as usize).max(1);
    let h = t / steps as f64;
    let mut x = state.vec();
    for _ in 0..steps {
        x = rk4_step(&m, x, h);
    }
    Ok(ModeState {
        xi: state.xi,
        a: x[0],
        v: x[1],
    })
}

fn rk4_step(m: &Mat2, x: [Complex64; 2], h: f64) -> [Complex64; 2] {
    let f = |x: [Complex64; 2]| mat_vec(m, x);
    let axpy = |x: [Complex64; 2], s: f64, k: [Complex64; 2]| [x[0] + k[0] * s, x[1] + k[1] * s];
    let k1 = f(x);
    let k2 = f(axpy(x, 0.5 * h, k1));
    let k3 = f(axpy(x, 0.5 * h, k2));
    let k4 = f(axpy(x, h, k3));
    [0, 1].map(|i| x[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
}

/// Time derivative of the functional along the exact flow, by a five-point
/// stencil with a step adapted to the mode stiffness.
pub fn lyapunov_rate(state: &ModeState, params: &LinearParams, beta: f64) -> Result<f64> {
    let xi = state.xi;
    let rho = (xi * xi * (1.0 + params.capillarity)).max(1.0);
    let h = 1e-3 / rho;
    let at = |s: f64| -> Result<f64> { lyapunov(&propagate_mode_exact(state, s, params)?, params, beta) };
    // One-sided stencil: every sample is a forward evolution of the state.
    let stencil = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let mut acc = 0.0;
    for (n, c) in stencil.iter().enumerate() {
        acc += c * at(n as f64 * h)?;
    }
    Ok(acc / (12.0 * h))
}
