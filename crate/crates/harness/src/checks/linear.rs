//! Criteria on the per-mode linear analysis.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::Result;
use nsk_core::linear::{
    coalescence_points, eig2, eigenvalues, frame_alpha, frame_matrix, frame_residuals, lyapunov, lyapunov_rate,
    mode_sweep, propagate_mode_exact, rk4_mode, LinearParams, ModeState,
};
use nsk_core::spectral::{smooth_random_field, Grid, Spectrum, State};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CheckOutcome, Criterion, Size};
use crate::table::{num, short, Table};

pub const CAPILLARITIES: [f64; 4] = [0.1, 0.25, 1.0, 4.0];
/// Shear viscosity of every linear experiment; the bulk one follows from `2 shear + bulk = 1`.
pub const SHEAR: f64 = 0.3;
/// RK4 step in units of the inverse largest generator entry.
const RK4_STEP: f64 = 0.005;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn envelope_grid(size: Size) -> (Vec<f64>, Vec<f64>) {
    let xis = linspace(0.1, 8.0, size.pick(10, 40));
    let times = linspace(0.0, 20.0, size.pick(41, 201));
    (xis, times)
}

pub fn mode_envelope(size: Size) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::ModeEnvelope);
    let (xis, times) = envelope_grid(size);
    let start = Instant::now();
    let rows = mode_sweep(&CAPILLARITIES, &xis, &times, SHEAR)?;
    let secs = start.elapsed().as_secs_f64();
    let mut table = Table::new(
        "envelope",
        &["capillarity", "xi", "envelope_ratio", "lambda_plus_re", "lambda_plus_im", "lambda_minus_re", "lambda_minus_im"],
    );
    for r in &rows {
        table.push(vec![
            num(r.capillarity),
            num(r.xi),
            num(r.envelope_ratio),
            num(r.lambda_plus_re),
            num(r.lambda_plus_im),
            num(r.lambda_minus_re),
            num(r.lambda_minus_im),
        ]);
    }
    let violations = rows.iter().filter(|r| !(r.envelope_ratio <= 1.0)).count();
    let worst = rows.iter().map(|r| r.envelope_ratio).fold(0.0, f64::max);
    out.require(
        violations == 0,
        format!("{violations} violations over {} modes x {} times, worst ratio {worst:.4}", rows.len(), times.len()),
    );
    out.require(secs < 10.0, format!("sweep took {secs:.2} s (< 10 s)"));
    out.tables.push(table);
    Ok(out)
}

fn random_mode(rng: &mut ChaCha8Rng) -> (f64, f64, ModeState) {
    let xi = rng.gen_range(0.1..8.0);
    // Log-uniform capillarity across both sides of 1/4 and 1.
    let kappa = 10f64.powf(rng.gen_range(-1.5..0.7));
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let state = ModeState::new(xi, c(), c());
    (xi, kappa, state)
}

pub fn lyapunov_dissipation(seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::LyapunovDissipation);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new("dissipation", &["xi", "capillarity", "t", "functional", "rate", "slack"]);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let (xi, kappa, s0) = random_mode(&mut rng);
        let p = LinearParams::new(kappa, SHEAR)?;
        for t in [0.0, 0.5, 2.0] {
            let s = propagate_mode_exact(&s0, t, &p)?;
            let l = lyapunov(&s, &p, 0.5)?;
            let rate = lyapunov_rate(&s, &p, 0.5)?;
            let slack = (rate + p.decay_rate() * xi * xi * l) / l;
            worst = worst.max(slack);
            table.push(vec![num(xi), num(kappa), num(t), num(l), num(rate), num(slack)]);
        }
    }
    out.require(worst <= 1e-10, format!("largest relative slack {worst:.3e} (<= 1e-10) on 50 flows x 3 times"));
    out.tables.push(table);
    Ok(out)
}

fn relative_gap(a: &ModeState, b: &ModeState) -> f64 {
    ModeState::new(a.xi, a.a - b.a, a.v - b.v).weighted_norm() / b.weighted_norm()
}

pub fn rk4_oracle(size: Size) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::OracleEquivalence);
    let (xis, times) = envelope_grid(size);
    let pairs: Vec<(f64, f64)> = CAPILLARITIES
        .iter()
        .flat_map(|&k| xis.iter().map(move |&x| (k, x)))
        .collect();
    let rows: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|&(kappa, xi)| -> Result<(f64, f64, f64)> {
            let p = LinearParams::new(kappa, SHEAR)?;
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let starts = [ModeState::new(xi, one, zero), ModeState::new(xi, zero, one)];
            let mut worst: f64 = 0.0;
            for s0 in starts {
                // March the oracle from sample to sample; compare with the closed form.
                let mut rk = s0;
                for w in times.windows(2) {
                    rk = rk4_mode(&rk, w[1] - w[0], &p, RK4_STEP)?;
                    worst = worst.max(relative_gap(&rk, &propagate_mode_exact(&s0, w[1], &p)?));
                }
            }
            Ok((kappa, xi, worst))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new("oracle", &["capillarity", "xi", "max_relative_error"]);
    for &(k, xi, e) in &rows {
        table.push(vec![num(k), num(xi), num(e)]);
    }
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    out.require(
        worst < 1e-8,
        format!("max relative error {worst:.3e} (< 1e-8) over {} modes x {} times", rows.len(), times.len()),
    );
    out.tables.push(table);
    Ok(out)
}

pub fn eigen_identities() -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::EigenIdentities);
    let xis = linspace(0.1, 8.0, 40);
    let (mut sum_err, mut prod_err, mut ref_err) = (0.0f64, 0.0f64, 0.0f64);
    for kappa in [0.1, 0.2, 0.24, 0.25, 1.0, 4.0] {
        for &xi in &xis {
            let x2 = xi * xi;
            let (lp, lm) = eigenvalues(xi, kappa);
            let trace = 1.0 + x2;
            // (trace^2 - disc) / 4 with disc = (1 - 4k) xi^4 - 2 xi^2 + 1.
            let det = x2 * (1.0 + kappa * x2);
            sum_err = sum_err.max((lp + lm - trace).norm() / trace);
            prod_err = prod_err.max((lp * lm - det).norm() / det);
            let (rp, rm) = eig2(frame_matrix(xi, kappa));
            let (a, b) = if (rp - lp).norm() < (rp - lm).norm() { (rp, rm) } else { (rm, rp) };
            ref_err = ref_err.max(((a - lp).norm() + (b - lm).norm()) / trace);
        }
    }
    out.require(sum_err <= 1e-12, format!("trace identity {sum_err:.2e} (<= 1e-12 relative)"));
    out.require(prod_err <= 1e-12, format!("product identity {prod_err:.2e} (<= 1e-12 relative)"));
    out.require(ref_err <= 1e-12, format!("vs direct 2x2 eigensolve {ref_err:.2e}"));
    let mut table = Table::new("coalescence", &["capillarity", "xi_found", "xi_closed_form", "error"]).summary();
    let mut worst: f64 = 0.0;
    let mut counts_ok = true;
    for kappa in [0.1, 0.2, 0.24] {
        let found = coalescence_points(kappa);
        let r = 2.0 * f64::sqrt(kappa);
        let expected = [(1.0 / (1.0 + r)).sqrt(), (1.0 / (1.0 - r)).sqrt()];
        counts_ok &= found.len() == 2;
        for (f, e) in found.iter().zip(expected) {
            worst = worst.max((f - e).abs());
            table.push(vec![num(kappa), short(*f), short(e), short((f - e).abs())]);
        }
    }
    out.require(counts_ok && worst < 1e-8, format!("coalescence points within {worst:.2e} (< 1e-8)"));
    out.tables.push(table);
    Ok(out)
}

fn random_state(grid: &Grid, seed: u64) -> Result<State> {
    let spec = Spectrum::new(1.0, 3.0);
    let a = smooth_random_field(grid, seed, spec);
    let u = (0..grid.dim())
        .map(|i| smooth_random_field(grid, seed + 1 + i as u64, spec))
        .collect();
    Ok(State::new(a, u)?)
}

pub fn frame_residual_check(size: Size, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::EffectiveVelocity);
    let grid = Grid::new(2, size.pick(16, 32), 2.0 * PI)?;
    let s0 = random_state(&grid, seed)?;
    let mut table = Table::new("frame", &["capillarity", "t", "alpha_re", "alpha_im", "w_residual", "v_residual"]);
    let mut worst: f64 = 0.0;
    let mut alpha_err: f64 = 0.0;
    for kappa in [0.1, 1.0] {
        let p = LinearParams::new(kappa, SHEAR)?;
        let alpha = frame_alpha(kappa);
        alpha_err = alpha_err.max((alpha * (1.0 - alpha) - kappa).norm());
        for t in [0.0, 0.5, 2.0] {
            let r = frame_residuals(&s0, t, &p)?;
            worst = worst.max(r.w_residual).max(r.v_residual);
            table.push(vec![num(kappa), num(t), num(r.alpha_re), num(r.alpha_im), num(r.w_residual), num(r.v_residual)]);
        }
    }
    out.require(worst < 1e-6, format!("largest frame residual {worst:.2e} (< 1e-6) for real and complex alpha"));
    out.require(alpha_err <= 1e-14, format!("|alpha (1 - alpha) - capillarity| = {alpha_err:.1e} (<= 1e-14)"));
    out.tables.push(table);
    Ok(out)
}
