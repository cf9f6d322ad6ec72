//! Criteria on the nonlinear solver and on the long-time behaviour.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::Result;
use nsk_core::gevrey::{fit_decay, linear_fit, DecayModel};
use nsk_core::linear::{apply_semigroup, LinearParams};
use nsk_core::littlewood_paley::{block_lp_norms, build_partition, DyadicPartition};
use nsk_core::solver::{
    initial_state, run, run_from, split_norms, CoefficientModel, DiagnosticsConfig, GridConfig, InitialData,
    RunStatus, SimConfig, StepMode, Trajectory,
};
use nsk_core::spectral::{apply_multiplier, symbols, State, ZeroMode};
use num_complex::Complex64;

use super::linear::SHEAR;
use super::{CheckOutcome, Criterion, Size};
use crate::table::{num, short, Table};

/// Plain isothermal run on a `2 pi` box; callers adjust the rest.
pub fn base_config(dim: usize, n: usize, seed: u64) -> Result<SimConfig> {
    Ok(SimConfig {
        grid: GridConfig {
            dim,
            n,
            length: 2.0 * PI,
        },
        params: LinearParams::new(1.0, SHEAR)?,
        model: Some(CoefficientModel::isothermal()),
        dt: 0.05,
        dt_min: 1e-6,
        t_end: 1.0,
        output_interval: 0.5,
        initial: InitialData::Random {
            amplitude: 1e-2,
            gamma: 1.5,
            xi_c: 2.0,
            seed,
        },
        mode: StepMode::Plain,
        diagnostics: DiagnosticsConfig::default(),
        keep_states: false,
    })
}

/// Time series of the recorded diagnostics.
pub fn trajectory_table(name: &str, traj: &Trajectory) -> Table {
    let mut t = Table::new(
        name,
        &["t", "energy", "mean_a", "sup_a", "smallness", "low", "a_high", "u_high", "radius", "radius_residual", "truncation_tail"],
    );
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for d in &traj.diagnostics {
        t.push(vec![
            num(d.t),
            num(d.energy),
            num(d.mean_a),
            num(d.sup_a),
            num(d.smallness),
            num(d.low),
            num(d.a_high),
            num(d.u_high),
            opt(d.radius),
            opt(d.radius_residual),
            num(d.truncation_tail),
        ]);
    }
    t
}

fn healthy(traj: &Trajectory) -> bool {
    matches!(traj.status, RunStatus::Healthy)
}

pub fn solver_correctness(size: Size, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::SolverCorrectness);
    let start = Instant::now();

    // Linear limit: the run without forcing against the closed-form flow.
    let mut cfg = base_config(2, size.pick(16, 32), seed)?;
    cfg.model = None;
    cfg.t_end = 10.0;
    cfg.output_interval = 1.0;
    cfg.keep_states = true;
    cfg.initial = InitialData::Random {
        amplitude: 0.1,
        gamma: 1.0,
        xi_c: 3.0,
        seed,
    };
    let traj = run(&cfg)?;
    let s0 = traj.states[0].clone();
    let mut linear_gap: f64 = 0.0;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        linear_gap = linear_gap.max(s.relative_distance(&apply_semigroup(&s0, *t, &cfg.params)?));
    }
    out.require(
        healthy(&traj) && linear_gap <= 1e-8,
        format!("linear limit within {linear_gap:.1e} of the semigroup on [0, 10]"),
    );

    // Mass conservation in a nonlinear run.
    let mut cfg = base_config(2, size.pick(16, 32), seed)?;
    cfg.t_end = 2.0;
    cfg.initial = InitialData::Random {
        amplitude: 0.05,
        gamma: 1.5,
        xi_c: 2.0,
        seed,
    };
    let traj = run(&cfg)?;
    let m0 = traj.diagnostics[0].mean_a;
    let drift = traj.diagnostics.iter().map(|d| (d.mean_a - m0).abs()).fold(0.0, f64::max);
    out.require(healthy(&traj) && drift <= 1e-13, format!("mean(a) drift {drift:.1e} (<= 1e-13)"));

    // Temporal order against a fine reference.
    let mut cfg = base_config(1, 32, seed)?;
    cfg.initial = InitialData::Random {
        amplitude: 0.3,
        gamma: 1.0,
        xi_c: 1.5,
        seed,
    };
    cfg.output_interval = 1.0;
    let final_at = |dt: f64| -> Result<State> {
        let mut c = cfg.clone();
        c.dt = dt;
        Ok(run(&c)?.final_state)
    };
    let reference = final_at(1.0 / 1024.0)?;
    let mut order = Table::new("order", &["dt", "error"]).summary();
    let mut pts = Vec::new();
    for dt in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0] {
        let err = final_at(dt)?.axpy(-1.0, &reference).l2_norm();
        order.push(vec![num(dt), short(err)]);
        pts.push((dt.ln(), err.ln()));
    }
    let (slope, _, _) = linear_fit(&pts);
    out.require((slope - 4.0).abs() <= 0.3, format!("order {slope:.2} (4 +- 0.3)"));

    // Small data on the plane stays small.
    let mut cfg = base_config(2, size.pick(32, 128), seed)?;
    cfg.t_end = size.pick(2.0, 10.0);
    cfg.output_interval = 0.5;
    cfg.initial = InitialData::Random {
        amplitude: 1e-3,
        gamma: 1.5,
        xi_c: 2.0,
        seed,
    };
    let traj = run(&cfg)?;
    let x0 = traj.diagnostics[0].smallness;
    let x_sup = traj.diagnostics.last().map(|d| d.smallness).unwrap_or(f64::NAN);
    out.require(
        healthy(&traj) && x_sup <= 10.0 * x0,
        format!("small-data run: sup X = {x_sup:.3e}, 10 X0 = {:.3e}", 10.0 * x0),
    );
    let secs = start.elapsed().as_secs_f64();
    out.require(secs < 300.0, format!("{secs:.0} s (< 300 s)"));
    out.tables.extend([order, trajectory_table("small_data", &traj)]);
    Ok(out)
}

/// Critical low-frequency norm of `Lambda^s` applied to both unknowns.
fn low_norm(state: &State, s: f64, k0: i32, part: &DyadicPartition) -> Result<f64> {
    let d = part.grid().dim() as f64;
    let mut total = 0.0;
    for f in std::iter::once(&state.a).chain(&state.u) {
        let g = apply_multiplier(f, symbols::lambda_pow(s), ZeroMode::zero())?;
        for (j, b) in part.indices().zip(block_lp_norms(&g, 2.0, part)?) {
            if j <= k0 {
                total += 2f64.powf(j as f64 * (d / 2.0 - 1.0)) * b;
            }
        }
    }
    Ok(total)
}

fn weighted_state(state: &State, delta: f64) -> Result<State> {
    Ok(state.map_fields_result(|f| {
        apply_multiplier(f, |w| Complex64::new((delta * w.norm1).exp(), 0.0), ZeroMode::Evaluate)
    })?)
}

pub fn decay_rates(size: Size, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::DecayRates);
    let cfg_grid = GridConfig {
        dim: 2,
        n: size.pick(64, 256),
        length: 16.0 * PI,
    };
    let grid = cfg_grid.build()?;
    let part = build_partition(&grid)?;
    let k0 = part.default_k0();
    let params = LinearParams::new(1.0, SHEAR)?;
    let c0 = params.decay_rate() / 2.0;
    let s0 = initial_state(&grid, &InitialData::LowFrequency {
            amplitude: 0.1,
            width: 4.0,
            seed,
        })?;
    let times: Vec<f64> = (0..=32).map(|i| i as f64 * 0.25).collect();
    let mut series = Table::new("decay_series", &["t", "low_s1", "low_s2", "high", "high_weighted"]);
    let mut lows = [Vec::new(), Vec::new()];
    let mut highs = Vec::new();
    let mut weighted = Vec::new();
    for &t in &times {
        let s = apply_semigroup(&s0, t, &params)?;
        let l1 = low_norm(&s, 1.0, k0, &part)?;
        let l2 = low_norm(&s, 2.0, k0, &part)?;
        let (_, ah, uh) = split_norms(&s, 2.0, k0, &part)?;
        let w = weighted_state(&s, (c0 * t).sqrt())?;
        let (_, wah, wuh) = split_norms(&w, 2.0, k0, &part)?;
        lows[0].push((t, l1));
        lows[1].push((t, l2));
        highs.push((t, ah + uh));
        weighted.push((t, wah + wuh));
        series.push(vec![num(t), num(l1), num(l2), num(ah + uh), num(wah + wuh)]);
    }
    let window = (1.0, 8.0);
    let mut rates = Table::new("decay_rates", &["s", "fitted_gamma", "target", "r_squared"]).summary();
    for (i, s) in [1.0, 2.0].into_iter().enumerate() {
        let fit = fit_decay(&lows[i], DecayModel::Algebraic, window)?;
        rates.push(vec![num(s), short(fit.rate), num(s / 2.0), short(fit.r_squared)]);
        out.require(
            (fit.rate - s / 2.0).abs() <= 0.15,
            format!("s = {s}: exponent {:.3} (target {} +- 0.15)", fit.rate, s / 2.0),
        );
    }
    let plain = fit_decay(&highs, DecayModel::Stretched, window)?;
    let high = fit_decay(&weighted, DecayModel::Stretched, window)?;
    let mut stretched = Table::new("stretched_fits", &["series", "c_hat", "r_squared"]).summary();
    stretched.push(vec!["high".into(), short(plain.rate), short(plain.r_squared)]);
    stretched.push(vec!["high_weighted".into(), short(high.rate), short(high.r_squared)]);
    out.require(
        high.rate > 0.0 && high.r_squared > 0.95,
        format!("weighted high part e^(-c sqrt t): c = {:.3}, r2 = {:.4}", high.rate, high.r_squared),
    );
    out.tables.extend([rates, stretched, series]);
    Ok(out)
}

pub fn radius_growth(size: Size, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::RadiusGrowth);
    // A long box gives fine |xi|_1 shells, so shells entering or leaving the
    // fit window move the slope by less than the growth between samples.
    // Both sizes resolve |xi| up to 8.
    let mut cfg = base_config(2, size.pick(128, 256), seed)?;
    cfg.grid.length = size.pick(16.0, 32.0) * PI;
    let c0 = cfg.params.decay_rate() / 2.0;
    cfg.mode = StepMode::GevreyWeighted { c0 };
    cfg.t_end = 10.0;
    cfg.output_interval = 0.25;
    // Analytic data with a finite radius of their own. Flat band-limited data
    // have no tail, so their fitted radius is set by the cascade the products
    // build, and that radius shrinks while the cascade fills in.
    cfg.initial = InitialData::Random {
        amplitude: 0.05,
        gamma: 1.0,
        xi_c: 1.0,
        seed,
    };
    let traj = run_from(&cfg, initial_state(&cfg.grid.build()?, &cfg.initial)?)?;
    let table = trajectory_table("radius", &traj);
    let samples: Vec<(f64, Option<f64>)> = traj.diagnostics.iter().map(|d| (d.t, d.radius)).collect();
    let after: Vec<(f64, Option<f64>)> = samples.iter().copied().filter(|(t, _)| *t >= 0.5).collect();
    let resolved = after.iter().all(|(_, r)| r.is_some());
    let radii: Vec<f64> = after.iter().filter_map(|(_, r)| *r).collect();
    let monotone = radii.windows(2).all(|w| w[1] >= w[0]);
    let floor = 0.25 * c0.sqrt();
    let ratio = after
        .iter()
        .filter(|(t, _)| (1.0..=10.0).contains(t))
        .filter_map(|(t, r)| r.map(|r| r / t.sqrt()))
        .fold(f64::INFINITY, f64::min);
    out.require(healthy(&traj), format!("run {:?}", traj.status));
    out.require(resolved && monotone, format!("radius resolved and nondecreasing on [0.5, 10] ({} samples)", radii.len()));
    out.require(ratio >= floor, format!("min radius / sqrt t = {ratio:.3} (>= {floor:.3})"));
    if let Some((gain, bound)) = traj.gain {
        out.require(gain <= bound, format!("per-step weight gain {gain:.3} within {bound:.3}"));
    }
    out.tables.push(table);
    Ok(out)
}
