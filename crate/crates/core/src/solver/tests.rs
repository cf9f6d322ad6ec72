use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::bony::PowerSeries;
use crate::linear::{apply_semigroup, LinearParams};
use crate::littlewood_paley::build_partition;
use crate::spectral::{forward, Grid, PhysicalField, SpectralField, State};

fn params(k: f64) -> LinearParams {
    LinearParams::new(k, 0.3).unwrap()
}

fn base_config(dim: usize, n: usize, model: Option<CoefficientModel>) -> SimConfig {
    SimConfig {
        grid: GridConfig {
            dim,
            n,
            length: 2.0 * PI,
        },
        params: params(1.0),
        model,
        dt: 0.05,
        dt_min: 1e-6,
        t_end: 1.0,
        output_interval: 0.5,
        initial: InitialData::Random {
            amplitude: 1e-2,
            gamma: 1.5,
            xi_c: 2.0,
            seed: 4,
        },
        mode: StepMode::Plain,
        diagnostics: DiagnosticsConfig::default(),
        keep_states: true,
    }
}

fn physical(grid: &Grid, f: impl Fn(&[f64]) -> f64 + Sync) -> SpectralField {
    forward(&PhysicalField::from_fn(grid, f))
}

fn model_with(kappa: Vec<f64>, pressure_slope: Vec<f64>) -> CoefficientModel {
    CoefficientModel::new(
        PowerSeries::polynomial(vec![1.0]),
        PowerSeries::polynomial(vec![1.0]),
        PowerSeries::polynomial(kappa),
        PowerSeries::polynomial(pressure_slope),
        12,
    )
    .unwrap()
}

#[test]
fn zero_state_has_zero_forcing() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let n = nonlinear_rhs(&State::zeros(&g), &params(1.0), &CoefficientModel::isothermal()).unwrap();
    assert_eq!(n.f.max_abs(), 0.0);
    for part in n.parts.iter().flatten() {
        assert_eq!(part.max_abs(), 0.0);
    }
}

#[test]
fn constant_coefficients_leave_transport_and_inertia() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let s = initial_state(&g, &base_config(2, 16, None).initial).unwrap();
    // P'(1 + a) = 1 + a makes J vanish; I(a) = a / (1 + a) never does.
    let m = model_with(vec![1.0], vec![1.0, 1.0]);
    let n = nonlinear_rhs(&s, &params(1.0), &m).unwrap();
    for i in 0..2 {
        assert_eq!(n.parts[1][i].max_abs(), 0.0);
        assert!(n.parts[3][i].max_abs() < 1e-18);
        assert_eq!(n.parts[4][i].max_abs(), 0.0);
        let sum = n.parts[0][i].add(&n.parts[2][i]);
        assert!(n.g[i].sub(&sum).max_abs() < 1e-18);
        assert!(n.parts[2][i].max_abs() > 0.0);
    }
    // With a = 0 only the transport term survives.
    let flat = State::new(SpectralField::zeros(&g), s.u.clone()).unwrap();
    let n = nonlinear_rhs(&flat, &params(1.0), &m).unwrap();
    for i in 0..2 {
        assert_eq!(n.g[i].sub(&n.parts[0][i]).max_abs(), 0.0);
    }
}

#[test]
fn capillary_term_matches_hand_expansion() {
    let g = Grid::new(1, 32, 2.0 * PI).unwrap();
    let kbar = 0.7;
    for eps in [1e-1, 1e-2] {
        let a = physical(&g, |x| eps * x[0].cos());
        let s = State::new(a, vec![SpectralField::zeros(&g)]).unwrap();
        // kappa(rho) = rho: g5 = kbar (3/2) eps^2 sin 2x exactly.
        let n = nonlinear_rhs(&s, &params(kbar), &model_with(vec![1.0, 1.0], vec![1.0])).unwrap();
        let expected = physical(&g, |x| kbar * 1.5 * eps * eps * (2.0 * x[0]).sin());
        assert!(n.parts[4][0].sub(&expected).max_abs() < 1e-15);
        // kappa(rho) = rho^2: cubic terms kbar eps^3 (sin x / 2 + 3 sin 3x / 2).
        let n = nonlinear_rhs(&s, &params(kbar), &model_with(vec![1.0, 2.0, 1.0], vec![1.0])).unwrap();
        let quadratic = physical(&g, |x| kbar * 3.0 * eps * eps * (2.0 * x[0]).sin());
        let full = physical(&g, |x| {
            kbar * (3.0 * eps * eps * (2.0 * x[0]).sin()
                + eps.powi(3) * (0.5 * x[0].sin() + 1.5 * (3.0 * x[0]).sin()))
        });
        let gap = n.parts[4][0].sub(&quadratic).max_abs();
        assert!(gap < 2.0 * kbar * eps.powi(3) && gap > 0.1 * kbar * eps.powi(3));
        assert!(n.parts[4][0].sub(&full).max_abs() < 1e-15);
    }
}

#[test]
fn density_outside_the_analyticity_domain_is_rejected() {
    let g = Grid::new(1, 16, 2.0 * PI).unwrap();
    let a = physical(&g, |x| 1.5 * x[0].sin());
    let s = State::new(a, vec![SpectralField::zeros(&g)]).unwrap();
    let err = nonlinear_rhs(&s, &params(1.0), &CoefficientModel::isothermal()).unwrap_err();
    assert!(matches!(err, crate::Error::OutsideAnalyticity { .. }));
}

#[test]
fn linear_runs_follow_the_semigroup() {
    let mut cfg = base_config(2, 16, None);
    cfg.t_end = 10.0;
    cfg.output_interval = 1.0;
    cfg.dt = 0.3;
    let traj = run(&cfg).unwrap();
    assert_eq!(traj.status, RunStatus::Healthy);
    let s0 = &traj.states[0];
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let exact = apply_semigroup(s0, *t, &cfg.params).unwrap();
        let err = s.axpy(-1.0, &exact).l2_norm() / s0.l2_norm();
        assert!(err < 1e-8, "t {t}: {err:e}");
    }
}

#[test]
fn single_step_without_forcing_is_the_flow() {
    let g = Grid::new(2, 16, 3.0).unwrap();
    let s = initial_state(&g, &base_config(2, 16, None).initial).unwrap();
    let p = params(0.4);
    let stepped = step(&s, 0.2, 0.0, &p, None, StepMode::Plain).unwrap();
    assert_eq!(stepped, apply_semigroup(&s, 0.2, &p).unwrap());
}

#[test]
fn mass_is_conserved() {
    let mut cfg = base_config(2, 16, Some(CoefficientModel::isothermal()));
    cfg.initial = InitialData::Random {
        amplitude: 1e-4,
        gamma: 1.5,
        xi_c: 2.0,
        seed: 1,
    };
    cfg.t_end = 2.0;
    let traj = run(&cfg).unwrap();
    for d in &traj.diagnostics {
        assert!(d.mean_a.abs() <= 1e-13, "{}", d.mean_a);
    }
}

#[test]
fn gevrey_mode_with_zero_rate_is_plain() {
    let model = CoefficientModel::isothermal();
    let mut cfg = base_config(2, 16, Some(model));
    let plain = run(&cfg).unwrap();
    cfg.mode = StepMode::GevreyWeighted { c0: 0.0 };
    let weighted = run(&cfg).unwrap();
    assert_eq!(plain.final_state, weighted.final_state);
    cfg.mode = StepMode::GevreyWeighted { c0: 1.0 };
    assert!(cfg.validate().is_err());
}

#[test]
fn gevrey_gain_stays_within_certificate() {
    let mut cfg = base_config(2, 16, Some(CoefficientModel::isothermal()));
    let c0 = cfg.params.decay_rate() / 2.0;
    cfg.mode = StepMode::GevreyWeighted { c0 };
    cfg.dt = 0.01;
    let traj = run(&cfg).unwrap();
    let (gain, bound) = traj.gain.unwrap();
    assert!(gain > 0.0 && gain <= bound, "{gain} vs {bound}");
}

#[test]
fn fourth_order_in_time() {
    let mut cfg = base_config(1, 32, Some(CoefficientModel::isothermal()));
    cfg.initial = InitialData::Random {
        amplitude: 0.3,
        gamma: 1.0,
        xi_c: 1.5,
        seed: 8,
    };
    cfg.t_end = 1.0;
    cfg.output_interval = 1.0;
    cfg.keep_states = false;
    let final_at = |dt: f64| {
        let mut c = cfg.clone();
        c.dt = dt;
        run(&c).unwrap().final_state
    };
    let reference = final_at(1.0 / 512.0);
    let dts: [f64; 4] = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
    let pts: Vec<(f64, f64)> = dts
        .iter()
        .map(|&dt| (dt.ln(), final_at(dt).axpy(-1.0, &reference).l2_norm().ln()))
        .collect();
    let (slope, _, _) = crate::gevrey::linear_fit(&pts);
    assert!((slope - 4.0).abs() < 0.3, "slope {slope}, points {pts:?}");
}

#[test]
fn translation_commutes_with_the_run() {
    let mut cfg = base_config(2, 16, Some(CoefficientModel::isothermal()));
    cfg.initial = InitialData::Random {
        amplitude: 0.1,
        gamma: 1.5,
        xi_c: 2.0,
        seed: 6,
    };
    let g = cfg.grid.build().unwrap();
    let s0 = initial_state(&g, &cfg.initial).unwrap();
    let dx = g.dx();
    let shift = |s: &State| {
        s.map_fields(|f| f.map(|p, c| c * Complex64::from_polar(1.0, -g.wavevector(p)[0] * dx)))
    };
    let a = run_from(&cfg, shift(&s0)).unwrap().final_state;
    let b = shift(&run_from(&cfg, s0).unwrap().final_state);
    // Only FFT roundoff separates the two.
    assert!(a.relative_distance(&b) < 1e-10, "{:e}", a.relative_distance(&b));
}

#[test]
fn small_data_stays_small() {
    let mut cfg = base_config(2, 32, Some(CoefficientModel::isothermal()));
    cfg.initial = InitialData::Random {
        amplitude: 1e-3,
        gamma: 1.5,
        xi_c: 2.0,
        seed: 3,
    };
    cfg.t_end = 4.0;
    let traj = run(&cfg).unwrap();
    let x0 = traj.diagnostics[0].smallness;
    let sup = traj.diagnostics.iter().map(|d| d.smallness).fold(0.0, f64::max);
    assert!(sup <= 10.0 * x0, "{sup} vs {x0}");
}

#[test]
fn large_data_is_flagged() {
    let mut cfg = base_config(1, 16, Some(CoefficientModel::isothermal()));
    cfg.initial = InitialData::Random {
        amplitude: 2.0,
        gamma: 1.5,
        xi_c: 2.0,
        seed: 3,
    };
    let traj = run(&cfg).unwrap();
    assert!(matches!(traj.status, RunStatus::Diverged { .. }));
    assert_eq!(traj.times.len(), traj.diagnostics.len());
}

#[test]
fn smallness_of_simple_data() {
    let g = Grid::new(2, 64, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let k0 = part.default_k0();
    assert_eq!(data_smallness(&State::zeros(&g), 2.0, k0, &part).unwrap(), 0.0);
    // A unit mode sits in blocks -1 and 0, well below the threshold.
    let a = physical(&g, |x| x[0].cos());
    let s = State::new(a, vec![SpectralField::zeros(&g), SpectralField::zeros(&g)]).unwrap();
    assert!(k0 >= 2);
    let (low, ah, uh) = split_norms(&s, 2.0, k0, &part).unwrap();
    // The high part is transform roundoff only.
    assert!(low > 0.0 && ah < 1e-12 * low && uh == 0.0);
    assert!((data_smallness(&s, 2.0, k0, &part).unwrap() - low).abs() < 1e-12 * low);
    assert!(data_smallness(&s, 4.0, k0, &part).is_err());
}

#[test]
fn smallness_brackets_the_critical_norm() {
    use crate::littlewood_paley::{besov_norm, besov_norm_vector, BesovSpec};
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let s = initial_state(&g, &base_config(2, 32, None).initial).unwrap();
    let x = data_smallness(&s, 2.0, part.default_k0(), &part).unwrap();
    let lo = BesovSpec::new(0.0, 2.0, 1.0).unwrap();
    let hi = BesovSpec::new(1.0, 2.0, 1.0).unwrap();
    let reference = besov_norm(&s.a, &lo, &part).unwrap().value
        + besov_norm(&s.a, &hi, &part).unwrap().value
        + besov_norm_vector(&s.u, &lo, &part).unwrap();
    let ratio = x / reference;
    assert!((0.5..=2.0).contains(&ratio), "{ratio}");
}
