use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mode::{eig2, frame_matrix};
use super::*;
use crate::littlewood_paley::build_partition;
use crate::spectral::{smooth_random_field, Grid, SpectralField, Spectrum, State};

const KAPPAS: [f64; 4] = [0.1, 0.25, 1.0, 4.0];

fn params(k: f64) -> LinearParams {
    LinearParams::new(k, 0.3).unwrap()
}

fn xi_samples() -> Vec<f64> {
    (0..40).map(|i| 0.1 + (8.0 - 0.1) * i as f64 / 39.0).collect()
}

fn random_state(grid: &Grid, seed: u64) -> State {
    let s = Spectrum::new(1.5, 2.0);
    let a = smooth_random_field(grid, seed, s);
    let u = (0..grid.dim())
        .map(|c| smooth_random_field(grid, seed + 100 + c as u64, s))
        .collect();
    State::new(a, u).unwrap()
}

#[test]
fn params_validation() {
    assert!(LinearParams::new(0.0, 0.3).is_err());
    assert!(LinearParams::new(1.0, -0.1).is_err());
    let bad = LinearParams {
        capillarity: 1.0,
        shear: 0.3,
        bulk: 0.5,
    };
    assert!(bad.validate().is_err());
    assert_eq!(params(4.0).decay_rate(), 0.5);
    assert_eq!(params(0.1).decay_rate(), 0.05);
}

#[test]
fn envelope_holds_on_the_sweep() {
    let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.1).collect();
    for k in KAPPAS {
        let p = params(k);
        let mut worst: f64 = 0.0;
        for &xi in &xi_samples() {
            for &t in &times {
                worst = worst.max(envelope_ratio(xi, t, &p).unwrap());
            }
        }
        assert!(worst <= 1.0 + 1e-9, "capillarity {k}: envelope ratio {worst}");
    }
}

#[test]
fn functional_dissipates_at_the_stated_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let xi = rng.gen_range(0.1..8.0);
        let k = KAPPAS[rng.gen_range(0..4)];
        let p = params(k);
        let s = ModeState::new(
            xi,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
        let l = lyapunov(&s, &p, 0.5).unwrap();
        let rate = lyapunov_rate(&s, &p, 0.5).unwrap();
        let slack = rate + p.decay_rate() * xi * xi * l;
        assert!(slack <= 1e-10 * l, "xi {xi} k {k}: slack {slack:e} vs {l}");
        // Closed form of the dissipation at mixing weight 1/2.
        let exact = -xi * xi * ((1.0 + k * xi * xi) * s.a.norm_sqr() + s.v.norm_sqr());
        assert!((rate - exact).abs() <= 1e-7 * exact.abs());
    }
}

#[test]
fn exact_propagator_matches_rk4() {
    let times = [0.5, 2.0, 20.0];
    let mut worst: f64 = 0.0;
    for k in KAPPAS {
        let p = params(k);
        for &xi in xi_samples().iter().step_by(6) {
            let s = ModeState::new(xi, Complex64::new(1.0, 0.2), Complex64::new(-0.4, 0.7));
            for &t in &times {
                let exact = propagate_mode_exact(&s, t, &p).unwrap();
                let rk = rk4_mode(&s, t, &p, 2e-3).unwrap();
                let diff = ModeState::new(xi, rk.a - exact.a, rk.v - exact.v);
                worst = worst.max(diff.weighted_norm() / exact.weighted_norm());
            }
        }
    }
    assert!(worst < 1e-8, "max relative error {worst:e}");
}

#[test]
fn coalescence_points_match_closed_form() {
    for k in [0.1, 0.2, 0.24] {
        let roots = coalescence_points(k);
        let mut expected = vec![(1.0 / (1.0 + 2.0 * k.sqrt())).sqrt(), (1.0 / (1.0 - 2.0 * k.sqrt())).sqrt()];
        expected.sort_by(f64::total_cmp);
        assert_eq!(roots.len(), 2, "capillarity {k}: {roots:?}");
        for (r, e) in roots.iter().zip(&expected) {
            assert!((r - e).abs() < 1e-8, "capillarity {k}: {r} vs {e}");
        }
    }
    assert_eq!(coalescence_points(1.0).len(), 1);
}

#[test]
fn eigenvalues_match_the_frame_matrix() {
    for k in [0.1, 0.25, 1.0, 4.0] {
        for xi in [0.0, 0.3, 1.0, 5.0] {
            let (lp, lm) = eigenvalues(xi, k);
            let (mp, mm) = eig2(frame_matrix(xi, k));
            let scale = 1.0 + xi * xi;
            let direct = (lp - mp).norm() + (lm - mm).norm();
            let swapped = (lp - mm).norm() + (lm - mp).norm();
            assert!(direct.min(swapped) < 1e-10 * scale, "k {k} xi {xi}");
        }
    }
    // Purely imaginary square root past the discriminant root.
    let (lp, lm) = eigenvalues(2.0, 1.0);
    assert!(lp.im > 0.0 && (lp - lm.conj()).norm() < 1e-14);
}

#[test]
fn field_semigroup_matches_rk4_of_the_pde() {
    let grid = Grid::new(2, 8, 2.0 * std::f64::consts::PI).unwrap();
    let p = params(0.6);
    let s0 = random_state(&grid, 3);
    let t = 0.4;
    let exact = apply_semigroup(&s0, t, &p).unwrap();
    // RK4 on a_t = -div u, u_t = A u - grad a + k grad Delta a in Fourier.
    let rhs = |s: &State| -> State {
        let g = s.grid().clone();
        let a = SpectralField::from_fn(&g, |q| {
            let kv = g.deriv_wavevector(q);
            -kv.iter().zip(&s.u).map(|(x, c)| c.coeffs()[q] * Complex64::new(0.0, *x)).sum::<Complex64>()
        });
        let u = (0..g.dim())
            .map(|i| {
                SpectralField::from_fn(&g, |q| {
                    let kv = g.deriv_wavevector(q);
                    let r2: f64 = kv.iter().map(|x| x * x).sum();
                    let ku: Complex64 = kv.iter().zip(&s.u).map(|(x, c)| c.coeffs()[q] * x).sum();
                    let ai = Complex64::new(0.0, kv[i]) * s.a.coeffs()[q];
                    -p.shear * r2 * s.u[i].coeffs()[q] - (p.shear + p.bulk) * kv[i] * ku - ai * (1.0 + p.capillarity * r2)
                })
            })
            .collect();
        State::new(a, u).unwrap()
    };
    let steps = 4000;
    let h = t / steps as f64;
    let mut x = s0.clone();
    for _ in 0..steps {
        let k1 = rhs(&x);
        let k2 = rhs(&x.axpy(0.5 * h, &k1));
        let k3 = rhs(&x.axpy(0.5 * h, &k2));
        let k4 = rhs(&x.axpy(h, &k3));
        x = x.axpy(h / 6.0, &k1).axpy(h / 3.0, &k2).axpy(h / 3.0, &k3).axpy(h / 6.0, &k4);
    }
    assert!(x.relative_distance(&exact) < 1e-9, "{:e}", x.relative_distance(&exact));
    assert!(exact.a.hermitian_defect() < 1e-14);
}

#[test]
fn semigroup_is_identity_at_zero_and_keeps_means() {
    let grid = Grid::new(2, 8, 3.0).unwrap();
    let mut s = random_state(&grid, 9);
    s.a.set_mean(Complex64::new(0.5, 0.0));
    s.u[0].set_mean(Complex64::new(-0.25, 0.0));
    let p = params(1.0);
    assert_eq!(apply_semigroup(&s, 0.0, &p).unwrap(), s);
    let later = apply_semigroup(&s, 1.0, &p).unwrap();
    assert_eq!(later.a.mean(), s.a.mean());
    assert_eq!(later.u[0].mean(), s.u[0].mean());
    assert!(later.l2_norm() < s.l2_norm());
    assert!(apply_semigroup(&s, -1.0, &p).is_err());
}

#[test]
fn frame_equations_hold_along_the_flow() {
    let grid = Grid::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
    let s0 = random_state(&grid, 21);
    for k in [0.1, 0.2, 0.5, 2.0] {
        let p = params(k);
        for t in [0.0, 0.3, 1.0] {
            let r = frame_residuals(&s0, t, &p).unwrap();
            assert!(r.w_residual < 1e-6 && r.v_residual < 1e-6, "k {k} t {t}: {r:?}");
        }
        let alpha = frame_alpha(k);
        assert!((alpha * (Complex64::new(1.0, 0.0) - alpha) - k).norm() < 1e-14);
        assert_eq!(alpha.im != 0.0, k > 0.25);
    }
}

#[test]
fn frame_fields_recombine() {
    let grid = Grid::new(2, 16, 5.0).unwrap();
    let s0 = random_state(&grid, 2);
    let f = effective_frame(&s0, &params(0.2)).unwrap();
    // w - v = alpha grad a, real alpha below 1/4.
    let grad = crate::spectral::gradient(&s0.a);
    for c in 0..2 {
        let lhs = f.w[c].sub(&f.v[c]);
        let rhs = grad[c].scaled(f.alpha.re);
        assert!(lhs.relative_distance(&rhs) < 1e-13);
        assert!(f.v[c].hermitian_defect() < 1e-14);
    }
}

#[test]
fn complex_heat_bound() {
    let grid = Grid::new(2, 32, 2.0 * std::f64::consts::PI).unwrap();
    let part = build_partition(&grid).unwrap();
    let z = smooth_random_field(&grid, 8, Spectrum::new(1.0, 4.0));
    let times: Vec<f64> = (0..=50).map(|i| i as f64 * 0.02).collect();
    for beta in [Complex64::new(1.0, 0.0), Complex64::new(1.0, 3.0), Complex64::new(0.2, -1.0)] {
        for p in [1.0, 2.0, 4.0] {
            let (cst, c) = complex_heat_check(beta, &z, 2, p, &times, &part).unwrap();
            assert_eq!(c, HEAT_RATE);
            assert!(cst.is_finite() && cst < 20.0, "beta {beta} p {p}: {cst}");
        }
    }
    // Real beta in L^2: the block decays at least at rate (3/4)^2.
    let cst = heat_block_constant(Complex64::new(1.0, 0.0), 1.0, 0.55, &z, 3, 2.0, &times, &part).unwrap();
    assert!(cst <= 1.0 + 1e-12);
    assert!(complex_heat_check(Complex64::new(0.0, 1.0), &z, 2, 2.0, &times, &part).is_err());
}

#[test]
fn imaginary_diffusion_has_no_smoothing() {
    // Measured against a decay rate of |beta|, a purely dispersive flow
    // produces constants that grow with the time window.
    let grid = Grid::new(1, 64, 2.0 * std::f64::consts::PI).unwrap();
    let part = build_partition(&grid).unwrap();
    let z = smooth_random_field(&grid, 3, Spectrum::new(1.0, 8.0));
    let beta = Complex64::new(0.0, 1.0);
    let short: Vec<f64> = (0..=10).map(|i| i as f64 * 0.01).collect();
    let long: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
    let c_short = heat_block_constant(beta, 1.0, HEAT_RATE, &z, 3, 2.0, &short, &part).unwrap();
    let c_long = heat_block_constant(beta, 1.0, HEAT_RATE, &z, 3, 2.0, &long, &part).unwrap();
    assert!(c_long > 100.0 * c_short);
}

#[test]
fn sweep_reports_every_pair() {
    let rows = mode_sweep(&[0.1, 1.0], &[0.5, 2.0, 6.0], &[0.0, 1.0, 5.0], 0.3).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.envelope_ratio <= 1.0 && r.envelope_ratio > 0.0));
    assert!(mode_sweep(&[-1.0], &[1.0], &[0.0], 0.3).is_err());
}
