use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::error::Error;
use crate::spectral::{
    apply_multiplier, inverse, lp_norm, partial, smooth_random_field, symbols, Grid, SpectralField,
    Spectrum, ZeroMode,
};

fn noise(grid: &Grid, seed: u64) -> SpectralField {
    smooth_random_field(grid, seed, Spectrum::new(1.0, 1e9))
}

fn cosine_mode(grid: &Grid, k: &[i32], amp: f64) -> SpectralField {
    let p = grid.index_of(k).unwrap();
    let q = grid.negated(p);
    let mut f = SpectralField::zeros(grid);
    f.coeffs_mut()[p] = Complex64::new(0.5 * amp, 0.0);
    f.coeffs_mut()[q] = Complex64::new(0.5 * amp, 0.0);
    f
}

#[test]
fn spec_validation() {
    assert!(BesovSpec::new(0.0, 0.5, 1.0).is_err());
    assert!(BesovSpec::new(0.0, 2.0, 3.0).is_err());
    assert!(BesovSpec::new(0.0, 2.0, f64::INFINITY).is_ok());
    assert!(validate_critical_p(2, 3.0).is_ok());
    assert!(validate_critical_p(2, 4.0).is_err());
    assert!(validate_critical_p(3, 4.0).is_ok());
    assert!(validate_critical_p(3, 5.0).is_err());
    assert!(validate_critical_p(2, 1.5).is_err());
}

#[test]
fn zero_field_and_mean_rejection() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let spec = BesovSpec::new(1.0, 2.0, 1.0).unwrap();
    assert_eq!(besov_norm(&SpectralField::zeros(&g), &spec, &part).unwrap().value, 0.0);
    let mut f = noise(&g, 1);
    f.set_mean(Complex64::new(0.3, 0.0));
    assert!(matches!(besov_norm(&f, &spec, &part), Err(Error::NonZeroMean(_))));
}

#[test]
fn value_is_the_lr_aggregate_of_per_block() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let f = noise(&g, 3);
    for r in [1.0, 2.0, f64::INFINITY] {
        let rep = besov_norm(&f, &BesovSpec::new(0.5, 3.0, r).unwrap(), &part).unwrap();
        let direct = if r == 1.0 {
            rep.per_block.values().sum::<f64>()
        } else if r == 2.0 {
            rep.per_block.values().map(|v| v * v).sum::<f64>().sqrt()
        } else {
            rep.per_block.values().cloned().fold(0.0, f64::max)
        };
        assert!((rep.value - direct).abs() <= 1e-12 * direct);
        assert!((0.0..=1.0).contains(&rep.tail_mass));
    }
}

#[test]
fn l2_case_sits_in_overlap_bracket() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let spec = BesovSpec::new(0.0, 2.0, 2.0).unwrap();
    for seed in 0..20 {
        let f = smooth_random_field(&g, seed, Spectrum::new(1.5, 4.0));
        let ratio = besov_norm(&f, &spec, &part).unwrap().value / f.l2_norm();
        assert!(ratio >= 1.0 / 2f64.sqrt() && ratio <= 2f64.sqrt(), "ratio {ratio}");
    }
}

#[test]
fn single_mode_norm_matches_active_blocks() {
    // |xi| = 4 = 2^2 meets blocks 1 and 2 only.
    let g = Grid::new(1, 32, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let f = cosine_mode(&g, &[4], 1.0);
    let rep = besov_norm(&f, &BesovSpec::new(1.0, 2.0, 1.0).unwrap(), &part).unwrap();
    let l2 = PI.sqrt();
    let expected = 4.0 * l2 * phi(4.0 / 4.0) + 2.0 * l2 * phi(4.0 / 2.0);
    assert!((rep.value - expected).abs() < 1e-12 * expected);
    assert_eq!(rep.per_block.values().filter(|v| **v > 0.0).count(), 2);
}

#[test]
fn scaling_tracks_homogeneity() {
    // f(lambda x) on a box shrunk by lambda has the same samples and
    // frequencies scaled by lambda; on the torus this is the whole-space dilation.
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let f = smooth_random_field(&g, 5, Spectrum::new(2.0, 2.0));
    for lambda in [1.5, 2.0, 3.0] {
        let gs = Grid::new(2, 32, 2.0 * PI / lambda).unwrap();
        let ps = build_partition(&gs).unwrap();
        let dilated = SpectralField::from_coeffs(&gs, f.coeffs().to_vec()).unwrap();
        for (sigma, p) in [(0.0, 2.0), (1.0, 2.0), (0.5, 4.0), (-0.5, 3.0)] {
            let spec = BesovSpec::new(sigma, p, 1.0).unwrap();
            let ratio = besov_norm(&dilated, &spec, &ps).unwrap().value
                / besov_norm(&f, &spec, &part).unwrap().value;
            let expected = lambda.powf(sigma - 2.0 / p);
            assert!(ratio / expected < 2.0 && expected / ratio < 2.0, "lambda {lambda} sigma {sigma} p {p}");
        }
    }
}

#[test]
fn bernstein_ratio_is_uniformly_bounded() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let (a, b) = (2.0, 4.0);
    let d = 2.0;
    let mut worst: f64 = 0.0;
    for seed in 0..200 {
        let f = smooth_random_field(&g, 1000 + seed, Spectrum::new(1.0 + (seed % 3) as f64, 6.0));
        for j in part.indices() {
            let blk = part.block(&f, j);
            let base = lp_norm(&inverse(&blk), a).unwrap();
            if base < 1e-14 {
                continue;
            }
            let grad: f64 = (0..2).map(|ax| lp_norm(&inverse(&partial(&blk, ax)), b).unwrap()).sum();
            let ratio = grad / (2f64.powf(j as f64 * (1.0 + d * (1.0 / a - 1.0 / b))) * base);
            worst = worst.max(ratio);
        }
    }
    assert!(worst.is_finite() && worst < 10.0, "worst Bernstein ratio {worst}");
}

#[test]
fn lambda_s_acts_as_two_to_the_js_on_blocks() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let s = 1.5;
    for seed in 0..50 {
        let f = noise(&g, 300 + seed);
        for j in part.indices() {
            let blk = part.block(&f, j);
            let base = lp_norm(&inverse(&blk), 3.0).unwrap();
            if base < 1e-14 {
                continue;
            }
            let lifted = apply_multiplier(&blk, symbols::lambda_pow(s), ZeroMode::zero()).unwrap();
            let r = lp_norm(&inverse(&lifted), 3.0).unwrap() / (2f64.powf(j as f64 * s) * base);
            assert!(r > 0.2 && r < 8.0, "ratio {r} at j = {j}");
        }
    }
}

#[test]
fn embedding_constant_is_refinement_stable() {
    // B^sigma_{2,1} controls B^{sigma - d(1/2 - 1/4)}_{4,1}.
    let mut consts = Vec::new();
    for n in [32, 64] {
        let g = Grid::new(2, n, 2.0 * PI).unwrap();
        let part = build_partition(&g).unwrap();
        let hi = BesovSpec::new(1.0, 2.0, 1.0).unwrap();
        let lo = BesovSpec::new(0.5, 4.0, 1.0).unwrap();
        let mut c: f64 = 0.0;
        for seed in 0..20 {
            let f = smooth_random_field(&g, 40 + seed, Spectrum::new(2.0, 3.0));
            let r = besov_norm(&f, &lo, &part).unwrap().value / besov_norm(&f, &hi, &part).unwrap().value;
            c = c.max(r);
        }
        consts.push(c);
    }
    assert!(consts[0] < 5.0 && consts[1] / consts[0] < 2.0 && consts[0] / consts[1] < 2.0);
}

#[test]
fn annulus_synthesis_is_controlled() {
    // Pieces supported in 2^j [1, 2] recombine with a bounded constant.
    let g = Grid::new(2, 64, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let spec = BesovSpec::new(0.5, 2.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let base = noise(&g, 500 + seed);
        let mut total = SpectralField::zeros(&g);
        let mut agg = 0.0;
        for j in 0..5 {
            let lo = 2f64.powi(j);
            let piece = base.map(|p, c| {
                let r = g.norms()[p];
                if r >= lo && r < 2.0 * lo {
                    c
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            agg += 2f64.powf(j as f64 * spec.sigma) * piece.l2_norm();
            total.add_assign(&piece);
        }
        worst = worst.max(besov_norm(&total, &spec, &part).unwrap().value / agg);
    }
    assert!(worst.is_finite() && worst < 8.0, "synthesis constant {worst}");
}

#[test]
fn split_examples() {
    let g = Grid::new(1, 128, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let k0 = part.default_k0();
    let spec = BesovSpec::new(0.0, 2.0, 1.0).unwrap().with_k0(k0);

    // Mode 2^{k0+3} lives in blocks k0+2 and k0+3 only.
    let high = cosine_mode(&g, &[1 << (k0 + 3)], 1.0);
    assert_eq!(split_low_high(&high, &spec, &part).unwrap().low, 0.0);

    // phi(2^{1-k0} k) = 1 exactly: the mode lives in block k0-1 alone,
    // which is counted on both sides.
    let k = (1..64).find(|&k| phi(k as f64 / 2f64.powi(k0 - 1)) == 1.0).unwrap();
    let overlap = cosine_mode(&g, &[k], 1.0);
    let lh = split_low_high(&overlap, &spec, &part).unwrap();
    assert!(lh.low > 0.0 && (lh.low - lh.high).abs() < 1e-14 * lh.low);

    // Sum of both sides dominates the full norm, with equality off the overlap.
    for seed in 0..10 {
        let f = noise(&g, 900 + seed);
        let lh = split_low_high(&f, &spec, &part).unwrap();
        let full = besov_norm(&f, &spec, &part).unwrap().value;
        let shared: f64 = (k0 - 1..=k0).map(|j| spec_block(&f, &part, j)).sum();
        assert!((lh.low + lh.high - full - shared).abs() < 1e-12 * full);
    }
    let quiet = cosine_mode(&g, &[1 << (k0 + 3)], 1.0).add(&cosine_mode(&g, &[1], 1.0));
    let lh = split_low_high(&quiet, &spec, &part).unwrap();
    let full = besov_norm(&quiet, &spec, &part).unwrap().value;
    assert!((lh.low + lh.high - full).abs() < 1e-12 * full);
}

fn spec_block(f: &SpectralField, part: &DyadicPartition, j: i32) -> f64 {
    part.block(f, j).l2_norm()
}

#[test]
fn chemin_lerner_constant_in_time_equals_besov() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let f = noise(&g, 7);
    let spec = BesovSpec::new(0.5, 2.0, 1.0).unwrap();
    let times = [0.0, 0.5, 1.0];
    let cl = chemin_lerner_norm(&times, &[&f, &f, &f], f64::INFINITY, &spec, &part).unwrap();
    let b = besov_norm(&f, &spec, &part).unwrap().value;
    assert!((cl.value - b).abs() < 1e-14 * b);
    assert!(matches!(
        chemin_lerner_norm(&[0.0], &[&f], 1.0, &spec, &part),
        Err(Error::TooFewSamples { .. })
    ));
}

#[test]
fn chemin_lerner_quadrature_matches_closed_form() {
    let g = Grid::new(1, 32, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let f = cosine_mode(&g, &[3], 1.0);
    let spec = BesovSpec::new(1.0, 2.0, 1.0).unwrap();
    let m = 2001;
    let times: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
    let samples: Vec<SpectralField> = times.iter().map(|t| f.scaled((-t).exp())).collect();
    let refs: Vec<&SpectralField> = samples.iter().collect();
    let cl = chemin_lerner_norm(&times, &refs, 1.0, &spec, &part).unwrap().value;
    let expected = (1.0 - (-1f64).exp()) * besov_norm(&f, &spec, &part).unwrap().value;
    // Trapezoid error for e^{-t} with h = 5e-4 is about h^2/12.
    assert!((cl - expected).abs() < 1e-7 * expected);
}

#[test]
fn minkowski_ordering_holds() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let part = build_partition(&g).unwrap();
    let base: Vec<SpectralField> = (0..3).map(|s| noise(&g, 70 + s)).collect();
    let times: Vec<f64> = (0..21).map(|i| i as f64 * 0.1).collect();
    let samples: Vec<SpectralField> = times
        .iter()
        .map(|&t| {
            base[0]
                .scaled((-t).exp())
                .axpy((3.0 * t).sin(), &base[1])
                .axpy(t * t, &base[2])
        })
        .collect();
    let refs: Vec<&SpectralField> = samples.iter().collect();
    for (q, r) in [(1.0, 1.0), (2.0, 1.0), (f64::INFINITY, 1.0), (1.0, 2.0), (2.0, 2.0), (1.0, f64::INFINITY)] {
        let spec = BesovSpec::new(0.5, 2.0, r).unwrap();
        let tilde = chemin_lerner_norm(&times, &refs, q, &spec, &part).unwrap().value;
        let plain = lebesgue_time_norm(&times, &refs, q, &spec, &part).unwrap();
        if r >= q {
            assert!(tilde <= plain * (1.0 + 1e-12), "q {q} r {r}");
        }
        if r <= q {
            assert!(tilde >= plain * (1.0 - 1e-12), "q {q} r {r}");
        }
    }
}
