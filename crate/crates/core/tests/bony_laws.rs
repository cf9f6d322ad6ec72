use std::f64::consts::PI;

use nsk_core::bony::{
    bony_decompose, gevrey_bilinear_with, measure_product_constant, BilinearRoute, Law, MeasureSettings,
    LAW_IDS,
};
use nsk_core::littlewood_paley::build_partition;
use nsk_core::spectral::{inverse, lp_norm, smooth_random_field, Grid, Padding, ProductEngine, Spectrum};
use nsk_core::Error;

#[test]
fn decomposition_identity_on_random_pairs() {
    for (d, n) in [(1, 64), (2, 32)] {
        let g = Grid::new(d, n, 2.0 * PI).unwrap();
        let engine = ProductEngine::padded(&g);
        let part = build_partition(&g).unwrap();
        for seed in 0..100u64 {
            let f = smooth_random_field(&g, 2 * seed, Spectrum::new(1.0 + (seed % 3) as f64, 3.0));
            let h = smooth_random_field(&g, 2 * seed + 1, Spectrum::new(1.5, 2.0));
            let parts = bony_decompose(&engine, &part, &f, &h).unwrap();
            assert!(parts.relative_residual < 1e-10, "d {d} seed {seed}: {}", parts.relative_residual);
        }
    }
}

#[test]
fn decomposition_refuses_unpadded_products() {
    let g = Grid::new(1, 16, 2.0 * PI).unwrap();
    let engine = ProductEngine::new(&g, Padding::None).unwrap();
    let part = build_partition(&g).unwrap();
    let f = smooth_random_field(&g, 1, Spectrum::new(1.0, 2.0));
    assert!(matches!(bony_decompose(&engine, &part, &f, &f), Err(Error::Unpadded)));
}

#[test]
fn shell_bookkeeping_sends_low_high_products_to_one_paraproduct() {
    // f lives far above g: the product is T_g f, the other pieces vanish.
    let g = Grid::new(1, 128, 2.0 * PI).unwrap();
    let engine = ProductEngine::padded(&g);
    let part = build_partition(&g).unwrap();
    let mut hi = nsk_core::spectral::SpectralField::zeros(&g);
    let mut lo = hi.clone();
    let (p, q) = (g.index_of(&[40]).unwrap(), g.index_of(&[1]).unwrap());
    hi.coeffs_mut()[p] = 1.0.into();
    hi.coeffs_mut()[g.negated(p)] = 1.0.into();
    lo.coeffs_mut()[q] = 1.0.into();
    lo.coeffs_mut()[g.negated(q)] = 1.0.into();
    let parts = bony_decompose(&engine, &part, &hi, &lo).unwrap();
    let total = engine.multiply(&hi, &lo).l2_norm();
    assert!(parts.t_gf.l2_norm() > 0.99 * total);
    assert!(parts.t_fg.l2_norm() < 1e-14 * total);
    assert!(parts.r_fg.l2_norm() < 1e-14 * total);
}

#[test]
fn mean_only_factor_is_a_pure_paraproduct() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let engine = ProductEngine::padded(&g);
    let part = build_partition(&g).unwrap();
    let mut c = nsk_core::spectral::SpectralField::zeros(&g);
    c.set_mean(2.5.into());
    let h = smooth_random_field(&g, 3, Spectrum::new(1.0, 2.0));
    let parts = bony_decompose(&engine, &part, &c, &h).unwrap();
    assert!(parts.t_fg.relative_distance(&h.scaled(2.5)) < 1e-14);
    assert_eq!(parts.t_gf.l2_norm(), 0.0);
    assert_eq!(parts.r_fg.l2_norm(), 0.0);
}

fn bilinear_constant(n: usize, delta: f64) -> f64 {
    let g = Grid::new(2, n, 2.0 * PI).unwrap();
    let engine = ProductEngine::padded(&g);
    (0..100u64)
        .map(|seed| {
            let f = smooth_random_field(&g, 7 * seed, Spectrum::new(1.0 + (seed % 5) as f64 * 0.5, 1.5));
            let h = smooth_random_field(&g, 7 * seed + 3, Spectrum::new(2.0, 1.0));
            let b = gevrey_bilinear_with(&engine, &f, &h, delta, BilinearRoute::Convolution).unwrap();
            b.l2_norm() / (lp_norm(&inverse(&f), 4.0).unwrap() * lp_norm(&inverse(&h), 4.0).unwrap())
        })
        .fold(0.0, f64::max)
}

#[test]
fn gevrey_bilinear_constant_is_uniform_in_radius_and_resolution() {
    let mut all = Vec::new();
    for delta in [0.0, 0.5, 2.0, 10.0] {
        let coarse = bilinear_constant(16, delta);
        let fine = bilinear_constant(32, delta);
        assert!(coarse.is_finite() && fine.is_finite());
        assert!(fine / coarse <= 2.0 && coarse / fine <= 2.0, "delta {delta}: {coarse} vs {fine}");
        all.push(fine);
    }
    let (lo, hi) = all.iter().fold((f64::MAX, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
    assert!(hi / lo < 10.0, "{all:?}");
}

#[test]
fn every_law_is_finite_and_refinement_stable() {
    let settings = MeasureSettings { seed: 11, ..Default::default() };
    for id in LAW_IDS {
        let law = Law::default_for(id, 2).unwrap();
        let coarse = measure_product_constant(&law, 100, &Grid::new(2, 32, 2.0 * PI).unwrap(), &settings).unwrap();
        let fine = measure_product_constant(&law, 100, &Grid::new(2, 64, 2.0 * PI).unwrap(), &settings).unwrap();
        let ratio = fine.measured_c / coarse.measured_c;
        assert!(coarse.measured_c.is_finite() && fine.measured_c.is_finite(), "{id}");
        assert!((0.5..=2.0).contains(&ratio), "{id}: {ratio}");
    }
}
