//! Criteria on kernels, the Bony decomposition and the product laws.

use std::f64::consts::PI;

use anyhow::Result;
use nsk_core::bony::{
    bilinear_weight, bony_decompose, gevrey_bilinear_with, measure_product_constant, BilinearRoute, Law,
    MeasureSettings, LAW_IDS,
};
use nsk_core::gevrey::{kernel_check, poisson_kernel, KernelCheck, KernelSettings};
use nsk_core::littlewood_paley::{build_partition, validate_critical_p};
use nsk_core::spectral::{inverse, lp_norm, smooth_random_field, Grid, ProductEngine, Spectrum};
use nsk_core::Error;
use rayon::prelude::*;

use super::{CheckOutcome, Criterion, Size};
use crate::table::{num, short, Table};

fn torus(d: usize, n: usize) -> Result<Grid> {
    Ok(Grid::new(d, n, 2.0 * PI)?)
}

pub fn kernel_bounds(size: Size, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::KernelBounds);
    let n = size.pick(64, 256);

    let mut mass = Table::new("kernel_mass", &["dim", "alpha", "l1_mass", "min_over_peak"]).summary();
    let (mut mass_err, mut worst_min) = (0.0f64, f64::INFINITY);
    for d in [1, 2] {
        let grid = torus(d, n)?;
        for alpha in [0.5, 1.0, 2.0] {
            let k = poisson_kernel(alpha, &grid)?;
            mass_err = mass_err.max((k.l1_mass - 1.0).abs());
            worst_min = worst_min.min(k.min_value / k.peak);
            mass.push(vec![d.to_string(), num(alpha), short(k.l1_mass), short(k.min_value / k.peak)]);
        }
    }
    out.require(mass_err <= 1e-3, format!("kernel mass within {mass_err:.1e} of 1"));
    out.require(worst_min >= -1e-6, format!("kernel minimum {worst_min:.1e} x peak (>= -1e-6)"));

    let settings = KernelSettings { trials: size.pick(10, 50), seed };
    let part2 = build_partition(&torus(2, size.pick(32, 64))?)?;
    let part_big = build_partition(&torus(2, n)?)?;
    let mut gap = Table::new("radius_gap", &["t", "tau", "l1_norm"]).summary();
    let mut gaps = Vec::new();
    for t in [0.5, 1.0, 2.0, 4.0, 8.0] {
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let tau = frac * t;
            let m = kernel_check(KernelCheck::RadiusGap { t, tau }, &part_big, &settings)?;
            gaps.push(m);
            gap.push(vec![num(t), num(tau), short(m)]);
        }
    }
    let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().copied().fold(0.0, f64::max);
    out.require(
        gaps.iter().all(|g| g.is_finite()) && hi <= 3.0 * lo,
        format!("radius-gap kernel norms in [{lo:.4}, {hi:.4}] (spread <= x3)"),
    );

    // The symbol peaks at e^{d/2}; the lattice and the trial spectra keep
    // the measured norm lower.
    let mut heat = Table::new("heat_gevrey", &["dim", "a", "p", "operator_norm"]).summary();
    let mut worst_heat: f64 = 0.0;
    let part1 = build_partition(&torus(1, n)?)?;
    for (d, part) in [(1, &part1), (2, &part2)] {
        for a in [0.0, 0.1, 1.0, 10.0] {
            for p in [2.0, 4.0] {
                let m = kernel_check(KernelCheck::HeatGevrey { a, p }, part, &settings)?;
                worst_heat = worst_heat.max(m);
                heat.push(vec![d.to_string(), num(a), num(p), short(m)]);
            }
        }
    }
    out.require(worst_heat <= 2.0, format!("heat-Gevrey operator norm {worst_heat:.4} (<= 2)"));

    let mut shell = Table::new("shell_decay", &["s", "alpha", "p", "constant"]).summary();
    let mut per_s = Vec::new();
    for s in [0.0, 1.0, 2.0, 4.0] {
        let mut worst: f64 = 0.0;
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            for p in [2.0, 3.0] {
                let c = kernel_check(KernelCheck::ShellDecay { s, alpha, p }, &part2, &settings)?;
                worst = worst.max(c);
                shell.push(vec![num(s), num(alpha), num(p), short(c)]);
            }
        }
        per_s.push((s, worst));
    }
    let finite = per_s.iter().all(|(_, c)| c.is_finite() && *c > 0.0);
    // Polynomial growth: log C_s against log(1 + s) stays below a fixed slope.
    let slope = per_s
        .iter()
        .skip(1)
        .map(|&(s, c)| (c / per_s[0].1).ln() / (1.0 + s).ln())
        .fold(0.0, f64::max);
    let listed = per_s.iter().map(|(s, c)| format!("C_{s} = {c:.3}")).collect::<Vec<_>>().join(", ");
    out.require(finite, format!("shell decay constants finite ({listed}), growth exponent {slope:.2}"));

    out.tables.extend([mass, gap, heat, shell]);
    Ok(out)
}

fn gevrey_bilinear_constant(n: usize, delta: f64, trials: u64) -> Result<f64> {
    let g = torus(2, n)?;
    let engine = ProductEngine::padded(&g);
    let ratios = (0..trials)
        .into_par_iter()
        .map(|seed| -> Result<f64> {
            let f = smooth_random_field(&g, 7 * seed, Spectrum::new(1.0 + (seed % 5) as f64 * 0.5, 1.5));
            let h = smooth_random_field(&g, 7 * seed + 3, Spectrum::new(2.0, 1.0));
            let b = gevrey_bilinear_with(&engine, &f, &h, delta, BilinearRoute::Convolution)?;
            Ok(b.l2_norm() / (lp_norm(&inverse(&f), 4.0)? * lp_norm(&inverse(&h), 4.0)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

pub fn bony_exactness(size: Size, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::BonyExactness);
    let pairs = size.pick(20, 100);
    let mut worst: f64 = 0.0;
    for (d, n) in [(1, 64), (2, 32)] {
        let g = torus(d, n)?;
        let engine = ProductEngine::padded(&g);
        let part = build_partition(&g)?;
        let res = (0..pairs as u64)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let base = seed.wrapping_mul(1000).wrapping_add(2 * i);
                let f = smooth_random_field(&g, base, Spectrum::new(1.0 + (i % 3) as f64, 3.0));
                let h = smooth_random_field(&g, base + 1, Spectrum::new(1.5, 2.0));
                Ok(bony_decompose(&engine, &part, &f, &h)?.relative_residual)
            })
            .collect::<Result<Vec<f64>>>()?;
        worst = res.into_iter().fold(worst, f64::max);
    }
    out.require(worst < 1e-10, format!("decomposition residual {worst:.2e} (< 1e-10) on {pairs} pairs per dimension"));

    // Integer lattice, so the triangle-inequality gap is computed exactly.
    let g = torus(2, 32)?;
    let mut weight_max: f64 = 0.0;
    for delta in [0.1, 1.0, 10.0] {
        let m = (0..g.len())
            .into_par_iter()
            .map(|p| {
                (0..g.len())
                    .map(|q| bilinear_weight(g.wavevector(p), g.wavevector(q), delta))
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        weight_max = weight_max.max(m);
    }
    out.require(weight_max <= 1.0, format!("bilinear weight max {weight_max} (<= 1) on all lattice pairs"));

    let mut table = Table::new("bilinear_constant", &["delta", "coarse", "fine", "ratio"]).summary();
    let trials = size.pick(20, 100);
    let (coarse_n, fine_n) = size.pick((8, 16), (16, 32));
    let mut stable = true;
    for delta in [0.0, 0.5, 2.0, 10.0] {
        let c = gevrey_bilinear_constant(coarse_n, delta, trials)?;
        let f = gevrey_bilinear_constant(fine_n, delta, trials)?;
        let ratio = f / c;
        stable &= c.is_finite() && f.is_finite() && (0.5..=2.0).contains(&ratio);
        table.push(vec![num(delta), short(c), short(f), short(ratio)]);
    }
    out.require(stable, format!("bilinear constant stable within x2 under N = {coarse_n} -> {fine_n}"));
    out.tables.push(table);
    Ok(out)
}

/// Laws whose indices break a hypothesis; each must be refused.
fn invalid_laws() -> Vec<(Law, usize)> {
    vec![
        (Law::LowProduct { p: 4.0 }, 2),
        (Law::LowProductSplit { p: 4.0 }, 2),
        (Law::Product { p: 2.0, s1: 2.0, s2: 0.5 }, 2),
        (Law::Paraproduct { s: 0.5, sigma: -0.5, p1: 4.0, p2: 4.0, r1: 1.0, r2: f64::INFINITY }, 2),
        (Law::Remainder { s1: -0.5, s2: 0.25, p1: 4.0, p2: 4.0, r1: 2.0, r2: 2.0 }, 2),
        (Law::RemainderL2 { p: 3.0, s1: 0.0, s2: 0.5 }, 1),
        (Law::ProductTime { p: 2.0, s1: 1.0, s2: 0.5, q1: 1.0, q2: 1.0 }, 2),
        (Law::Composition { p: 2.0, s: 1.0, amplitude: 0.75 }, 2),
    ]
}

pub fn product_constants(size: Size, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::ProductConstants);
    let trials = size.pick(20, 100);
    let (coarse_n, fine_n) = size.pick((16, 32), (32, 64));
    let settings = MeasureSettings { seed, ..Default::default() };
    let mut table = Table::new("law_constants", &["law", "coarse", "fine", "ratio", "median_fine"]).summary();
    let mut failures = Vec::new();
    for id in LAW_IDS {
        let law = Law::default_for(id, 2)?;
        let coarse = measure_product_constant(&law, trials, &torus(2, coarse_n)?, &settings)?;
        let fine = measure_product_constant(&law, trials, &torus(2, fine_n)?, &settings)?;
        let ratio = fine.measured_c / coarse.measured_c;
        if !(coarse.measured_c.is_finite() && fine.measured_c.is_finite() && (0.5..=2.0).contains(&ratio)) {
            failures.push(id);
        }
        table.push(vec![
            id.to_string(),
            short(coarse.measured_c),
            short(fine.measured_c),
            short(ratio),
            short(fine.summary.median),
        ]);
    }
    out.require(
        failures.is_empty(),
        format!("{} laws finite and stable within x2 under N = {coarse_n} -> {fine_n}, {trials} trials{}", LAW_IDS.len(),
            if failures.is_empty() { String::new() } else { format!(" (unstable: {})", failures.join(", ")) }),
    );
    let refused = invalid_laws()
        .iter()
        .filter(|(law, d)| matches!(law.validate(*d), Err(Error::IndexConstraint { .. })))
        .count();
    let p4 = matches!(validate_critical_p(2, 4.0), Err(Error::IndexConstraint { .. }));
    out.require(
        refused == invalid_laws().len() && p4,
        format!("{refused}/{} invalid index sets refused, p = 4 in d = 2 refused: {p4}", invalid_laws().len()),
    );
    out.tables.push(table);
    Ok(out)
}
