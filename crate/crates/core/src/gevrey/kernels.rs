//! Kernels of the exponential multipliers that control Gevrey regularity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{BlockKind, DyadicPartition};
use crate::spectral::{apply_multiplier, inverse, lp_norm, smooth_random_field, Grid, SpectralField, Spectrum, ZeroMode};
use num_complex::Complex64;

/// Physical kernel of `exp(-alpha Lambda_1)` with its mass and extremes.
#[derive(Clone, Debug)]
pub struct KernelReport {
    pub values: Vec<f64>,
    pub l1_mass: f64,
    pub min_value: f64,
    pub peak: f64,
}

/// The periodic Poisson kernel: inverse transform of `exp(-alpha |xi|_1)`,
/// normalized so that convolution with it is the multiplier.
pub fn poisson_kernel(alpha: f64, grid: &Grid) -> Result<KernelReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("kernel width {alpha} must be > 0")));
    }
    let vol = grid.volume();
    let coeffs = SpectralField::from_fn(grid, |p| Complex64::new((-alpha * grid.norms1()[p]).exp() / vol, 0.0));
    let h = inverse(&coeffs);
    let cell = grid.dx().powi(grid.dim() as i32);
    let values = h.into_values();
    let l1_mass = values.iter().map(|v| v.abs()).sum::<f64>() * cell;
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(KernelReport {
        values,
        l1_mass,
        min_value,
        peak,
    })
}

/// Which multiplier bound to measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "check")]
pub enum KernelCheck {
    /// `L^1` mass of the kernel of `exp(-(sqrt(t - tau) + sqrt(tau) - sqrt(t)) Lambda_1)`.
    RadiusGap { t: f64, tau: f64 },
    /// Largest `L^p` gain of `exp((a/2) Lap + sqrt(a) Lambda_1)` over random fields.
    HeatGevrey { a: f64, p: f64 },
    /// Smallest `C` with `|Lambda^s e^{-alpha Lambda_1} D_j u|_p <= C 2^{js} e^{-alpha 2^j / 4} |D_j u|_p`.
    ShellDecay { s: f64, alpha: f64, p: f64 },
}

/// Rate `c` in the shell decay bound.
pub const SHELL_DECAY_RATE: f64 = 0.25;

/// Random fields shared by the trial-based checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSettings {
    pub trials: usize,
    pub seed: u64,
}

impl Default for KernelSettings {
    fn default() -> Self {
        KernelSettings { trials: 50, seed: 0 }
    }
}

fn trial_fields(grid: &Grid, settings: &KernelSettings) -> Vec<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let top = grid.max_norm();
    (0..settings.trials)
        .map(|i| {
            // Cut-offs from a tenth of the lattice to all of it.
            let spec = Spectrum::sample(&mut rng, (0.1 * top, top));
            smooth_random_field(grid, settings.seed.wrapping_add(1 + i as u64), spec)
        })
        .collect()
}

pub fn radius_gap_exponent(t: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < t) {
        return Err(Error::InvalidParameter(format!("need 0 < tau < t, got tau = {tau}, t = {t}")));
    }
    Ok((t - tau).sqrt() + tau.sqrt() - t.sqrt())
}

pub fn kernel_check(
    check: KernelCheck,
    partition: &DyadicPartition,
    settings: &KernelSettings,
) -> Result<f64> {
    let grid = partition.grid();
    match check {
        KernelCheck::RadiusGap { t, tau } => Ok(poisson_kernel(radius_gap_exponent(t, tau)?, grid)?.l1_mass),
        KernelCheck::HeatGevrey { a, p } => {
            if !(a >= 0.0) {
                return Err(Error::InvalidParameter(format!("heat time {a} must be >= 0")));
            }
            let ra = a.sqrt();
            let mut worst: f64 = 0.0;
            for f in trial_fields(grid, settings) {
                let g = apply_multiplier(
                    &f,
                    |w| Complex64::new((-0.5 * a * w.norm * w.norm + ra * w.norm1).exp(), 0.0),
                    ZeroMode::Evaluate,
                )?;
                worst = worst.max(lp_norm(&inverse(&g), p)? / lp_norm(&inverse(&f), p)?);
            }
            Ok(worst)
        }
        KernelCheck::ShellDecay { s, alpha, p } => {
            if !(s >= 0.0 && alpha >= 0.0) {
                return Err(Error::InvalidParameter(format!("need s >= 0 and alpha >= 0, got {s}, {alpha}")));
            }
            let mut worst: f64 = 0.0;
            for f in trial_fields(grid, settings) {
                for j in partition.indices() {
                    let block = partition.dyadic_block(&f, j, BlockKind::Block)?;
                    let base = lp_norm(&inverse(&block), p)?;
                    if base == 0.0 {
                        continue;
                    }
                    let g = apply_multiplier(
                        &block,
                        |w| Complex64::new(w.norm.powf(s) * (-alpha * w.norm1).exp(), 0.0),
                        ZeroMode::Value(Complex64::new(0.0, 0.0)),
                    )?;
                    let scale = 2f64.powf(j as f64 * s) * (-SHELL_DECAY_RATE * alpha * 2f64.powi(j)).exp();
                    worst = worst.max(lp_norm(&inverse(&g), p)? / (scale * base));
                }
            }
            Ok(worst)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::build_partition;
    use std::f64::consts::PI;

    #[test]
    fn line_kernel_is_the_periodic_poisson_kernel() {
        let g = Grid::new(1, 256, 2.0 * PI).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            let k = poisson_kernel(alpha, &g).unwrap();
            // Periodization of alpha / (pi (alpha^2 + x^2)).
            for (i, v) in k.values.iter().enumerate() {
                let x = i as f64 * g.dx();
                let exact = alpha.sinh() / (2.0 * PI * (alpha.cosh() - x.cos()));
                assert!((v - exact).abs() < 1e-12 * exact.max(1.0), "alpha {alpha} x {x}");
            }
            assert_eq!(k.peak, k.values[0]);
            assert!((k.l1_mass - 1.0).abs() < 1e-12);
            assert!(k.min_value > 0.0);
        }
        assert!(poisson_kernel(0.0, &g).is_err());
    }

    #[test]
    fn trivial_cases() {
        let g = Grid::new(1, 64, 2.0 * PI).unwrap();
        let part = build_partition(&g).unwrap();
        let set = KernelSettings { trials: 5, seed: 1 };
        let m2 = kernel_check(KernelCheck::HeatGevrey { a: 0.0, p: 4.0 }, &part, &set).unwrap();
        assert!((m2 - 1.0).abs() < 1e-12);
        let c0 = kernel_check(KernelCheck::ShellDecay { s: 0.0, alpha: 0.0, p: 2.0 }, &part, &set).unwrap();
        assert!((c0 - 1.0).abs() < 1e-12);
        assert!(kernel_check(KernelCheck::RadiusGap { t: 1.0, tau: 1.0 }, &part, &set).is_err());
        let gap = radius_gap_exponent(2.0, 1.0).unwrap();
        assert!((gap - (2.0 - 2f64.sqrt())).abs() < 1e-15);
    }
}
