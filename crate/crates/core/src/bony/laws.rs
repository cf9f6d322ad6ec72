//! Catalogue of product and composition laws with empirical constants.
//!
//! Every law compares a Gevrey-weighted left side with a product of norms of
//! the weighted factors `F = exp(delta Lambda_1) f`, `G = exp(delta Lambda_1) g`.
//! Trials draw `F` and `G` directly, so no amplification of noisy data
//! happens before the products.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decompose::{bony_piece, BonyPiece};
use super::series::{compose_analytic, PowerSeries};
use crate::error::{Error, Result};
use crate::gevrey::gevrey_weight;
use crate::littlewood_paley::{
    besov_norm, build_partition, chemin_lerner_norm, split_low_high, BesovSpec, DyadicPartition,
};
use crate::spectral::{
    apply_multiplier, inverse, smooth_random_field, symbols, Grid, ProductEngine, SpectralField,
    Spectrum, ZeroMode,
};

const INF: f64 = f64::INFINITY;

/// Stable identifiers of the catalogued laws.
pub const LAW_IDS: [&str; 13] = [
    "product",
    "product-time",
    "paraproduct",
    "remainder",
    "paraproduct-mixed",
    "remainder-mixed",
    "paraproduct-l2",
    "remainder-l2",
    "low-product-high-derivative",
    "low-product",
    "low-product-split",
    "composition",
    "composition-lipschitz",
];

/// A law together with its indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum Law {
    /// `|e(fg)|_{B^{s1+s2-d/p}_{p,1}} <= C |F|_{B^{s1}_{p,1}} |G|_{B^{s2}_{p,1}}`.
    Product { p: f64, s1: f64, s2: f64 },
    /// The product law in Chemin-Lerner norms on heat-evolved samples,
    /// with `1/q = 1/q1 + 1/q2`.
    ProductTime { p: f64, s1: f64, s2: f64, q1: f64, q2: f64 },
    /// `|e T_f g|_{B^{s-sigma}_{p,r}} <= C |F|_{B^{-sigma}_{p1,r1}} |G|_{B^s_{p2,r2}}`.
    Paraproduct { s: f64, sigma: f64, p1: f64, p2: f64, r1: f64, r2: f64 },
    /// `|e R(f,g)|_{B^{s1+s2}_{p,r}} <= C |F|_{B^{s1}_{p1,r1}} |G|_{B^{s2}_{p2,r2}}`.
    Remainder { s1: f64, s2: f64, p1: f64, p2: f64, r1: f64, r2: f64 },
    /// Paraproduct with `p2 = p`: `F` measured in `B^{d/q-sigma}_{q,r1}`.
    ParaproductMixed { s: f64, sigma: f64, p: f64, q: f64, r1: f64, r2: f64 },
    /// Remainder with `p2 = p`: `F` measured in `B^{s1+d/q}_{q,r1}`.
    RemainderMixed { s1: f64, s2: f64, p: f64, q: f64, r1: f64, r2: f64 },
    /// `|e T_f g|_{B^s_{2,1}} <= C |F|_{B^{d/p-1}_{p,1}} |G|_{B^{s+1-d/2+d/p}_{p,1}}`.
    ParaproductL2 { p: f64, s: f64 },
    /// `|e R(f,g)|_{B^{s1+s2}_{2,1}} <= C |F|_{B^{s1+d(2/p-1/2)}_{p,1}} |G|_{B^{s2}_{p,1}}`.
    RemainderL2 { p: f64, s1: f64, s2: f64 },
    /// Low-frequency `B^{d/2}_{2,1}` bound by `B^{d/p-1}_{p,1} x B^{d/p+1}_{p,1}` pairs.
    LowProductHighDerivative { p: f64 },
    /// Low-frequency `B^{d/2-1}_{2,1}` bound by `B^{d/p-1}_{p,1} x B^{d/p}_{p,1}` pairs.
    LowProduct { p: f64 },
    /// Low-frequency `B^{d/2-1}_{2,1}` bound by `(F in B^{d/p-1} cap B^{d/p}) x (G in B^{d/p-1})`.
    LowProductSplit { p: f64 },
    /// `|e F(z)|_{B^s_{p,1}} <= D |Z|_{B^s_{p,1}}` for small `Z`, with `F(z) = z/(1+z)`.
    Composition { p: f64, s: f64, amplitude: f64 },
    /// `|e (F(z2) - F(z1))|_{B^s_{p,1}} <= D |Z2 - Z1|_{B^s_{p,1}}` for small `Z1, Z2`.
    CompositionLipschitz { p: f64, s: f64, amplitude: f64 },
}

fn violation(law: &str, reason: String) -> Error {
    Error::IndexConstraint {
        law: law.to_string(),
        reason,
    }
}

fn open_lebesgue(law: &str, name: &str, p: f64) -> Result<()> {
    if p > 1.0 && p < INF {
        Ok(())
    } else {
        Err(violation(law, format!("{name} = {p} must lie in (1, inf)")))
    }
}

fn summation(law: &str, name: &str, r: f64) -> Result<()> {
    if r == 1.0 || r == 2.0 || r == INF {
        Ok(())
    } else {
        Err(violation(law, format!("{name} = {r} not in {{1, 2, inf}}")))
    }
}

/// `r` with `1/r = 1/r1 + 1/r2`, required to be 1, 2 or inf.
fn harmonic(law: &str, names: (&str, &str), r1: f64, r2: f64) -> Result<f64> {
    summation(law, names.0, r1)?;
    summation(law, names.1, r2)?;
    let inv = 1.0 / r1 + 1.0 / r2;
    let r = if inv == 0.0 { INF } else { 1.0 / inv };
    if r == 1.0 || r == 2.0 || r == INF {
        Ok(r)
    } else {
        Err(violation(
            law,
            format!("1/{} + 1/{} = {inv} gives a summation index below 1", names.0, names.1),
        ))
    }
}

fn l2_framework_upper(d: usize) -> f64 {
    if d <= 2 {
        4.0
    } else {
        4f64.min(2.0 * d as f64 / (d as f64 - 2.0))
    }
}

fn paraproduct_sigma(law: &str, sigma: f64, r1: f64) -> Result<()> {
    if sigma > 0.0 || (sigma == 0.0 && r1 == 1.0) {
        Ok(())
    } else {
        Err(violation(law, format!("sigma = {sigma} must be > 0 (or = 0 with r1 = 1)")))
    }
}

fn composition_range(law: &str, d: usize, p: f64, s: f64, amplitude: f64) -> Result<()> {
    open_lebesgue(law, "p", p)?;
    let dp = d as f64 / p;
    let dpp = d as f64 * (1.0 - 1.0 / p);
    if !(s > -dp.min(dpp) && s <= dp) {
        return Err(violation(law, format!("s = {s} outside (-min(d/p, d/p'), d/p]")));
    }
    if !(amplitude > 0.0 && amplitude < 0.5) {
        return Err(violation(law, format!("amplitude {amplitude} must lie in (0, 1/2)")));
    }
    Ok(())
}

impl Law {
    /// The law registered under `id` with indices suited to dimension `d`.
    pub fn default_for(id: &str, d: usize) -> Result<Law> {
        let df = d as f64;
        let law = match id {
            "product" => Law::Product { p: 2.0, s1: df / 2.0, s2: df / 2.0 },
            "product-time" => Law::ProductTime { p: 2.0, s1: df / 2.0, s2: df / 2.0 - 0.5, q1: INF, q2: 2.0 },
            "paraproduct" => Law::Paraproduct { s: 0.5, sigma: 0.0, p1: 4.0, p2: 4.0, r1: 1.0, r2: INF },
            "remainder" => Law::Remainder { s1: 0.5, s2: 0.5, p1: 4.0, p2: 4.0, r1: 2.0, r2: 2.0 },
            "paraproduct-mixed" => Law::ParaproductMixed { s: 0.5, sigma: 0.5, p: 2.0, q: 4.0, r1: 2.0, r2: 2.0 },
            "remainder-mixed" => Law::RemainderMixed { s1: 0.0, s2: 0.5, p: 2.0, q: 4.0, r1: 1.0, r2: INF },
            "paraproduct-l2" => Law::ParaproductL2 { p: 3.0, s: 0.0 },
            "remainder-l2" => Law::RemainderL2 { p: 3.0, s1: 0.0, s2: 0.5 },
            "low-product-high-derivative" => Law::LowProductHighDerivative { p: 3.0 },
            "low-product" => Law::LowProduct { p: 3.0 },
            "low-product-split" => Law::LowProductSplit { p: 3.0 },
            "composition" => Law::Composition { p: 2.0, s: df / 2.0, amplitude: 0.3 },
            "composition-lipschitz" => Law::CompositionLipschitz { p: 2.0, s: df / 2.0 - 0.5, amplitude: 0.2 },
            other => return Err(Error::UnknownLaw(other.to_string())),
        };
        Ok(law)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Law::Product { .. } => "product",
            Law::ProductTime { .. } => "product-time",
            Law::Paraproduct { .. } => "paraproduct",
            Law::Remainder { .. } => "remainder",
            Law::ParaproductMixed { .. } => "paraproduct-mixed",
            Law::RemainderMixed { .. } => "remainder-mixed",
            Law::ParaproductL2 { .. } => "paraproduct-l2",
            Law::RemainderL2 { .. } => "remainder-l2",
            Law::LowProductHighDerivative { .. } => "low-product-high-derivative",
            Law::LowProduct { .. } => "low-product",
            Law::LowProductSplit { .. } => "low-product-split",
            Law::Composition { .. } => "composition",
            Law::CompositionLipschitz { .. } => "composition-lipschitz",
        }
    }

    /// Checks the hypotheses of the law in dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        let id = self.id();
        let df = d as f64;
        match *self {
            Law::Product { p, s1, s2 } | Law::ProductTime { p, s1, s2, .. } => {
                open_lebesgue(id, "p", p)?;
                if s1 > df / p || s2 > df / p {
                    return Err(violation(id, format!("s1 = {s1}, s2 = {s2} must not exceed d/p = {}", df / p)));
                }
                let floor = df * (2.0 / p - 1.0).max(0.0);
                if !(s1 + s2 > floor) {
                    return Err(violation(id, format!("s1 + s2 = {} must exceed {floor}", s1 + s2)));
                }
                if let Law::ProductTime { q1, q2, .. } = *self {
                    harmonic(id, ("q1", "q2"), q1, q2)?;
                }
            }
            Law::Paraproduct { sigma, p1, p2, r1, r2, .. } => {
                open_lebesgue(id, "p1", p1)?;
                open_lebesgue(id, "p2", p2)?;
                open_lebesgue(id, "p", 1.0 / (1.0 / p1 + 1.0 / p2))?;
                harmonic(id, ("r1", "r2"), r1, r2)?;
                paraproduct_sigma(id, sigma, r1)?;
            }
            Law::Remainder { s1, s2, p1, p2, r1, r2 } => {
                open_lebesgue(id, "p1", p1)?;
                open_lebesgue(id, "p2", p2)?;
                open_lebesgue(id, "p", 1.0 / (1.0 / p1 + 1.0 / p2))?;
                harmonic(id, ("r1", "r2"), r1, r2)?;
                if !(s1 + s2 > 0.0) {
                    return Err(violation(id, format!("s1 + s2 = {} must be > 0", s1 + s2)));
                }
            }
            Law::ParaproductMixed { sigma, p, q, r1, r2, .. } => {
                open_lebesgue(id, "p", p)?;
                open_lebesgue(id, "q", q)?;
                harmonic(id, ("r1", "r2"), r1, r2)?;
                paraproduct_sigma(id, sigma, r1)?;
            }
            Law::RemainderMixed { s1, s2, p, q, r1, r2 } => {
                open_lebesgue(id, "p", p)?;
                open_lebesgue(id, "q", q)?;
                harmonic(id, ("r1", "r2"), r1, r2)?;
                if !(s1 + s2 > 0.0) {
                    return Err(violation(id, format!("s1 + s2 = {} must be > 0", s1 + s2)));
                }
            }
            Law::ParaproductL2 { p, .. } => {
                let hi = l2_framework_upper(d);
                if !(p >= 2.0 && p <= hi) {
                    return Err(violation(id, format!("p = {p} outside [2, {hi}]")));
                }
            }
            Law::RemainderL2 { p, s1, s2 } => {
                if d < 2 {
                    return Err(violation(id, format!("dimension {d} < 2")));
                }
                if !(2.0..=4.0).contains(&p) {
                    return Err(violation(id, format!("p = {p} outside [2, 4]")));
                }
                let floor = df * (0.5 - 2.0 / p);
                if !(s1 + s2 > floor) {
                    return Err(violation(id, format!("s1 + s2 = {} must exceed {floor}", s1 + s2)));
                }
            }
            Law::LowProductHighDerivative { p } | Law::LowProduct { p } | Law::LowProductSplit { p } => {
                let hi = l2_framework_upper(d);
                if !(p >= 2.0 && p <= hi) {
                    return Err(violation(id, format!("p = {p} outside [2, {hi}]")));
                }
                if !(p < 2.0 * df) {
                    return Err(violation(id, format!("p = {p} must be < 2d (so p != 4 when d = 2)")));
                }
            }
            Law::Composition { p, s, amplitude } | Law::CompositionLipschitz { p, s, amplitude } => {
                composition_range(id, d, p, s, amplitude)?;
            }
        }
        Ok(())
    }
}

/// Trial settings shared by every law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSettings {
    pub seed: u64,
    /// Gevrey radius `sqrt(c0 t)`; for the time law the radius at `t = 1`.
    pub delta: f64,
    /// Range of the spectral cut-off of the random factors.
    pub xi_c_range: (f64, f64),
}

impl Default for MeasureSettings {
    fn default() -> Self {
        MeasureSettings {
            seed: 0,
            delta: 0.1,
            xi_c_range: (0.75, 1.5),
        }
    }
}

/// Spread of the per-trial ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

impl RatioSummary {
    pub fn of(values: &[f64]) -> RatioSummary {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let n = sorted.len();
        let median = if n == 0 {
            f64::NAN
        } else if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        RatioSummary {
            min: sorted.first().copied().unwrap_or(f64::NAN),
            median,
            mean: sorted.iter().sum::<f64>() / n as f64,
            max: sorted.last().copied().unwrap_or(f64::NAN),
        }
    }
}

/// Largest left/right ratio over random trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub law_id: String,
    pub law: Law,
    pub trials: usize,
    pub measured_c: f64,
    pub summary: RatioSummary,
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    pub delta: f64,
    pub seed: u64,
}

struct Context {
    engine: ProductEngine,
    part: DyadicPartition,
    delta: f64,
}

impl Context {
    fn norm(&self, f: &SpectralField, sigma: f64, p: f64, r: f64) -> Result<f64> {
        let spec = BesovSpec::new(sigma, p, r)?;
        Ok(besov_norm(&f.without_mean(), &spec, &self.part)?.value)
    }

    fn low_norm(&self, f: &SpectralField, sigma: f64) -> Result<f64> {
        let spec = BesovSpec::new(sigma, 2.0, 1.0)?;
        Ok(split_low_high(&f.without_mean(), &spec, &self.part)?.low)
    }

    fn damp(&self, f: &SpectralField, delta: f64) -> Result<SpectralField> {
        gevrey_weight(f, -delta)
    }

    fn amplify(&self, f: &SpectralField, delta: f64) -> Result<SpectralField> {
        gevrey_weight(f, delta)
    }

    /// `exp(delta Lambda_1)` applied to a Bony piece of the damped factors.
    fn weighted_piece(&self, big_f: &SpectralField, big_g: &SpectralField, piece: BonyPiece) -> Result<SpectralField> {
        let f = self.damp(big_f, self.delta)?;
        let g = self.damp(big_g, self.delta)?;
        self.amplify(&bony_piece(&self.engine, &self.part, &f, &g, piece)?, self.delta)
    }

    fn weighted_product(&self, big_f: &SpectralField, big_g: &SpectralField, delta: f64) -> Result<SpectralField> {
        let f = self.damp(big_f, delta)?;
        let g = self.damp(big_g, delta)?;
        self.amplify(&self.engine.multiply(&f, &g), delta)
    }
}

fn trial_fields(grid: &Grid, seed: u64, trial: usize, range: (f64, f64)) -> (SpectralField, SpectralField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let sf = Spectrum::sample(&mut rng, range);
    let sg = Spectrum::sample(&mut rng, range);
    let base = seed.wrapping_mul(1_000_003).wrapping_add(2 * trial as u64);
    (
        smooth_random_field(grid, base, sf),
        smooth_random_field(grid, base + 1, sg),
    )
}

/// Rescales `z` so that its damped version has sup norm `amplitude`.
fn small(ctx: &Context, z: &SpectralField, amplitude: f64) -> Result<SpectralField> {
    let damped = ctx.damp(z, ctx.delta)?;
    let sup = inverse(&damped).sup();
    Ok(z.scaled(amplitude / sup))
}

fn evaluate(law: &Law, ctx: &Context, big_f: &SpectralField, big_g: &SpectralField) -> Result<(f64, f64)> {
    let d = ctx.engine.grid().dim() as f64;
    let nm = |f: &SpectralField, s: f64, p: f64, r: f64| ctx.norm(f, s, p, r);
    Ok(match *law {
        Law::Product { p, s1, s2 } => {
            let lhs = ctx.weighted_product(big_f, big_g, ctx.delta)?;
            (nm(&lhs, s1 + s2 - d / p, p, 1.0)?, nm(big_f, s1, p, 1.0)? * nm(big_g, s2, p, 1.0)?)
        }
        Law::ProductTime { p, s1, s2, q1, q2 } => product_time(ctx, big_f, big_g, p, s1, s2, q1, q2)?,
        Law::Paraproduct { s, sigma, p1, p2, r1, r2 } => {
            let p = 1.0 / (1.0 / p1 + 1.0 / p2);
            let r = harmonic(law.id(), ("r1", "r2"), r1, r2)?;
            let t = ctx.weighted_piece(big_f, big_g, BonyPiece::ParaproductFG)?;
            (nm(&t, s - sigma, p, r)?, nm(big_f, -sigma, p1, r1)? * nm(big_g, s, p2, r2)?)
        }
        Law::Remainder { s1, s2, p1, p2, r1, r2 } => {
            let p = 1.0 / (1.0 / p1 + 1.0 / p2);
            let r = harmonic(law.id(), ("r1", "r2"), r1, r2)?;
            let rem = ctx.weighted_piece(big_f, big_g, BonyPiece::Remainder)?;
            (nm(&rem, s1 + s2, p, r)?, nm(big_f, s1, p1, r1)? * nm(big_g, s2, p2, r2)?)
        }
        Law::ParaproductMixed { s, sigma, p, q, r1, r2 } => {
            let r = harmonic(law.id(), ("r1", "r2"), r1, r2)?;
            let t = ctx.weighted_piece(big_f, big_g, BonyPiece::ParaproductFG)?;
            (nm(&t, s - sigma, p, r)?, nm(big_f, d / q - sigma, q, r1)? * nm(big_g, s, p, r2)?)
        }
        Law::RemainderMixed { s1, s2, p, q, r1, r2 } => {
            let r = harmonic(law.id(), ("r1", "r2"), r1, r2)?;
            let rem = ctx.weighted_piece(big_f, big_g, BonyPiece::Remainder)?;
            (nm(&rem, s1 + s2, p, r)?, nm(big_f, s1 + d / q, q, r1)? * nm(big_g, s2, p, r2)?)
        }
        Law::ParaproductL2 { p, s } => {
            let t = ctx.weighted_piece(big_f, big_g, BonyPiece::ParaproductFG)?;
            (
                nm(&t, s, 2.0, 1.0)?,
                nm(big_f, d / p - 1.0, p, 1.0)? * nm(big_g, s + 1.0 - d / 2.0 + d / p, p, 1.0)?,
            )
        }
        Law::RemainderL2 { p, s1, s2 } => {
            let rem = ctx.weighted_piece(big_f, big_g, BonyPiece::Remainder)?;
            (
                nm(&rem, s1 + s2, 2.0, 1.0)?,
                nm(big_f, s1 + d * (2.0 / p - 0.5), p, 1.0)? * nm(big_g, s2, p, 1.0)?,
            )
        }
        Law::LowProductHighDerivative { p } => {
            let prod = ctx.weighted_product(big_f, big_g, ctx.delta)?;
            let dp = d / p;
            (
                ctx.low_norm(&prod, d / 2.0)?,
                nm(big_f, dp - 1.0, p, 1.0)? * nm(big_g, dp + 1.0, p, 1.0)?
                    + nm(big_f, dp + 1.0, p, 1.0)? * nm(big_g, dp - 1.0, p, 1.0)?,
            )
        }
        Law::LowProduct { p } => {
            let prod = ctx.weighted_product(big_f, big_g, ctx.delta)?;
            let dp = d / p;
            (
                ctx.low_norm(&prod, d / 2.0 - 1.0)?,
                nm(big_f, dp - 1.0, p, 1.0)? * nm(big_g, dp, p, 1.0)?
                    + nm(big_f, dp, p, 1.0)? * nm(big_g, dp - 1.0, p, 1.0)?,
            )
        }
        Law::LowProductSplit { p } => {
            let prod = ctx.weighted_product(big_f, big_g, ctx.delta)?;
            let dp = d / p;
            (
                ctx.low_norm(&prod, d / 2.0 - 1.0)?,
                (nm(big_f, dp - 1.0, p, 1.0)? + nm(big_f, dp, p, 1.0)?) * nm(big_g, dp - 1.0, p, 1.0)?,
            )
        }
        Law::Composition { p, s, amplitude } => {
            let z = small(ctx, big_f, amplitude)?;
            let fz = compose(ctx, &z)?;
            (nm(&fz, s, p, 1.0)?, nm(&z, s, p, 1.0)?)
        }
        Law::CompositionLipschitz { p, s, amplitude } => {
            let z1 = small(ctx, big_f, amplitude)?;
            let z2 = small(ctx, big_g, amplitude)?;
            let diff = compose(ctx, &z2)?.sub(&compose(ctx, &z1)?);
            (nm(&diff, s, p, 1.0)?, nm(&z2.sub(&z1), s, p, 1.0)?)
        }
    })
}

/// `exp(delta Lambda_1) F(exp(-delta Lambda_1) Z)` with `F(z) = z / (1 + z)`.
fn compose(ctx: &Context, big_z: &SpectralField) -> Result<SpectralField> {
    let z = ctx.damp(big_z, ctx.delta)?;
    let fz = compose_analytic(&ctx.engine, &PowerSeries::z_over_one_plus_z(), &z, 40)?.field;
    ctx.amplify(&fz, ctx.delta)
}

/// Samples on `[0, 1]` of heat-evolved factors with radius `delta sqrt(t)`.
const TIME_SAMPLES: usize = 11;

#[allow(clippy::too_many_arguments)]
fn product_time(
    ctx: &Context,
    big_f: &SpectralField,
    big_g: &SpectralField,
    p: f64,
    s1: f64,
    s2: f64,
    q1: f64,
    q2: f64,
) -> Result<(f64, f64)> {
    let d = ctx.engine.grid().dim() as f64;
    let q = harmonic("product-time", ("q1", "q2"), q1, q2)?;
    let times: Vec<f64> = (0..TIME_SAMPLES).map(|k| k as f64 / (TIME_SAMPLES - 1) as f64).collect();
    let heat = |f: &SpectralField, t: f64| {
        apply_multiplier(f, symbols::heat(1.0.into(), t), ZeroMode::Evaluate)
    };
    let mut fs = Vec::with_capacity(times.len());
    let mut gs = Vec::with_capacity(times.len());
    let mut prods = Vec::with_capacity(times.len());
    for &t in &times {
        let ft = heat(big_f, t)?;
        let gt = heat(big_g, t)?;
        prods.push(ctx.weighted_product(&ft, &gt, ctx.delta * t.sqrt())?.without_mean());
        fs.push(ft);
        gs.push(gt);
    }
    let cl = |fields: &[SpectralField], q: f64, sigma: f64| -> Result<f64> {
        let refs: Vec<&SpectralField> = fields.iter().collect();
        let spec = BesovSpec::new(sigma, p, 1.0)?;
        Ok(chemin_lerner_norm(&times, &refs, q, &spec, &ctx.part)?.value)
    };
    Ok((cl(&prods, q, s1 + s2 - d / p)?, cl(&fs, q1, s1)? * cl(&gs, q2, s2)?))
}

/// Runs `trials` random trials of `law` on `grid` and reports the largest ratio.
pub fn measure_product_constant(
    law: &Law,
    trials: usize,
    grid: &Grid,
    settings: &MeasureSettings,
) -> Result<ConstantReport> {
    law.validate(grid.dim())?;
    if trials == 0 {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    if !(settings.delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("Gevrey radius {} must be >= 0", settings.delta)));
    }
    let ctx = Context {
        engine: ProductEngine::padded(grid),
        part: build_partition(grid)?,
        delta: settings.delta,
    };
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (f, g) = trial_fields(grid, settings.seed, trial, settings.xi_c_range);
            let (lhs, rhs) = evaluate(law, &ctx, &f, &g)?;
            Ok(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY })
        })
        .collect::<Result<_>>()?;
    let summary = RatioSummary::of(&ratios);
    Ok(ConstantReport {
        law_id: law.id().to_string(),
        law: law.clone(),
        trials,
        measured_c: summary.max,
        summary,
        dim: grid.dim(),
        n: grid.n(),
        length: grid.length(),
        delta: settings.delta,
        seed: settings.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn catalogue_defaults_are_valid() {
        for d in [2, 3] {
            for id in LAW_IDS {
                let law = Law::default_for(id, d).unwrap();
                assert_eq!(law.id(), id);
                law.validate(d).unwrap();
            }
        }
        assert!(matches!(Law::default_for("nope", 2), Err(Error::UnknownLaw(_))));
    }

    #[test]
    fn hypotheses_are_enforced() {
        let bad = [
            Law::LowProduct { p: 4.0 },
            Law::Product { p: 2.0, s1: 1.5, s2: 0.5 },
            Law::Product { p: 1.5, s1: 0.0, s2: 0.0 },
            Law::Paraproduct { s: 0.0, sigma: 0.0, p1: 4.0, p2: 4.0, r1: 2.0, r2: 2.0 },
            Law::Paraproduct { s: 0.0, sigma: 0.5, p1: 4.0, p2: 4.0, r1: 1.0, r2: 1.0 },
            Law::Remainder { s1: -0.5, s2: 0.5, p1: 4.0, p2: 4.0, r1: 2.0, r2: 2.0 },
            Law::RemainderL2 { p: 5.0, s1: 0.0, s2: 0.0 },
            Law::ParaproductL2 { p: 1.5, s: 0.0 },
            Law::Composition { p: 2.0, s: 1.5, amplitude: 0.3 },
            Law::Composition { p: 2.0, s: -1.0, amplitude: 0.3 },
        ];
        for law in bad {
            assert!(matches!(law.validate(2), Err(Error::IndexConstraint { .. })), "{law:?}");
        }
        assert!(Law::LowProduct { p: 4.0 }.validate(3).is_ok());
    }

    #[test]
    fn boundary_paraproduct_case_is_finite() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let law = Law::default_for("paraproduct", 2).unwrap();
        let rep = measure_product_constant(&law, 4, &g, &MeasureSettings::default()).unwrap();
        assert!(rep.measured_c.is_finite() && rep.measured_c > 0.0);
    }

    #[test]
    fn algebra_case_is_finite_and_deterministic() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let law = Law::default_for("product", 2).unwrap();
        let s = MeasureSettings { seed: 5, delta: 0.0, ..Default::default() };
        let a = measure_product_constant(&law, 6, &g, &s).unwrap();
        let b = measure_product_constant(&law, 6, &g, &s).unwrap();
        assert!(a.measured_c.is_finite());
        assert_eq!(a, b);
    }
}
