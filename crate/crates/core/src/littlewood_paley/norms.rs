use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partition::DyadicPartition;
use crate::error::{Error, Result};
use crate::spectral::ops::lp_norm_values;
use crate::spectral::{inverse, SpectralField};

/// Regularity, Lebesgue and summation indices plus the low/high threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub sigma: f64,
    pub p: f64,
    pub r: f64,
    /// Low/high threshold; `None` means the partition default.
    pub k0: Option<i32>,
}

impl BesovSpec {
    pub fn new(sigma: f64, p: f64, r: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(format!("p = {p} must be >= 1")));
        }
        if !(r == 1.0 || r == 2.0 || r.is_infinite() && r > 0.0) {
            return Err(Error::InvalidExponent(format!("r = {r} not in {{1, 2, inf}}")));
        }
        if !sigma.is_finite() {
            return Err(Error::InvalidExponent(format!("sigma = {sigma}")));
        }
        Ok(BesovSpec {
            sigma,
            p,
            r,
            k0: None,
        })
    }

    pub fn with_k0(mut self, k0: i32) -> Self {
        self.k0 = Some(k0);
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn k0_for(&self, partition: &DyadicPartition) -> i32 {
        self.k0.unwrap_or_else(|| partition.default_k0())
    }
}

/// Lebesgue exponents admissible in the critical `L^p` framework:
/// `2 <= p <= min(4, 2d/(d-2))`, and `p != 4` when `d = 2`.
pub fn validate_critical_p(d: usize, p: f64) -> Result<()> {
    let fail = |reason: String| {
        Err(Error::IndexConstraint {
            law: "critical L^p framework".into(),
            reason,
        })
    };
    if d < 2 {
        return fail(format!("dimension {d} < 2"));
    }
    let upper = if d == 2 {
        4.0
    } else {
        4f64.min(2.0 * d as f64 / (d as f64 - 2.0))
    };
    if !(p >= 2.0 && p <= upper) {
        return fail(format!("p = {p} outside [2, {upper}]"));
    }
    if d == 2 && p == 4.0 {
        return fail("p = 4 is excluded when d = 2".into());
    }
    Ok(())
}

/// Besov norm with its per-block breakdown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    /// `j -> 2^{j sigma} |Delta_j f|_{L^p}`.
    pub per_block: BTreeMap<i32, f64>,
    /// Share of the norm carried by the extreme blocks `j_min`, `j_max`.
    pub tail_mass: f64,
}

/// `l^r` aggregation.
pub fn aggregate(values: impl IntoIterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else if r == 1.0 {
        values.into_iter().sum()
    } else {
        values.into_iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

fn report(per_block: BTreeMap<i32, f64>, r: f64, partition: &DyadicPartition) -> NormReport {
    let value = aggregate(per_block.values().cloned(), r);
    let tails = [partition.j_min(), partition.j_max()];
    let tail_mass = if value == 0.0 {
        0.0
    } else if r.is_infinite() {
        tails.iter().filter_map(|j| per_block.get(j)).fold(0.0, |m: f64, v| m.max(*v)) / value
    } else {
        let num: f64 = tails
            .iter()
            .filter_map(|j| per_block.get(j))
            .map(|v| v.powf(r))
            .sum();
        num / value.powf(r)
    };
    NormReport {
        value,
        per_block,
        tail_mass,
    }
}

fn check_mean(f: &SpectralField) -> Result<()> {
    let mean = f.mean().norm();
    if mean == 0.0 {
        return Ok(());
    }
    let rest = f.coeffs()[1..].iter().fold(0.0, |m: f64, c| m.max(c.norm()));
    if mean > 1e-12 * rest {
        return Err(Error::NonZeroMean(mean));
    }
    Ok(())
}

/// Unweighted `|Delta_j f|_{L^p}` for every active block, in index order.
pub fn block_lp_norms(f: &SpectralField, p: f64, partition: &DyadicPartition) -> Result<Vec<f64>> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(format!("p = {p} must be >= 1")));
    }
    let js: Vec<i32> = partition.indices().collect();
    if p == 2.0 {
        let vol = partition.grid().volume();
        return Ok(js
            .iter()
            .map(|&j| {
                let s: f64 = partition
                    .weights(j)
                    .iter()
                    .map(|&(q, w)| w * w * f.coeffs()[q].norm_sqr())
                    .sum();
                (vol * s).sqrt()
            })
            .collect());
    }
    js.par_iter()
        .map(|&j| {
            let b = inverse(&partition.block(f, j));
            lp_norm_values(b.values(), partition.grid(), p)
        })
        .collect()
}

fn weighted(blocks: &[f64], sigma: f64, partition: &DyadicPartition) -> BTreeMap<i32, f64> {
    partition
        .indices()
        .zip(blocks)
        .map(|(j, &b)| (j, 2f64.powf(j as f64 * sigma) * b))
        .collect()
}

/// `|| 2^{j sigma} |Delta_j f|_{L^p} ||_{l^r}` for a zero-mean field.
pub fn besov_norm(f: &SpectralField, spec: &BesovSpec, partition: &DyadicPartition) -> Result<NormReport> {
    check_mean(f)?;
    let blocks = block_lp_norms(f, spec.p, partition)?;
    Ok(report(weighted(&blocks, spec.sigma, partition), spec.r, partition))
}

/// Sum of component norms of a vector field.
pub fn besov_norm_vector(
    u: &[SpectralField],
    spec: &BesovSpec,
    partition: &DyadicPartition,
) -> Result<f64> {
    u.iter()
        .map(|c| besov_norm(c, spec, partition).map(|r| r.value))
        .sum()
}

/// Low and high parts around `k0`: blocks `j <= k0` and `j >= k0 - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowHigh {
    pub low: f64,
    pub high: f64,
}

impl LowHigh {
    pub fn from_weighted(per_block: &BTreeMap<i32, f64>, k0: i32) -> Self {
        LowHigh {
            low: per_block.range(..=k0).map(|(_, v)| v).sum(),
            high: per_block.range(k0 - 1..).map(|(_, v)| v).sum(),
        }
    }

    pub fn add(self, o: LowHigh) -> LowHigh {
        LowHigh {
            low: self.low + o.low,
            high: self.high + o.high,
        }
    }
}

/// Restricted `B^sigma_{p,1}` norms; the block pair `k0-1, k0` counts on both sides.
pub fn split_low_high(f: &SpectralField, spec: &BesovSpec, partition: &DyadicPartition) -> Result<LowHigh> {
    check_mean(f)?;
    let blocks = block_lp_norms(f, spec.p, partition)?;
    Ok(LowHigh::from_weighted(
        &weighted(&blocks, spec.sigma, partition),
        spec.k0_for(partition),
    ))
}

fn check_times(times: &[f64], q: f64) -> Result<()> {
    if q.is_finite() && times.len() < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: times.len(),
        });
    }
    if times.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("sample times must increase".into()));
    }
    Ok(())
}

/// `L^q` norm in time of sampled values; trapezoid rule, max for `q = inf`.
pub fn time_lq(times: &[f64], values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().cloned().fold(0.0, f64::max);
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(q) + v[1].powf(q)))
        .sum();
    integral.powf(1.0 / q)
}

/// Per-block time norms `|| |Delta_j f(t)|_{L^p} ||_{L^q_t}`, in index order.
pub fn block_time_norms(
    times: &[f64],
    samples: &[&SpectralField],
    q: f64,
    p: f64,
    partition: &DyadicPartition,
) -> Result<Vec<f64>> {
    check_times(times, q)?;
    if times.len() != samples.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: samples.len(),
        });
    }
    for s in samples {
        check_mean(s)?;
    }
    let per_time: Vec<Vec<f64>> = samples
        .iter()
        .map(|f| block_lp_norms(f, p, partition))
        .collect::<Result<_>>()?;
    Ok((0..partition.num_blocks())
        .map(|b| {
            let series: Vec<f64> = per_time.iter().map(|v| v[b]).collect();
            time_lq(times, &series, q)
        })
        .collect())
}

/// Chemin-Lerner norm: time `L^q` per block, then weighted `l^r`.
pub fn chemin_lerner_norm(
    times: &[f64],
    samples: &[&SpectralField],
    q: f64,
    spec: &BesovSpec,
    partition: &DyadicPartition,
) -> Result<NormReport> {
    let blocks = block_time_norms(times, samples, q, spec.p, partition)?;
    Ok(report(weighted(&blocks, spec.sigma, partition), spec.r, partition))
}

/// Plain `L^q_t(B^sigma_{p,r})` norm: the Besov norm first, then time.
pub fn lebesgue_time_norm(
    times: &[f64],
    samples: &[&SpectralField],
    q: f64,
    spec: &BesovSpec,
    partition: &DyadicPartition,
) -> Result<f64> {
    check_times(times, q)?;
    let values: Vec<f64> = samples
        .iter()
        .map(|f| besov_norm(f, spec, partition).map(|r| r.value))
        .collect::<Result<_>>()?;
    Ok(time_lq(times, &values, q))
}
