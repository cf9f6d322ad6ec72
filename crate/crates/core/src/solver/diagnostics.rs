//! Per-time diagnostics and the running smallness functional.
//!
//! The functional adds, for the low blocks `j <= k0`, the sup-in-time of
//! `2^{j(d/2-1)} |D_j (a, u)|_2` and the time integral of
//! `2^{j(d/2+1)} |D_j (a, u)|_2`; for the high blocks `j >= k0 - 1`, the same
//! two quantities in `L^p` with weights `2^{j d/p}` and `2^{j(d/p+2)}` for `a`
//! and `2^{j(d/p-1)}`, `2^{j(d/p+1)}` for `u`. At a single time it reduces
//! to the size of the data.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::littlewood_paley::{block_lp_norms, validate_critical_p, DyadicPartition};

/// The critical range for `d >= 2`; a line only supports `p = 2`.
pub fn validate_diagnostic_p(d: usize, p: f64) -> Result<()> {
    if d == 1 {
        if p != 2.0 {
            return Err(Error::IndexConstraint {
                law: "critical L^p framework".into(),
                reason: format!("p = {p} on a line; only p = 2 is supported"),
            });
        }
        return Ok(());
    }
    validate_critical_p(d, p)
}
use crate::spectral::State;

/// Block norms of `a` and of the velocity (components summed) at one time.
#[derive(Clone, Debug)]
struct BlockSample {
    t: f64,
    a2: Vec<f64>,
    u2: Vec<f64>,
    ap: Vec<f64>,
    up: Vec<f64>,
}

fn velocity_blocks(state: &State, p: f64, part: &DyadicPartition) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; part.num_blocks()];
    for c in &state.u {
        for (s, v) in acc.iter_mut().zip(block_lp_norms(c, p, part)?) {
            *s += v;
        }
    }
    Ok(acc)
}

impl BlockSample {
    fn new(t: f64, state: &State, p: f64, part: &DyadicPartition) -> Result<Self> {
        let a2 = block_lp_norms(&state.a, 2.0, part)?;
        let u2 = velocity_blocks(state, 2.0, part)?;
        let (ap, up) = if p == 2.0 {
            (a2.clone(), u2.clone())
        } else {
            (block_lp_norms(&state.a, p, part)?, velocity_blocks(state, p, part)?)
        };
        Ok(BlockSample { t, a2, u2, ap, up })
    }
}

/// Running sup and trapezoid integral of every block quantity.
#[derive(Clone, Debug)]
pub struct SmallnessTracker {
    partition: DyadicPartition,
    p: f64,
    k0: i32,
    last: Option<BlockSample>,
    sup: [Vec<f64>; 4],
    integral: [Vec<f64>; 4],
}

impl SmallnessTracker {
    pub fn new(partition: &DyadicPartition, p: f64, k0: i32) -> Result<Self> {
        validate_diagnostic_p(partition.grid().dim(), p)?;
        let n = partition.num_blocks();
        Ok(SmallnessTracker {
            partition: partition.clone(),
            p,
            k0,
            last: None,
            sup: std::array::from_fn(|_| vec![0.0; n]),
            integral: std::array::from_fn(|_| vec![0.0; n]),
        })
    }

    pub fn push(&mut self, t: f64, state: &State) -> Result<f64> {
        if let Some(prev) = &self.last {
            if !(t > prev.t) {
                return Err(Error::InvalidParameter(format!("time {t} does not advance past {}", prev.t)));
            }
        }
        let s = BlockSample::new(t, state, self.p, &self.partition)?;
        let fields = |b: &BlockSample| [b.a2.clone(), b.u2.clone(), b.ap.clone(), b.up.clone()];
        let now = fields(&s);
        if let Some(prev) = &self.last {
            let dt = t - prev.t;
            for (k, old) in fields(prev).iter().enumerate() {
                for (i, v) in old.iter().enumerate() {
                    self.integral[k][i] += 0.5 * dt * (v + now[k][i]);
                }
            }
        }
        for (k, vals) in now.iter().enumerate() {
            for (i, v) in vals.iter().enumerate() {
                self.sup[k][i] = self.sup[k][i].max(*v);
            }
        }
        self.last = Some(s);
        Ok(self.value())
    }

    pub fn value(&self) -> f64 {
        let d = self.partition.grid().dim() as f64;
        let p = self.p;
        let mut total = 0.0;
        for (i, j) in self.partition.indices().enumerate() {
            let two = |s: f64| 2f64.powf(j as f64 * s);
            if j <= self.k0 {
                total += two(d / 2.0 - 1.0) * (self.sup[0][i] + self.sup[1][i]);
                total += two(d / 2.0 + 1.0) * (self.integral[0][i] + self.integral[1][i]);
            }
            if j >= self.k0 - 1 {
                total += two(d / p) * self.sup[2][i] + two(d / p + 2.0) * self.integral[2][i];
                total += two(d / p - 1.0) * self.sup[3][i] + two(d / p + 1.0) * self.integral[3][i];
            }
        }
        total
    }
}

/// Size of the data in the low/high norm that controls the global theory.
pub fn data_smallness(state: &State, p: f64, k0: i32, partition: &DyadicPartition) -> Result<f64> {
    let mut tr = SmallnessTracker::new(partition, p, k0)?;
    tr.push(0.0, state)
}

/// Diagnostics recorded at one output time.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub t: f64,
    pub energy: f64,
    pub mean_a: f64,
    pub sup_a: f64,
    pub smallness: f64,
    /// Low part of `(a, u)` in the `L^2`-based critical norm.
    pub low: f64,
    pub a_high: f64,
    pub u_high: f64,
    pub radius: Option<f64>,
    pub radius_residual: Option<f64>,
    pub truncation_tail: f64,
}

impl Diagnostics {
    pub fn is_finite(&self) -> bool {
        [self.energy, self.mean_a, self.sup_a, self.smallness, self.low, self.a_high, self.u_high]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn largest(&self) -> f64 {
        [self.energy, self.sup_a, self.smallness, self.low, self.a_high, self.u_high]
            .iter()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// Low part of `(a, u)` and high parts of `a` and `u` at one time.
pub fn split_norms(state: &State, p: f64, k0: i32, partition: &DyadicPartition) -> Result<(f64, f64, f64)> {
    let s = BlockSample::new(0.0, state, p, partition)?;
    let d = partition.grid().dim() as f64;
    let (mut low, mut ah, mut uh) = (0.0, 0.0, 0.0);
    for (i, j) in partition.indices().enumerate() {
        let two = |e: f64| 2f64.powf(j as f64 * e);
        if j <= k0 {
            low += two(d / 2.0 - 1.0) * (s.a2[i] + s.u2[i]);
        }
        if j >= k0 - 1 {
            ah += two(d / p) * s.ap[i];
            uh += two(d / p - 1.0) * s.up[i];
        }
    }
    Ok((low, ah, uh))
}
