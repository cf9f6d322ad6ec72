use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

const PLATEAU: f64 = 0.75;
const EDGE: f64 = 4.0 / 3.0;

/// Radial cut-off: 1 on `[0, 3/4]`, 0 on `[4/3, inf)`, quintic smoothstep between.
pub fn chi(r: f64) -> f64 {
    if r <= PLATEAU {
        1.0
    } else if r >= EDGE {
        0.0
    } else {
        let t = (r - PLATEAU) / (EDGE - PLATEAU);
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// Annulus function `chi(r/2) - chi(r)`, supported in `[3/4, 8/3]`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

fn pow2(j: i32) -> f64 {
    2f64.powi(j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// `Delta_j`, multiplier `phi(2^-j xi)`.
    Block,
    /// `S_j`, multiplier `chi(2^-j xi)` away from the mean.
    LowCutoff,
}

/// Dyadic blocks active on a grid, stored as sparse (index, weight) lists.
///
/// `j_min..=j_max` are exactly the indices whose annulus meets a nonzero
/// lattice point, so the blocks sum to one on every nonzero mode.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    blocks: Vec<Vec<(usize, f64)>>,
}

pub fn build_partition(grid: &Grid) -> Result<DyadicPartition> {
    let mut entries: Vec<(i32, usize, f64)> = Vec::new();
    for p in 1..grid.len() {
        let r = grid.norms()[p];
        let jc = r.log2().floor() as i32;
        for j in jc - 2..=jc + 2 {
            let w = phi(r * pow2(-j));
            if w > 0.0 {
                entries.push((j, p, w));
            }
        }
    }
    let j_min = entries.iter().map(|e| e.0).min().unwrap_or(0);
    let j_max = entries.iter().map(|e| e.0).max().unwrap_or(-1);
    let count = (j_max - j_min + 1).max(0) as usize;
    if count < 3 {
        return Err(Error::TooFewShells(count));
    }
    let mut blocks = vec![Vec::new(); count];
    for (j, p, w) in entries {
        blocks[(j - j_min) as usize].push((p, w));
    }
    Ok(DyadicPartition {
        grid: grid.clone(),
        j_min,
        j_max,
        blocks,
    })
}

impl DyadicPartition {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Midpoint of the active range; the default low/high threshold.
    pub fn default_k0(&self) -> i32 {
        (self.j_min + self.j_max).div_euclid(2)
    }

    fn check(&self, j: i32) -> Result<()> {
        if j < self.j_min - 1 || j > self.j_max + 1 {
            return Err(Error::BlockOutOfRange {
                j,
                lo: self.j_min - 1,
                hi: self.j_max + 1,
            });
        }
        Ok(())
    }

    /// Nonzero weights of `Delta_j`; empty outside the active range.
    pub fn weights(&self, j: i32) -> &[(usize, f64)] {
        if j < self.j_min || j > self.j_max {
            &[]
        } else {
            &self.blocks[(j - self.j_min) as usize]
        }
    }

    /// `sum_j phi(2^-j xi)` at lattice point `p`.
    pub fn partition_sum(&self, p: usize) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .filter(|(q, _)| *q == p)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn dyadic_block(&self, f: &SpectralField, j: i32, kind: BlockKind) -> Result<SpectralField> {
        self.check(j)?;
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch("field and partition grids differ".into()));
        }
        Ok(match kind {
            BlockKind::Block => self.block(f, j),
            BlockKind::LowCutoff => self.low_cutoff(f, j),
        })
    }

    pub(crate) fn block(&self, f: &SpectralField, j: i32) -> SpectralField {
        let mut out = SpectralField::zeros(&self.grid);
        let c = out.coeffs_mut();
        for &(p, w) in self.weights(j) {
            c[p] = f.coeffs()[p] * w;
        }
        out
    }

    pub(crate) fn low_cutoff(&self, f: &SpectralField, j: i32) -> SpectralField {
        let g = self.grid.clone();
        let scale = pow2(-j);
        f.map(|p, c| {
            if p == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                c * chi(g.norms()[p] * scale)
            }
        })
    }
}
