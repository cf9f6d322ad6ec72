use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Lines gathered per rayon task along the contiguous axis.
const LINES_PER_TASK: usize = 64;

/// Periodic box `[0, L)^d` sampled by `N` points per side.
///
/// Lattice points are stored row-major with axis 0 slowest. The integer
/// frequency of storage index `m` on an axis is `m` for `m < N/2` and
/// `m - N` otherwise, so every axis covers `[-N/2, N/2)`.
///
/// Two wavevectors are cached per point. `xi` is the full lattice value and
/// feeds every even symbol (`|xi|`, `|xi|_1`, dyadic cut-offs). `deriv`
/// zeroes the Nyquist components; odd symbols (derivatives, Leray, Riesz)
/// use it so that real fields stay real.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    dim: usize,
    n: usize,
    length: f64,
    len: usize,
    kint: Vec<[i32; 3]>,
    xi: Vec<[f64; 3]>,
    deriv: Vec<[f64; 3]>,
    norm: Vec<f64>,
    norm1: Vec<f64>,
    neg: Vec<usize>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim())
            .field("n", &self.n())
            .field("length", &self.length())
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.dim() == other.dim()
                && self.n() == other.n()
                && self.length() == other.length())
    }
}

impl Grid {
    /// Checked constructor: `d` in 1..=3, `n` a power of two at least 8, `length > 0`.
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Grid> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per side {n} must be a power of two >= 8"
            )));
        }
        Self::build(dim, n, length)
    }

    /// Builds a grid for any even `n >= 2`; used for dealiasing-padded grids.
    pub(crate) fn build(dim: usize, n: usize, length: f64) -> Result<Grid> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("side length {length} must be > 0")));
        }
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("points per side {n} must be even")));
        }
        let len = n.pow(dim as u32);
        let unit = 2.0 * PI / length;
        let half = (n / 2) as i32;
        let mut kint = Vec::with_capacity(len);
        let mut xi = Vec::with_capacity(len);
        let mut deriv = Vec::with_capacity(len);
        let mut norm = Vec::with_capacity(len);
        let mut norm1 = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        for p in 0..len {
            let mut k = [0i32; 3];
            let mut x = [0.0; 3];
            let mut dv = [0.0; 3];
            let mut rem = p;
            let mut q = 0usize;
            for axis in (0..dim).rev() {
                let m = rem % n;
                rem /= n;
                let ki = if (m as i32) < half { m as i32 } else { m as i32 - n as i32 };
                k[axis] = ki;
                x[axis] = unit * ki as f64;
                dv[axis] = if ki == -half { 0.0 } else { x[axis] };
                let mneg = (n - m) % n;
                q += mneg * n.pow((dim - 1 - axis) as u32);
            }
            norm.push(x.iter().map(|v| v * v).sum::<f64>().sqrt());
            norm1.push(x.iter().map(|v| v.abs()).sum());
            kint.push(k);
            xi.push(x);
            deriv.push(dv);
            neg.push(q);
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Grid {
            inner: Arc::new(GridInner {
                dim,
                n,
                length,
                len,
                kint,
                xi,
                deriv,
                norm,
                norm1,
                neg,
                fwd,
                inv,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    /// Number of lattice points, `N^d`.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    /// Grid spacing `L/N`.
    pub fn dx(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    /// Lattice spacing in frequency, `2 pi / L`.
    pub fn xi_unit(&self) -> f64 {
        2.0 * PI / self.inner.length
    }

    /// Volume `L^d` of the box.
    pub fn volume(&self) -> f64 {
        self.inner.length.powi(self.inner.dim as i32)
    }

    pub fn wavevector(&self, p: usize) -> &[f64] {
        &self.inner.xi[p][..self.inner.dim]
    }

    pub fn deriv_wavevector(&self, p: usize) -> &[f64] {
        &self.inner.deriv[p][..self.inner.dim]
    }

    pub fn lattice_index(&self, p: usize) -> &[i32] {
        &self.inner.kint[p][..self.inner.dim]
    }

    /// `|xi|` for every lattice point.
    pub fn norms(&self) -> &[f64] {
        &self.inner.norm
    }

    /// `|xi|_1` for every lattice point.
    pub fn norms1(&self) -> &[f64] {
        &self.inner.norm1
    }

    /// Storage index of the lattice point `-k` (modulo `N`).
    pub fn negated(&self, p: usize) -> usize {
        self.inner.neg[p]
    }

    /// True when some component of the point sits on the Nyquist frequency `-N/2`.
    pub fn is_nyquist(&self, p: usize) -> bool {
        let half = (self.inner.n / 2) as i32;
        self.lattice_index(p).iter().any(|&k| k == -half)
    }

    /// Storage index of the integer frequency `k`, if it lies on the lattice.
    pub fn index_of(&self, k: &[i32]) -> Option<usize> {
        let n = self.inner.n as i32;
        let half = n / 2;
        let mut p = 0usize;
        for &ki in k.iter().take(self.inner.dim) {
            if ki < -half || ki >= half {
                return None;
            }
            let m = if ki < 0 { ki + n } else { ki };
            p = p * self.inner.n + m as usize;
        }
        Some(p)
    }

    pub fn max_norm(&self) -> f64 {
        self.inner.norm.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_norm1(&self) -> f64 {
        self.inner.norm1.iter().cloned().fold(0.0, f64::max)
    }

    /// Coordinates of physical sample `p` (row-major, axis 0 slowest).
    pub fn point(&self, p: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let mut rem = p;
        for axis in (0..self.inner.dim).rev() {
            x[axis] = (rem % self.inner.n) as f64 * self.dx();
            rem /= self.inner.n;
        }
        x
    }

    /// Unnormalized in-place multidimensional FFT.
    pub(crate) fn fft(&self, data: &mut [Complex64], inverse: bool) {
        let g = &*self.inner;
        debug_assert_eq!(data.len(), g.len);
        let plan = if inverse { &g.inv } else { &g.fwd };
        let n = g.n;
        let scratch_len = plan.get_inplace_scratch_len();
        for axis in 0..g.dim {
            let stride = n.pow((g.dim - 1 - axis) as u32);
            if stride == 1 {
                data.par_chunks_mut(n * LINES_PER_TASK).for_each_init(
                    || vec![Complex64::new(0.0, 0.0); scratch_len],
                    |scratch, chunk| plan.process_with_scratch(chunk, scratch),
                );
            } else {
                let block = n * stride;
                data.par_chunks_mut(block).for_each_init(
                    || {
                        (
                            vec![Complex64::new(0.0, 0.0); block],
                            vec![Complex64::new(0.0, 0.0); scratch_len],
                        )
                    },
                    |(buf, scratch), blk| {
                        for m in 0..n {
                            for s in 0..stride {
                                buf[s * n + m] = blk[m * stride + s];
                            }
                        }
                        plan.process_with_scratch(buf, scratch);
                        for m in 0..n {
                            for s in 0..stride {
                                blk[m * stride + s] = buf[s * n + m];
                            }
                        }
                    },
                );
            }
        }
    }
}
