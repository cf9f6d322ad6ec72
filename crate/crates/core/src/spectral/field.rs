use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real samples of a field on the physical grid.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(PhysicalField {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let d = grid.dim();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|p| f(&grid.point(p)[..d]))
            .collect();
        PhysicalField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Fourier coefficients `c_k` of `f(x) = sum_k c_k exp(i xi_k . x)`.
///
/// Index 0 is the mean. Fields built from real data satisfy
/// `c(-k) = conj(c(k))`; complex-valued frames (the effective velocity with
/// complex `alpha`) reuse the type without that symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Field whose coefficient at each point is `f(p)`.
    pub fn from_fn(grid: &Grid, f: impl Fn(usize) -> Complex64 + Sync) -> Self {
        let coeffs = (0..grid.len()).into_par_iter().map(|p| f(p)).collect();
        SpectralField {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn set_mean(&mut self, c: Complex64) {
        self.coeffs[0] = c;
    }

    pub fn without_mean(&self) -> SpectralField {
        let mut out = self.clone();
        out.coeffs[0] = Complex64::new(0.0, 0.0);
        out
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `L^2` norm over the box via Parseval: `sqrt(L^d sum |c_k|^2)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.volume() * s).sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest violation of `c(-k) = conj(c(k))`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let g = &self.grid;
        (0..g.len())
            .map(|p| (self.coeffs[g.negated(p)] - self.coeffs[p].conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        self.map(|_, c| c * s)
    }

    pub fn scaled_complex(&self, s: Complex64) -> SpectralField {
        self.map(|_, c| c * s)
    }

    /// Pointwise map over (index, coefficient).
    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64 + Sync) -> SpectralField {
        let coeffs = self
            .coeffs
            .par_iter()
            .enumerate()
            .map(|(p, &c)| f(p, c))
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.zip(other, |a, b| a - b)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> SpectralField {
        self.zip(other, |a, b| a + b * s)
    }

    pub fn add_assign(&mut self, other: &SpectralField) {
        self.coeffs
            .par_iter_mut()
            .zip(other.coeffs.par_iter())
            .for_each(|(a, b)| *a += *b);
    }

    pub fn zip(
        &self,
        other: &SpectralField,
        f: impl Fn(Complex64, Complex64) -> Complex64 + Sync,
    ) -> SpectralField {
        assert_eq!(self.grid, other.grid, "spectral fields live on different grids");
        let coeffs = self
            .coeffs
            .par_iter()
            .zip(other.coeffs.par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Largest coefficient difference relative to the larger of the two fields.
    pub fn relative_distance(&self, other: &SpectralField) -> f64 {
        let diff = self.sub(other).l2_norm();
        let scale = self.l2_norm().max(other.l2_norm());
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// Forward transform of real samples; divides by `N^d`.
pub fn forward(f: &PhysicalField) -> SpectralField {
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_complex_in_place(&f.grid, &mut buf);
    SpectralField {
        grid: f.grid.clone(),
        coeffs: buf,
    }
}

pub(crate) fn forward_complex_in_place(grid: &Grid, buf: &mut [Complex64]) {
    grid.fft(buf, false);
    let scale = 1.0 / grid.len() as f64;
    buf.par_iter_mut().for_each(|c| *c *= scale);
}

/// Inverse transform keeping the real part.
pub fn inverse(f: &SpectralField) -> PhysicalField {
    let buf = inverse_complex(f);
    PhysicalField {
        grid: f.grid.clone(),
        values: buf.into_iter().map(|c| c.re).collect(),
    }
}

/// Inverse transform returning complex samples (for non-Hermitian fields).
pub fn inverse_complex(f: &SpectralField) -> Vec<Complex64> {
    let mut buf = f.coeffs.clone();
    f.grid.fft(&mut buf, true);
    buf
}

/// Forward transform of complex samples.
pub fn forward_complex(grid: &Grid, values: Vec<Complex64>) -> Result<SpectralField> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let mut buf = values;
    forward_complex_in_place(grid, &mut buf);
    Ok(SpectralField {
        grid: grid.clone(),
        coeffs: buf,
    })
}

/// Density fluctuation and velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub a: SpectralField,
    pub u: Vec<SpectralField>,
}

impl State {
    pub fn zeros(grid: &Grid) -> Self {
        State {
            a: SpectralField::zeros(grid),
            u: (0..grid.dim()).map(|_| SpectralField::zeros(grid)).collect(),
        }
    }

    pub fn new(a: SpectralField, u: Vec<SpectralField>) -> Result<Self> {
        if u.len() != a.grid().dim() {
            return Err(Error::InvalidParameter(format!(
                "velocity has {} components on a {}-dimensional grid",
                u.len(),
                a.grid().dim()
            )));
        }
        for c in &u {
            a.check_grid(c)?;
        }
        Ok(State { a, u })
    }

    pub fn grid(&self) -> &Grid {
        self.a.grid()
    }

    /// Componentwise `self + s * other`.
    pub fn axpy(&self, s: f64, other: &State) -> State {
        State {
            a: self.a.axpy(s, &other.a),
            u: self
                .u
                .iter()
                .zip(&other.u)
                .map(|(x, y)| x.axpy(s, y))
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> State {
        State {
            a: self.a.scaled(s),
            u: self.u.iter().map(|c| c.scaled(s)).collect(),
        }
    }

    pub fn map_fields(&self, f: impl Fn(&SpectralField) -> SpectralField) -> State {
        State {
            a: f(&self.a),
            u: self.u.iter().map(&f).collect(),
        }
    }

    pub fn map_fields_result(&self, f: impl Fn(&SpectralField) -> Result<SpectralField>) -> Result<State> {
        Ok(State {
            a: f(&self.a)?,
            u: self.u.iter().map(&f).collect::<Result<_>>()?,
        })
    }

    /// `sqrt(|a|^2 + |u|^2)` in `L^2`.
    pub fn l2_norm(&self) -> f64 {
        let mut s = self.a.l2_norm().powi(2);
        for c in &self.u {
            s += c.l2_norm().powi(2);
        }
        s.sqrt()
    }

    pub fn relative_distance(&self, other: &State) -> f64 {
        let diff = self.axpy(-1.0, other).l2_norm();
        let scale = self.l2_norm().max(other.l2_norm());
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    pub fn is_finite(&self) -> bool {
        std::iter::once(&self.a)
            .chain(self.u.iter())
            .all(|f| f.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn noise(grid: &Grid, seed: u64) -> PhysicalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PhysicalField::new(grid, v).unwrap()
    }

    #[test]
    fn cosine_has_half_amplitudes() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let f = forward(&PhysicalField::from_fn(&g, |x| x[0].cos()));
        for p in 0..8 {
            let k = g.lattice_index(p)[0];
            let expect = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((f.coeffs()[p] - Complex64::new(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn round_trip_and_parseval_on_noise() {
        for (d, n) in [(1, 64), (2, 16), (3, 8)] {
            let g = Grid::new(d, n, 3.7).unwrap();
            for seed in 0..100 {
                let x = noise(&g, seed);
                let f = forward(&x);
                let y = inverse(&f);
                let err = x
                    .values()
                    .iter()
                    .zip(y.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(err < 1e-12 * x.sup());
                let phys = (x.values().iter().map(|v| v * v).sum::<f64>()
                    * g.dx().powi(d as i32))
                .sqrt();
                assert!((phys - f.l2_norm()).abs() < 1e-12 * phys);
                assert!(f.hermitian_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn state_rejects_wrong_component_count() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let a = SpectralField::zeros(&g);
        assert!(State::new(a.clone(), vec![a.clone()]).is_err());
        assert!(State::new(a.clone(), vec![a.clone(), a]).is_ok());
    }
}
