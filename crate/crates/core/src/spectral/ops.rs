use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Frequency data handed to a symbol.
#[derive(Clone, Copy, Debug)]
pub struct Frequency<'a> {
    /// Full lattice wavevector.
    pub xi: &'a [f64],
    /// Wavevector with Nyquist components zeroed, for odd symbols.
    pub deriv: &'a [f64],
    pub norm: f64,
    pub norm1: f64,
}

impl<'a> Frequency<'a> {
    pub fn at(grid: &'a Grid, p: usize) -> Self {
        Frequency {
            xi: grid.wavevector(p),
            deriv: grid.deriv_wavevector(p),
            norm: grid.norms()[p],
            norm1: grid.norms1()[p],
        }
    }
}

/// How a multiplier treats the mean mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZeroMode {
    /// Evaluate the symbol at zero. A non-finite value is accepted only
    /// when the mean vanishes, in which case the output mean is zero.
    Evaluate,
    /// Use this value for `m(0)`.
    Value(Complex64),
}

impl ZeroMode {
    pub fn zero() -> Self {
        ZeroMode::Value(Complex64::new(0.0, 0.0))
    }
}

/// `c(xi) <- m(xi) c(xi)` on every lattice point.
pub fn apply_multiplier<F>(f: &SpectralField, m: F, zero: ZeroMode) -> Result<SpectralField>
where
    F: Fn(&Frequency) -> Complex64 + Sync,
{
    let g = f.grid().clone();
    let mut out = f.map(|p, c| if p == 0 { c } else { m(&Frequency::at(&g, p)) * c });
    let mean = f.mean();
    let m0 = match zero {
        ZeroMode::Value(v) => v,
        ZeroMode::Evaluate => m(&Frequency::at(&g, 0)),
    };
    let new_mean = if m0.re.is_finite() && m0.im.is_finite() {
        m0 * mean
    } else if mean.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        return Err(Error::SingularZeroMode { mean: mean.norm() });
    };
    out.set_mean(new_mean);
    Ok(out)
}

/// Ready-made symbols.
pub mod symbols {
    use super::Frequency;
    use num_complex::Complex64;

    /// `|xi|^s`, the symbol of `Lambda^s`.
    pub fn lambda_pow(s: f64) -> impl Fn(&Frequency) -> Complex64 + Sync {
        move |w| {
            if w.norm == 0.0 {
                if s == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else if s > 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(f64::INFINITY, 0.0)
                }
            } else {
                Complex64::new(w.norm.powf(s), 0.0)
            }
        }
    }

    /// `exp(delta |xi|_1)`, the symbol of `exp(delta Lambda_1)`.
    pub fn exp_lambda1(delta: f64) -> impl Fn(&Frequency) -> Complex64 + Sync {
        move |w| Complex64::new((delta * w.norm1).exp(), 0.0)
    }

    /// `exp(-beta t |xi|^2)`, the symbol of `exp(beta t Delta)` for complex `beta`.
    pub fn heat(beta: Complex64, t: f64) -> impl Fn(&Frequency) -> Complex64 + Sync {
        move |w| (-beta * t * w.norm * w.norm).exp()
    }

    /// `i xi_axis`, the symbol of the partial derivative.
    pub fn partial(axis: usize) -> impl Fn(&Frequency) -> Complex64 + Sync {
        move |w| Complex64::new(0.0, w.deriv[axis])
    }
}

/// Partial derivative along `axis`.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let g = f.grid().clone();
    f.map(|p, c| c * Complex64::new(0.0, g.deriv_wavevector(p)[axis]))
}

pub fn gradient(f: &SpectralField) -> Vec<SpectralField> {
    (0..f.grid().dim()).map(|i| partial(f, i)).collect()
}

pub fn divergence(u: &[SpectralField]) -> SpectralField {
    let g = u[0].grid().clone();
    SpectralField::from_fn(&g, |p| {
        let k = g.deriv_wavevector(p);
        u.iter()
            .zip(k)
            .map(|(c, &ki)| c.coeffs()[p] * Complex64::new(0.0, ki))
            .sum()
    })
}

/// Squared norm of the derivative wavevector, the symbol of `-Delta`.
pub fn deriv_norm_sqr(g: &Grid, p: usize) -> f64 {
    g.deriv_wavevector(p).iter().map(|k| k * k).sum()
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    f.map(|p, c| c * (-deriv_norm_sqr(&g, p)))
}

/// `(-Delta)^{-1}` with the mean sent to zero.
pub fn inverse_neg_laplacian(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    f.map(|p, c| {
        let k2 = deriv_norm_sqr(&g, p);
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            c / k2
        }
    })
}

/// Leray decomposition `u = Pu + Qu` with `Qu = grad Delta^{-1} div u`.
///
/// `P` is the identity wherever the derivative wavevector vanishes, which
/// includes the mean.
pub fn leray_project(u: &[SpectralField]) -> Result<(Vec<SpectralField>, Vec<SpectralField>)> {
    let g = u[0].grid().clone();
    if u.len() != g.dim() {
        return Err(Error::InvalidParameter(format!(
            "vector field has {} components on a {}-dimensional grid",
            u.len(),
            g.dim()
        )));
    }
    for c in u {
        u[0].check_grid(c)?;
    }
    let d = g.dim();
    let q: Vec<Vec<Complex64>> = {
        let per_point: Vec<[Complex64; 3]> = (0..g.len())
            .into_par_iter()
            .map(|p| {
                let k = g.deriv_wavevector(p);
                let k2: f64 = k.iter().map(|x| x * x).sum();
                let mut out = [Complex64::new(0.0, 0.0); 3];
                if k2 > 0.0 {
                    let dot: Complex64 = (0..d).map(|i| u[i].coeffs()[p] * k[i]).sum();
                    for i in 0..d {
                        out[i] = dot * (k[i] / k2);
                    }
                }
                out
            })
            .collect();
        (0..d)
            .map(|i| per_point.iter().map(|v| v[i]).collect())
            .collect()
    };
    let mut pu = Vec::with_capacity(d);
    let mut qu = Vec::with_capacity(d);
    for (i, qc) in q.into_iter().enumerate() {
        let qf = SpectralField::from_coeffs(&g, qc)?;
        pu.push(u[i].sub(&qf));
        qu.push(qf);
    }
    Ok((pu, qu))
}

/// Discrete `L^p` norm with cell weight `(L/N)^d`; `p = inf` gives the max.
pub fn lp_norm(f: &PhysicalField, p: f64) -> Result<f64> {
    lp_norm_values(f.values(), f.grid(), p)
}

pub(crate) fn lp_norm_values(values: &[f64], grid: &Grid, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(format!("Lebesgue exponent {p} < 1")));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let cell = grid.dx().powi(grid.dim() as i32);
    let sum: f64 = if p == 2.0 {
        values.iter().map(|v| v * v).sum()
    } else {
        values.iter().map(|v| v.abs().powf(p)).sum()
    };
    Ok((sum * cell).powf(1.0 / p))
}
