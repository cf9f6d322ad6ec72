use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ProductEngine, SpectralField};

/// Number of coefficients kept when series are derived from one another.
pub const SERIES_LEN: usize = 64;

/// Default truncation order for pointwise evaluation.
pub const DEFAULT_TRUNCATION: usize = 12;

/// Power series `sum_n c_n z^n` with a declared convergence radius.
///
/// Coefficients beyond the stored ones are taken to be zero; the stored
/// tail beyond a truncation order is what truncation-error bounds use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
    radius: f64,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("convergence radius {radius} must be > 0")));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("series coefficients must be finite".into()));
        }
        Ok(PowerSeries { coeffs, radius })
    }

    /// A polynomial; entire, so the radius is infinite.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        PowerSeries {
            coeffs,
            radius: f64::INFINITY,
        }
    }

    pub fn zero() -> Self {
        Self::polynomial(Vec::new())
    }

    /// `z / (1 + z)`.
    pub fn z_over_one_plus_z() -> Self {
        let coeffs = (0..SERIES_LEN)
            .map(|n| if n == 0 { 0.0 } else if n % 2 == 1 { 1.0 } else { -1.0 })
            .collect();
        PowerSeries { coeffs, radius: 1.0 }
    }

    /// `1 / (1 + z)`.
    pub fn reciprocal_one_plus_z() -> Self {
        let coeffs = (0..SERIES_LEN).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
        PowerSeries { coeffs, radius: 1.0 }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Horner evaluation of the terms of order `<= order`.
    pub fn eval_truncated(&self, z: f64, order: usize) -> f64 {
        let top = order.min(self.coeffs.len().saturating_sub(1));
        if self.coeffs.is_empty() {
            return 0.0;
        }
        self.coeffs[..=top].iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.eval_truncated(z, usize::MAX)
    }

    /// `sum_{n > order} |c_n| r^n` over the stored coefficients.
    pub fn tail_bound(&self, r: f64, order: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(order + 1)
            .map(|(n, c)| c.abs() * r.powi(n as i32))
            .sum()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| n as f64 * c)
            .collect();
        PowerSeries {
            coeffs,
            radius: self.radius,
        }
    }

    /// Cauchy product truncated to `SERIES_LEN` terms.
    pub fn mul(&self, other: &PowerSeries) -> Self {
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1).min(SERIES_LEN);
        let mut coeffs = vec![0.0; len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < len {
                    coeffs[i + j] += a * b;
                }
            }
        }
        PowerSeries {
            coeffs,
            radius: self.radius.min(other.radius),
        }
    }

    pub fn add(&self, other: &PowerSeries) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        PowerSeries {
            coeffs: (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect(),
            radius: self.radius.min(other.radius),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            radius: self.radius,
        }
    }

    pub fn with_constant(&self, c0: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        coeffs[0] = c0;
        PowerSeries {
            coeffs,
            radius: self.radius,
        }
    }

    /// `z -> F(s z)`; the radius scales by `1 / |s|`.
    pub fn rescaled_argument(&self, s: f64) -> Self {
        PowerSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * s.powi(n as i32))
                .collect(),
            radius: self.radius / s.abs(),
        }
    }
}

/// Pointwise composition `F(a)` and the size of the dropped tail.
#[derive(Clone, Debug)]
pub struct Composition {
    pub field: SpectralField,
    /// `sum_{n > M} |c_n| sup|a|^n`.
    pub tail_bound: f64,
    pub sup: f64,
}

/// Evaluates a truncated series on physical samples after the radius check.
pub fn compose_samples(series: &PowerSeries, samples: &[f64], order: usize) -> Result<(Vec<f64>, f64)> {
    let sup = samples.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if !(sup < series.radius()) {
        return Err(Error::OutsideAnalyticity {
            sup,
            radius: series.radius(),
        });
    }
    let values = samples.iter().map(|&z| series.eval_truncated(z, order)).collect();
    Ok((values, sup))
}

/// `F(a)` for `F(0) = 0`, evaluated on the product grid of `engine`.
pub fn compose_analytic(
    engine: &ProductEngine,
    series: &PowerSeries,
    a: &SpectralField,
    order: usize,
) -> Result<Composition> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!("truncation order {order} must be >= 2")));
    }
    if series.coeff(0) != 0.0 {
        return Err(Error::InvalidParameter("composition needs F(0) = 0".into()));
    }
    let samples = engine.to_physical(a);
    let (values, sup) = compose_samples(series, &samples, order)?;
    Ok(Composition {
        field: engine.from_physical(&values),
        tail_bound: series.tail_bound(sup, order),
        sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{inverse, partial, random_radial_field, Grid, PhysicalField};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn identity_series() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let e = ProductEngine::padded(&g);
        let a = random_radial_field(&g, 2, |r| 0.1 * (-r).exp());
        let out = compose_analytic(&e, &PowerSeries::polynomial(vec![0.0, 1.0]), &a, 12).unwrap();
        assert!(out.field.relative_distance(&a) < 1e-14);
        assert_eq!(out.tail_bound, 0.0);
    }

    #[test]
    fn i_of_constant() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let e = ProductEngine::padded(&g);
        let mut a = SpectralField::zeros(&g);
        a.set_mean(Complex64::new(0.1, 0.0));
        let exact = 0.1 / 1.1;
        let deep = compose_analytic(&e, &PowerSeries::z_over_one_plus_z(), &a, 40).unwrap();
        assert!((deep.field.mean().re - exact).abs() < 1e-15);
        let out = compose_analytic(&e, &PowerSeries::z_over_one_plus_z(), &a, DEFAULT_TRUNCATION).unwrap();
        let err = (out.field.mean().re - exact).abs();
        assert!(err <= out.tail_bound && out.tail_bound < 1.2e-13);
    }

    #[test]
    fn pressure_square_gives_minus_one() {
        // J = 1 - P'(1 + a) / (1 + a) with P(rho) = rho^2, i.e. P(1 + a) = 1 + 2a + a^2.
        let p = PowerSeries::polynomial(vec![1.0, 2.0, 1.0]);
        let ratio = p.derivative().mul(&PowerSeries::reciprocal_one_plus_z());
        let j = PowerSeries::polynomial(vec![1.0]).add(&ratio.scaled(-1.0));
        assert_eq!(j.coeff(0), -1.0);
        assert!(j.coeffs()[1..].iter().all(|c| c.abs() < 1e-15));
        assert_eq!(j.eval(0.0), -1.0);
    }

    #[test]
    fn radius_is_enforced() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let e = ProductEngine::padded(&g);
        let a = PhysicalField::from_fn(&g, |x| 1.5 * x[0].cos());
        let a = crate::spectral::forward(&a);
        assert!(matches!(
            compose_analytic(&e, &PowerSeries::z_over_one_plus_z(), &a, 12),
            Err(Error::OutsideAnalyticity { .. })
        ));
        assert!(compose_analytic(&e, &PowerSeries::polynomial(vec![0.0, 1.0]), &a, 1).is_err());
        assert!(compose_analytic(&e, &PowerSeries::polynomial(vec![1.0, 1.0]), &a, 4).is_err());
    }

    #[test]
    fn chain_rule() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let e = ProductEngine::padded(&g);
        let a = random_radial_field(&g, 8, |r| 0.05 * (-r * r / 2.0).exp());
        let f = PowerSeries::z_over_one_plus_z();
        let fa = compose_analytic(&e, &f, &a, 30).unwrap().field;
        let df = f.derivative();
        let a_phys = inverse(&a);
        for axis in 0..2 {
            let lhs = inverse(&partial(&fa, axis));
            let da = inverse(&partial(&a, axis));
            let err = lhs
                .values()
                .iter()
                .zip(a_phys.values())
                .zip(da.values())
                .map(|((l, z), d)| (l - df.eval(*z) * d).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-6, "axis {axis}: {err}");
        }
    }
}
