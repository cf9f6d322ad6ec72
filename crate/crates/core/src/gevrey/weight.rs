use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Largest exponent an amplifying weight may reach on a nonzero mode.
pub const GAIN_CAP: f64 = 30.0;

/// `c(xi) <- exp(delta |xi|_1) c(xi)`.
///
/// Damping (`delta <= 0`) is always allowed. Amplification fails on the
/// first nonzero mode whose gain exceeds `exp(GAIN_CAP)`.
pub fn gevrey_weight(f: &SpectralField, delta: f64) -> Result<SpectralField> {
    if !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("Gevrey exponent {delta}")));
    }
    let g = f.grid();
    if delta > 0.0 {
        let zero = Complex64::new(0.0, 0.0);
        let worst = (0..g.len())
            .filter(|&p| f.coeffs()[p] != zero)
            .map(|p| g.norms1()[p])
            .fold(0.0, f64::max);
        if delta * worst > GAIN_CAP {
            return Err(Error::GevreyOverflow {
                shell: worst,
                exponent: delta * worst,
                cap: GAIN_CAP,
            });
        }
    }
    Ok(f.map(|p, c| c * (delta * g.norms1()[p]).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::{besov_norm, build_partition, BesovSpec};
    use crate::spectral::{random_radial_field, Grid};
    use std::f64::consts::PI;

    #[test]
    fn zero_and_inverse() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let f = random_radial_field(&g, 4, |r| (-r).exp());
        assert_eq!(gevrey_weight(&f, 0.0).unwrap(), f);
        let back = gevrey_weight(&gevrey_weight(&f, 0.7).unwrap(), -0.7).unwrap();
        assert!(back.relative_distance(&f) < 1e-12);
    }

    #[test]
    fn damping_lowers_besov_norm() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let part = build_partition(&g).unwrap();
        let f = random_radial_field(&g, 9, |r| (-r * r / 8.0).exp());
        let spec = BesovSpec::new(0.0, 2.0, 1.0).unwrap();
        let before = besov_norm(&f, &spec, &part).unwrap().value;
        let after = besov_norm(&gevrey_weight(&f, -1.0).unwrap(), &spec, &part).unwrap().value;
        assert!(after < before);
    }

    #[test]
    fn overflow_names_the_shell() {
        let g = Grid::new(1, 64, 2.0 * PI).unwrap();
        let f = random_radial_field(&g, 1, |_| 1.0);
        match gevrey_weight(&f, 1.0) {
            Err(Error::GevreyOverflow { shell, .. }) => assert_eq!(shell, 31.0),
            other => panic!("expected overflow, got {other:?}"),
        }
        assert!(gevrey_weight(&f, -5.0).is_ok());
    }
}
