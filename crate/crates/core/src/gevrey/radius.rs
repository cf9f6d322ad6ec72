use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Usable amplitudes relative to the peak shell.
pub const RADIUS_FLOOR: f64 = 1e-13;
pub const RADIUS_CEILING: f64 = 1e-2;
pub const MIN_SHELLS: usize = 4;

/// Analyticity radius read off the exponential tail of a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GevreyFit {
    pub radius: f64,
    /// `|xi|_1` range of the shells used.
    pub window: (f64, f64),
    /// RMS of the log-amplitude fit.
    pub residual: f64,
    pub shells: usize,
}

/// Largest `|c(xi)|` on each `|xi|_1` level set, indexed by `|k|_1`.
pub fn shell_maxima(f: &SpectralField) -> Vec<f64> {
    let g = f.grid();
    let unit = g.xi_unit();
    let count = g.max_norm1() / unit;
    let mut out = vec![0.0f64; count.round() as usize + 1];
    for (p, c) in f.coeffs().iter().enumerate() {
        let s = (g.norms1()[p] / unit).round() as usize;
        out[s] = out[s].max(c.norm());
    }
    out
}

/// Least-squares slope of `log(shell max)` against `|xi|_1`; the radius is
/// minus the slope, clamped at 0.
///
/// Shells past the peak with amplitude in `[1e-13, 1e-2] * peak` are used.
/// When no shell drops below the upper cut (a flat spectrum), every shell
/// past the peak is used instead.
pub fn estimate_radius(f: &SpectralField) -> Result<GevreyFit> {
    let unit = f.grid().xi_unit();
    let maxima = shell_maxima(f);
    let (peak_shell, peak) = maxima
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, 0.0f64), |best, (s, &m)| if m > best.1 { (s, m) } else { best });
    if peak == 0.0 {
        return Err(Error::UnresolvedRadius(0));
    }
    let tail: Vec<(f64, f64)> = maxima
        .iter()
        .enumerate()
        .skip(peak_shell)
        .filter(|(_, &m)| m >= RADIUS_FLOOR * peak)
        .map(|(s, &m)| (s as f64 * unit, m))
        .collect();
    let windowed: Vec<(f64, f64)> = tail
        .iter()
        .copied()
        .filter(|&(_, m)| m <= RADIUS_CEILING * peak)
        .collect();
    let flat = tail.iter().all(|&(_, m)| m > RADIUS_CEILING * peak);
    let used = if flat { tail } else { windowed };
    if used.len() < MIN_SHELLS {
        return Err(Error::UnresolvedRadius(used.len()));
    }
    let pts: Vec<(f64, f64)> = used.iter().map(|&(x, m)| (x, m.ln())).collect();
    let (slope, _, rms) = linear_fit(&pts);
    Ok(GevreyFit {
        radius: (-slope).max(0.0),
        window: (pts[0].0, pts[pts.len() - 1].0),
        residual: rms,
        shells: pts.len(),
    })
}

/// Ordinary least squares `y = slope x + intercept`, with the RMS residual.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let rms = (pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{apply_multiplier, symbols, Grid, ZeroMode};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn exponential_tail() {
        for d in [1, 2] {
            let g = Grid::new(d, 64, 2.0 * PI).unwrap();
            let f = SpectralField::from_fn(&g, |p| {
                if p == 0 || g.is_nyquist(p) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((-2.0 * g.norms1()[p]).exp(), 0.0)
                }
            });
            let fit = estimate_radius(&f).unwrap();
            assert!((fit.radius - 2.0).abs() < 0.05, "d {d}: {fit:?}");
            assert!(fit.shells >= MIN_SHELLS);
        }
    }

    #[test]
    fn white_noise_has_no_radius() {
        let g = Grid::new(1, 128, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let half: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(0.5..1.0)).collect();
        let f = SpectralField::from_fn(&g, |p| {
            if p == 0 || g.is_nyquist(p) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(half[p.min(g.negated(p))], 0.0)
            }
        });
        let fit = estimate_radius(&f).unwrap();
        assert!(fit.radius < 0.01, "{fit:?}");
    }

    #[test]
    fn zero_field_is_unresolved() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        assert_eq!(estimate_radius(&SpectralField::zeros(&g)), Err(Error::UnresolvedRadius(0)));
    }

    #[test]
    fn heat_flow_grows_the_radius() {
        let g = Grid::new(1, 256, 8.0 * PI).unwrap();
        let f0 = SpectralField::from_fn(&g, |p| {
            if p == 0 || g.is_nyquist(p) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((-0.5 * g.norms1()[p]).exp(), 0.0)
            }
        });
        let mut last = 0.0;
        for i in 0..=19 {
            let t = 0.1 + 0.1 * i as f64;
            let f = apply_multiplier(&f0, symbols::heat(Complex64::new(1.0, 0.0), t), ZeroMode::Evaluate).unwrap();
            let r = estimate_radius(&f).unwrap().radius;
            assert!(r > last, "t {t}: {r} after {last}");
            last = r;
        }
    }
}
