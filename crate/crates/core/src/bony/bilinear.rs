use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gevrey::gevrey_weight;
use crate::spectral::{ProductEngine, SpectralField};

/// Largest `delta * max |xi|_1` for which the damp-multiply-amplify route is
/// used; beyond it amplified round-off would swamp the high modes.
pub const PHYSICAL_ROUTE_LIMIT: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BilinearRoute {
    /// Damp both factors, multiply on the padded grid, re-amplify.
    Physical,
    /// Weighted discrete convolution; quadratic cost, stable for any `delta`.
    Convolution,
    /// Physical when `delta * max |xi|_1 <= PHYSICAL_ROUTE_LIMIT`.
    Auto,
}

/// `exp(delta (|xi + eta|_1 - |xi|_1 - |eta|_1))`, never above one.
pub fn bilinear_weight(xi: &[f64], eta: &[f64], delta: f64) -> f64 {
    let gap: f64 = xi
        .iter()
        .zip(eta)
        .map(|(a, b)| (a + b).abs() - a.abs() - b.abs())
        .sum();
    (delta * gap).exp()
}

/// `exp(delta Lambda_1)(exp(-delta Lambda_1) f * exp(-delta Lambda_1) g)`.
///
/// Nyquist content of the inputs is ignored and the output has none.
pub fn gevrey_bilinear(f: &SpectralField, g: &SpectralField, delta: f64) -> Result<SpectralField> {
    let engine = ProductEngine::padded(f.grid());
    gevrey_bilinear_with(&engine, f, g, delta, BilinearRoute::Auto)
}

pub fn gevrey_bilinear_with(
    engine: &ProductEngine,
    f: &SpectralField,
    g: &SpectralField,
    delta: f64,
    route: BilinearRoute,
) -> Result<SpectralField> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("Gevrey radius {delta} must be >= 0")));
    }
    f.check_grid(g)?;
    if f.grid() != engine.grid() {
        return Err(Error::GridMismatch("engine and field grids differ".into()));
    }
    let physical = match route {
        BilinearRoute::Physical => true,
        BilinearRoute::Convolution => false,
        BilinearRoute::Auto => delta * f.grid().max_norm1() <= PHYSICAL_ROUTE_LIMIT,
    };
    if physical {
        if !engine.is_padded() {
            return Err(Error::Unpadded);
        }
        let fd = gevrey_weight(&engine.project(f), -delta)?;
        let gd = gevrey_weight(&engine.project(g), -delta)?;
        gevrey_weight(&engine.multiply(&fd, &gd), delta)
    } else {
        Ok(convolution(f, g, delta))
    }
}

fn active(f: &SpectralField) -> Vec<(usize, Complex64)> {
    let grid = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(p, c)| c.norm() > 0.0 && !grid.is_nyquist(*p))
        .map(|(p, c)| (p, *c))
        .collect()
}

fn convolution(f: &SpectralField, g: &SpectralField, delta: f64) -> SpectralField {
    let grid = f.grid();
    let n = grid.n() as i32;
    let half = n / 2;
    let dim = grid.dim();
    let fa = active(f);
    let gc = g.coeffs();
    SpectralField::from_fn(grid, |z| {
        let mut acc = Complex64::new(0.0, 0.0);
        if grid.is_nyquist(z) {
            return acc;
        }
        let kz = grid.lattice_index(z);
        'pairs: for &(p, c) in &fa {
            let kp = grid.lattice_index(p);
            let mut q = 0usize;
            for axis in 0..dim {
                let k = kz[axis] - kp[axis];
                // Excludes the Nyquist row as well as the outside.
                if k <= -half || k >= half {
                    continue 'pairs;
                }
                q = q * n as usize + k.rem_euclid(n) as usize;
            }
            let gq = gc[q];
            if gq.norm() == 0.0 {
                continue;
            }
            let gap = grid.norms1()[z] - grid.norms1()[p] - grid.norms1()[q];
            acc += c * gq * (delta * gap).exp();
        }
        acc
    })
}
