use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{forward_complex_in_place, SpectralField};
use super::grid::Grid;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Padding {
    /// Products evaluated on the base grid; quadratic terms alias.
    None,
    /// Products evaluated on a `3N/2` grid, exact for quadratic terms.
    ThreeHalves,
}

/// Pseudospectral products with optional zero padding.
///
/// Results are truncated back to the base lattice and their Nyquist modes
/// are zeroed, so every product is a real field with a symmetric spectrum.
#[derive(Clone, Debug)]
pub struct ProductEngine {
    grid: Grid,
    padded: Grid,
    map: Vec<usize>,
    padding: Padding,
}

impl ProductEngine {
    pub fn new(grid: &Grid, padding: Padding) -> Result<Self> {
        let padded = match padding {
            Padding::None => grid.clone(),
            Padding::ThreeHalves => Grid::build(grid.dim(), 3 * grid.n() / 2, grid.length())?,
        };
        let map = (0..grid.len())
            .map(|p| {
                padded
                    .index_of(grid.lattice_index(p))
                    .expect("base lattice embeds in the padded lattice")
            })
            .collect();
        Ok(ProductEngine {
            grid: grid.clone(),
            padded,
            map,
            padding,
        })
    }

    pub fn padded(grid: &Grid) -> Self {
        Self::new(grid, Padding::ThreeHalves).expect("valid base grid")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn padded_grid(&self) -> &Grid {
        &self.padded
    }

    pub fn is_padded(&self) -> bool {
        self.padding == Padding::ThreeHalves
    }

    /// Samples of `f` on the product grid.
    pub fn to_physical(&self, f: &SpectralField) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.padded.len()];
        for (p, c) in f.coeffs().iter().enumerate() {
            buf[self.map[p]] = *c;
        }
        self.padded.fft(&mut buf, true);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Spectrum of product-grid samples, truncated to the base lattice.
    pub fn from_physical(&self, values: &[f64]) -> SpectralField {
        let mut buf: Vec<Complex64> = values.par_iter().map(|&v| Complex64::new(v, 0.0)).collect();
        forward_complex_in_place(&self.padded, &mut buf);
        let g = &self.grid;
        SpectralField::from_fn(g, |p| {
            if g.is_nyquist(p) {
                Complex64::new(0.0, 0.0)
            } else {
                buf[self.map[p]]
            }
        })
    }

    pub fn multiply(&self, f: &SpectralField, g: &SpectralField) -> SpectralField {
        let x = self.to_physical(f);
        let y = self.to_physical(g);
        let prod: Vec<f64> = x.par_iter().zip(y.par_iter()).map(|(a, b)| a * b).collect();
        self.from_physical(&prod)
    }

    /// Drops content the engine cannot represent (Nyquist rows).
    pub fn project(&self, f: &SpectralField) -> SpectralField {
        let g = &self.grid;
        f.map(|p, c| if g.is_nyquist(p) { Complex64::new(0.0, 0.0) } else { c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::{forward, PhysicalField};
    use std::f64::consts::PI;

    #[test]
    fn padded_product_is_exact_for_band_limited_inputs() {
        let g = Grid::new(1, 16, 2.0 * PI).unwrap();
        let e = ProductEngine::padded(&g);
        let f = forward(&PhysicalField::from_fn(&g, |x| (7.0 * x[0]).cos()));
        let h = forward(&PhysicalField::from_fn(&g, |x| (6.0 * x[0]).sin()));
        let prod = e.multiply(&f, &h);
        // cos 7x sin 6x = (sin 13x - sin x) / 2; mode 13 is off the lattice.
        let expect = forward(&PhysicalField::from_fn(&g, |x| -0.5 * x[0].sin()));
        assert!(prod.sub(&expect).l2_norm() < 1e-14);
    }

    #[test]
    fn unpadded_product_aliases() {
        let g = Grid::new(1, 16, 2.0 * PI).unwrap();
        let e = ProductEngine::new(&g, Padding::None).unwrap();
        let f = forward(&PhysicalField::from_fn(&g, |x| (7.0 * x[0]).cos()));
        let h = forward(&PhysicalField::from_fn(&g, |x| (6.0 * x[0]).sin()));
        let expect = forward(&PhysicalField::from_fn(&g, |x| -0.5 * x[0].sin()));
        assert!(e.multiply(&f, &h).sub(&expect).l2_norm() > 0.1);
    }
}
