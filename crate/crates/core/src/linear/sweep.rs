use rayon::prelude::*;
use serde::Serialize;

use super::mode::{envelope_ratio, eigenvalues};
use super::params::LinearParams;
use crate::error::Result;

/// One `(xi, capillarity)` sample of the mode sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub xi: f64,
    pub capillarity: f64,
    /// Worst envelope ratio over the sampled times; at most 1 when the bound holds.
    pub envelope_ratio: f64,
    pub lambda_plus_re: f64,
    pub lambda_plus_im: f64,
    pub lambda_minus_re: f64,
    pub lambda_minus_im: f64,
}

pub fn mode_sweep(capillarities: &[f64], xis: &[f64], times: &[f64], shear: f64) -> Result<Vec<SweepRow>> {
    let pairs: Vec<(f64, f64)> = capillarities
        .iter()
        .flat_map(|&k| xis.iter().map(move |&x| (k, x)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(k, xi)| {
            let p = LinearParams::new(k, shear)?;
            let mut worst: f64 = 0.0;
            for &t in times {
                worst = worst.max(envelope_ratio(xi, t, &p)?);
            }
            let (lp, lm) = eigenvalues(xi, k);
            Ok(SweepRow {
                xi,
                capillarity: k,
                envelope_ratio: worst,
                lambda_plus_re: lp.re,
                lambda_plus_im: lp.im,
                lambda_minus_re: lm.re,
                lambda_minus_im: lm.im,
            })
        })
        .collect()
}
