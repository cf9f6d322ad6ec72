use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized linear coefficients: capillarity, shear and bulk viscosity
/// with `2 shear + bulk = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub capillarity: f64,
    pub shear: f64,
    pub bulk: f64,
}

impl LinearParams {
    /// Bulk viscosity is fixed by `2 shear + bulk = 1`.
    pub fn new(capillarity: f64, shear: f64) -> Result<Self> {
        let p = LinearParams {
            capillarity,
            shear,
            bulk: 1.0 - 2.0 * shear,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capillarity > 0.0 && self.capillarity.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "capillarity {} must be positive",
                self.capillarity
            )));
        }
        if !(self.shear > 0.0 && self.shear.is_finite()) {
            return Err(Error::InvalidParameter(format!("shear viscosity {} must be positive", self.shear)));
        }
        let total = 2.0 * self.shear + self.bulk;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "2 shear + bulk = {total}, normalization requires 1"
            )));
        }
        Ok(())
    }

    /// Dissipation rate `min(1, capillarity) / 2` of the mode functional.
    pub fn decay_rate(&self) -> f64 {
        0.5 * self.capillarity.min(1.0)
    }

    /// Envelope constant `max(3/2, capillarity + 1) / min(1/2, capillarity)`.
    pub fn envelope_constant(&self) -> f64 {
        let (lo, hi) = lyapunov_bracket(self.capillarity);
        hi / lo
    }
}

/// Bracket `[lo, hi]` with `lo |X|^2 <= L^2 <= hi |X|^2` at mixing weight 1/2,
/// where `X = (a, |xi| a, v)`.
pub fn lyapunov_bracket(capillarity: f64) -> (f64, f64) {
    (capillarity.min(0.5), (capillarity + 1.0).max(1.5))
}
