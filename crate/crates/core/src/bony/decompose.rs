use serde::Serialize;

use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicPartition;
use crate::spectral::{inverse, lp_norm, ProductEngine, SpectralField};

/// Paraproducts and remainder of a product.
#[derive(Clone, Debug)]
pub struct BonyParts {
    pub t_fg: SpectralField,
    pub t_gf: SpectralField,
    pub r_fg: SpectralField,
    /// `|fg - T_f g - T_g f - R(f, g)|_{L^2}`.
    pub residual: f64,
    /// Residual divided by `|f|_{L^2} |g|_{L^inf}`.
    pub relative_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BonyPiece {
    ParaproductFG,
    ParaproductGF,
    Remainder,
}

/// Mean-free paraproduct `T_f g = sum_j S_{j-1} f Delta_j g`.
fn paraproduct(engine: &ProductEngine, part: &DyadicPartition, f: &SpectralField, g: &SpectralField) -> SpectralField {
    let mut out = SpectralField::zeros(engine.grid());
    // S_{j-1} f is the running sum of Delta_{j'} f for j' <= j - 2.
    let mut low = SpectralField::zeros(engine.grid());
    for j in part.indices() {
        low.add_assign(&part.block(f, j - 2));
        let gj = part.block(g, j);
        if low.max_abs() > 0.0 && gj.max_abs() > 0.0 {
            out.add_assign(&engine.multiply(&low, &gj));
        }
    }
    out
}

/// Mean-free remainder `R(f, g) = sum_j Delta_j f (Delta_{j-1} + Delta_j + Delta_{j+1}) g`.
fn remainder(engine: &ProductEngine, part: &DyadicPartition, f: &SpectralField, g: &SpectralField) -> SpectralField {
    let mut out = SpectralField::zeros(engine.grid());
    for j in part.indices() {
        let fj = part.block(f, j);
        if fj.max_abs() == 0.0 {
            continue;
        }
        let mut near = part.block(g, j);
        for jj in [j - 1, j + 1] {
            near.add_assign(&part.block(g, jj));
        }
        if near.max_abs() > 0.0 {
            out.add_assign(&engine.multiply(&fj, &near));
        }
    }
    out
}

/// One piece of the decomposition without forming the others.
///
/// Means enter through bilinearity: with `f = c_f + f'` and `g = c_g + g'`,
/// `T_f g = c_f g + T_{f'} g'`, `T_g f = c_g f' + T_{g'} f'` and `R(f, g) = R(f', g')`.
pub fn bony_piece(
    engine: &ProductEngine,
    part: &DyadicPartition,
    f: &SpectralField,
    g: &SpectralField,
    piece: BonyPiece,
) -> Result<SpectralField> {
    check(engine, part, f, g)?;
    let (f0, g0) = (f.without_mean(), g.without_mean());
    let (fp, gp) = (engine.project(&f0), engine.project(&g0));
    Ok(match piece {
        BonyPiece::ParaproductFG => {
            let mut t = paraproduct(engine, part, &fp, &gp);
            t.add_assign(&engine.project(g).scaled_complex(f.mean()));
            t
        }
        BonyPiece::ParaproductGF => {
            let mut t = paraproduct(engine, part, &gp, &fp);
            t.add_assign(&fp.scaled_complex(g.mean()));
            t
        }
        BonyPiece::Remainder => remainder(engine, part, &fp, &gp),
    })
}

fn check(engine: &ProductEngine, part: &DyadicPartition, f: &SpectralField, g: &SpectralField) -> Result<()> {
    if !engine.is_padded() {
        return Err(Error::Unpadded);
    }
    f.check_grid(g)?;
    if f.grid() != engine.grid() || part.grid() != engine.grid() {
        return Err(Error::GridMismatch("engine, partition and fields must share a grid".into()));
    }
    Ok(())
}

/// `fg = T_f g + T_g f + R(f, g)` with the identity residual.
pub fn bony_decompose(
    engine: &ProductEngine,
    part: &DyadicPartition,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<BonyParts> {
    let t_fg = bony_piece(engine, part, f, g, BonyPiece::ParaproductFG)?;
    let t_gf = bony_piece(engine, part, f, g, BonyPiece::ParaproductGF)?;
    let r_fg = bony_piece(engine, part, f, g, BonyPiece::Remainder)?;
    let mut rest = engine.multiply(&engine.project(f), &engine.project(g));
    for piece in [&t_fg, &t_gf, &r_fg] {
        rest = rest.sub(piece);
    }
    let residual = rest.l2_norm();
    let scale = f.l2_norm() * lp_norm(&inverse(g), f64::INFINITY)?;
    Ok(BonyParts {
        t_fg,
        t_gf,
        r_fg,
        residual,
        relative_residual: if scale > 0.0 { residual / scale } else { residual },
    })
}
