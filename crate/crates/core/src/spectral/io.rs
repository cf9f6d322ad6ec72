//! Snapshot container and CSV export.
//!
//! Binary layout, all little-endian: magic `NSKF`, `u32` version, `u32` d,
//! `u32` N, `f64` L, `u32` component count, then for each component `N^d`
//! pairs of `f64` (re, im) in lattice storage order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"NSKF";
const VERSION: u32 = 1;
/// CSV export is meant for inspection; larger grids should use the binary container.
pub const CSV_MAX_POINTS: usize = 1 << 16;

pub fn write_snapshot(w: &mut impl Write, fields: &[SpectralField]) -> Result<()> {
    let grid = fields
        .first()
        .ok_or_else(|| Error::Snapshot("no components".into()))?
        .grid()
        .clone();
    for f in fields {
        fields[0].check_grid(f)?;
    }
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    w.write_all(&(fields.len() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(grid.len() * 16);
    for f in fields {
        buf.clear();
        for c in f.coeffs() {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshot(r: &mut impl Read) -> Result<Vec<SpectralField>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let d = read_u32(r)? as usize;
    let n = read_u32(r)? as usize;
    let l = read_f64(r)?;
    let count = read_u32(r)? as usize;
    let grid = Grid::new(d, n, l).map_err(|e| Error::Snapshot(e.to_string()))?;
    let mut out = Vec::with_capacity(count);
    let mut raw = vec![0u8; grid.len() * 16];
    for _ in 0..count {
        r.read_exact(&mut raw)?;
        let coeffs = raw
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        out.push(SpectralField::from_coeffs(&grid, coeffs)?);
    }
    Ok(out)
}

/// One row per (component, lattice point): `component,k1[,k2[,k3]],re,im`.
pub fn write_csv(w: &mut impl Write, fields: &[SpectralField]) -> Result<()> {
    let grid = fields
        .first()
        .ok_or_else(|| Error::Snapshot("no components".into()))?
        .grid()
        .clone();
    if grid.len() > CSV_MAX_POINTS {
        return Err(Error::Snapshot(format!(
            "{} points exceed the CSV limit of {CSV_MAX_POINTS}",
            grid.len()
        )));
    }
    let axes: Vec<String> = (1..=grid.dim()).map(|i| format!("k{i}")).collect();
    writeln!(w, "component,{},re,im", axes.join(","))?;
    for (ci, f) in fields.iter().enumerate() {
        fields[0].check_grid(f)?;
        for (p, c) in f.coeffs().iter().enumerate() {
            let ks: Vec<String> = grid.lattice_index(p).iter().map(|k| k.to_string()).collect();
            writeln!(w, "{ci},{},{:e},{:e}", ks.join(","), c.re, c.im)?;
        }
    }
    Ok(())
}
