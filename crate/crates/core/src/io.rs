//! Compact binary matrix dumps.
//!
//! Layout: `rows: u64 LE`, `cols: u64 LE`, then row-major `f64 LE` values;
//! complex matrices interleave real and imaginary parts.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::C64;

pub fn write_complex_matrix<W: Write>(m: &DMatrix<C64>, mut out: W) -> Result<()> {
    out.write_all(&(m.nrows() as u64).to_le_bytes())?;
    out.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.write_all(&m[(r, c)].re.to_le_bytes())?;
            out.write_all(&m[(r, c)].im.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_complex_matrix<R: Read>(mut input: R) -> Result<DMatrix<C64>> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<[u8; 8]> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let rows = u64::from_le_bytes(next(&mut input)?) as usize;
    let cols = u64::from_le_bytes(next(&mut input)?) as usize;
    if rows.checked_mul(cols).is_none_or(|n| n > crate::frames::MATRIX_ENTRY_LIMIT) {
        return Err(Error::Capacity { what: "binary matrix entries", size: rows.saturating_mul(cols), limit: crate::frames::MATRIX_ENTRY_LIMIT });
    }
    let mut m = DMatrix::from_element(rows, cols, C64::new(0.0, 0.0));
    for r in 0..rows {
        for c in 0..cols {
            let re = f64::from_le_bytes(next(&mut input)?);
            let im = f64::from_le_bytes(next(&mut input)?);
            m[(r, c)] = C64::new(re, im);
        }
    }
    Ok(m)
}
