//! Binary persistence of fields and spectra.
//!
//! Layout (little-endian): magic `BRT1`, version `u16`, kind `u8`
//! (0 = real field, 1 = complex spectrum), `nt: u32`, `ny: u32`,
//! `t0, y0, dt, dy: f64`, then the row-major payload: one `f64` per sample
//! for real fields, interleaved re/im pairs for spectra. Round-trips are
//! bit-exact.

use std::io::{Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use brt_core::{Field2D, Grid2D, Spectrum2D};

use crate::error::{CliError, Result};

const MAGIC: [u8; 4] = *b"BRT1";
const VERSION: u16 = 1;

#[derive(Debug, Clone)]
pub enum StoredField {
    Real(Field2D),
    Complex(Spectrum2D),
}

impl StoredField {
    pub fn grid(&self) -> Grid2D {
        match self {
            StoredField::Real(f) => f.grid,
            StoredField::Complex(s) => s.grid,
        }
    }

    pub fn into_real(self) -> Result<Field2D> {
        match self {
            StoredField::Real(f) => Ok(f),
            StoredField::Complex(_) => Err(CliError::Parse(
                "expected a real field, file holds a complex spectrum".into(),
            )),
        }
    }

    pub fn into_complex(self) -> Result<Spectrum2D> {
        match self {
            StoredField::Complex(s) => Ok(s),
            StoredField::Real(_) => Err(CliError::Parse(
                "expected a complex spectrum, file holds a real field".into(),
            )),
        }
    }
}

fn write_header<W: Write>(w: &mut W, kind: u8, grid: &Grid2D) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[kind])?;
    w.write_all(&(grid.nt as u32).to_le_bytes())?;
    w.write_all(&(grid.ny as u32).to_le_bytes())?;
    for v in [grid.t0, grid.y0, grid.dt, grid.dy] {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_field(path: &Path, field: &Field2D) -> Result<()> {
    let mut buf = Vec::with_capacity(47 + 8 * field.values().len());
    write_header(&mut buf, 0, &field.grid)?;
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn write_spectrum(path: &Path, spec: &Spectrum2D) -> Result<()> {
    let mut buf = Vec::with_capacity(47 + 16 * spec.coeffs().len());
    write_header(&mut buf, 1, &spec.grid)?;
    for c in spec.coeffs() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read(path: &Path) -> Result<StoredField> {
    let mut f = std::fs::File::open(path)?;
    let mut bytes = Vec::new();
    f.read_to_end(&mut bytes)?;
    read_bytes(&bytes)
}

pub fn read_bytes(bytes: &[u8]) -> Result<StoredField> {
    if bytes.len() < 47 {
        return Err(CliError::TruncatedPayload { expected: 47, got: bytes.len() });
    }
    let mut magic = [0u8; 4];
    magic.copy_from_slice(&bytes[0..4]);
    if magic != MAGIC {
        return Err(CliError::BadMagic(magic));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(CliError::UnsupportedVersion(version));
    }
    let kind = bytes[6];
    let nt = u32::from_le_bytes(bytes[7..11].try_into().unwrap()) as usize;
    let ny = u32::from_le_bytes(bytes[11..15].try_into().unwrap()) as usize;
    let mut f64s = [0.0f64; 4];
    for (k, v) in f64s.iter_mut().enumerate() {
        *v = f64::from_le_bytes(bytes[15 + 8 * k..23 + 8 * k].try_into().unwrap());
    }
    let [t0, y0, dt, dy] = f64s;
    let grid = Grid2D::new(t0, y0, dt, dy, nt, ny).map_err(CliError::Core)?;
    let payload = &bytes[47..];
    match kind {
        0 => {
            let expected = nt * ny * 8;
            if payload.len() != expected {
                return Err(CliError::TruncatedPayload {
                    expected: expected + 47,
                    got: bytes.len(),
                });
            }
            let values: Vec<f64> = payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            Ok(StoredField::Real(Field2D::from_values(grid, values)?))
        }
        1 => {
            let expected = nt * ny * 16;
            if payload.len() != expected {
                return Err(CliError::TruncatedPayload {
                    expected: expected + 47,
                    got: bytes.len(),
                });
            }
            let coeffs: Vec<Complex64> = payload
                .chunks_exact(16)
                .map(|c| {
                    Complex64::new(
                        f64::from_le_bytes(c[0..8].try_into().unwrap()),
                        f64::from_le_bytes(c[8..16].try_into().unwrap()),
                    )
                })
                .collect();
            Ok(StoredField::Complex(Spectrum2D::from_coeffs(grid, coeffs)?))
        }
        k => Err(CliError::UnknownKind(k)),
    }
}
