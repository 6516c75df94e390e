//! Grayscale plot export: 16-bit binary PGM with a text sidecar recording
//! the linear scale, so panels rendered with an explicit range share one
//! display scale.

use std::io::Write;
use std::path::Path;

use brt_core::Field2D;

use crate::error::{CliError, Result};

/// Writes `field` as a 16-bit P5 PGM. Values map linearly from
/// `range = (vmin, vmax)` (defaults to the field min/max) onto 0..65535,
/// clamping outside the range. Rows are written top-down in decreasing `y`.
/// A `<path>.txt` sidecar records the mapping.
pub fn export_pgm(field: &Field2D, path: &Path, range: Option<(f64, f64)>) -> Result<()> {
    if field.values().iter().any(|v| !v.is_finite()) {
        return Err(CliError::Parse("field contains non-finite samples".into()));
    }
    let (mut lo, mut hi) = range.unwrap_or_else(|| {
        field.values().iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), &v| (lo.min(v), hi.max(v)),
        )
    });
    if !(hi > lo) {
        hi = lo + 1.0;
        lo -= 1.0;
    }
    let g = field.grid;
    let mut buf = Vec::with_capacity(32 + 2 * g.len());
    write!(&mut buf, "P5\n{} {}\n65535\n", g.nt, g.ny)?;
    for n in (0..g.ny).rev() {
        for m in 0..g.nt {
            let v = ((field.get(n, m) - lo) / (hi - lo)).clamp(0.0, 1.0);
            let q = (v * 65535.0).round() as u16;
            buf.extend_from_slice(&q.to_be_bytes());
        }
    }
    std::fs::write(path, buf)?;

    let sidecar = format!(
        "pgm={}\nvmin={:?}\nvmax={:?}\nnt={}\nny={}\nt0={:?}\ny0={:?}\ndt={:?}\ndy={:?}\nrow_order=top_is_max_y\n",
        path.display(),
        lo,
        hi,
        g.nt,
        g.ny,
        g.t0,
        g.y0,
        g.dt,
        g.dy
    );
    std::fs::write(path.with_extension("pgm.txt"), sidecar)?;
    Ok(())
}

/// Reads the sidecar scale and dequantizes a PGM written by [`export_pgm`];
/// used by the round-trip test.
pub fn read_pgm_values(path: &Path) -> Result<(Vec<f64>, f64, f64)> {
    let sidecar = std::fs::read_to_string(path.with_extension("pgm.txt"))?;
    let mut lo = f64::NAN;
    let mut hi = f64::NAN;
    for line in sidecar.lines() {
        if let Some(v) = line.strip_prefix("vmin=") {
            lo = v.parse().map_err(|_| CliError::Parse("bad vmin".into()))?;
        }
        if let Some(v) = line.strip_prefix("vmax=") {
            hi = v.parse().map_err(|_| CliError::Parse("bad vmax".into()))?;
        }
    }
    let bytes = std::fs::read(path)?;
    let header_end = bytes
        .windows(6)
        .position(|w| w == b"65535\n")
        .ok_or_else(|| CliError::Parse("missing maxval".into()))?
        + 6;
    let values = bytes[header_end..]
        .chunks_exact(2)
        .map(|c| {
            let q = u16::from_be_bytes([c[0], c[1]]) as f64;
            lo + q / 65535.0 * (hi - lo)
        })
        .collect();
    Ok((values, lo, hi))
}
