//! 2D discrete Fourier engine, frequency-coordinate mapping, DFT-based
//! non-integer shifts, and closed-form spectra (PSF, parallelogram window).

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{BrtError, Result};
use crate::filter::FilterSpec;
use crate::geometry::{det2, require_distinct, Direction, Vec2};
use crate::grid::{Field2D, Grid2D};

/// Dense row-major matrix of reals, used for shift batches and extension
/// quadrants.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Complex frequency-domain field tied to the spatial lattice it derives
/// from. DC sits at index (0, 0); indices above N/2 alias to negative
/// frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub grid: Grid2D,
    coeffs: Vec<Complex64>,
}

impl Spectrum2D {
    pub fn from_coeffs(grid: Grid2D, coeffs: Vec<Complex64>) -> Result<Spectrum2D> {
        if coeffs.len() != grid.len() {
            return Err(BrtError::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Spectrum2D { grid, coeffs })
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.coeffs[n * self.grid.nt + m]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Signed physical frequencies `(w_t, w_y)` of bin `(n, m)`.
    pub fn freq_at(&self, n: usize, m: usize) -> Result<(f64, f64)> {
        if n >= self.grid.ny || m >= self.grid.nt {
            return Err(BrtError::IndexOutOfRange {
                n,
                m,
                ny: self.grid.ny,
                nt: self.grid.nt,
            });
        }
        Ok((
            signed_freq(m, self.grid.nt, self.grid.dt),
            signed_freq(n, self.grid.ny, self.grid.dy),
        ))
    }
}

/// Signed frequency of bin `k` on an `n`-point axis with spacing `delta`:
/// `k/(n delta)` up to the Nyquist bin, negative beyond.
pub fn signed_freq(k: usize, n: usize, delta: f64) -> f64 {
    let k = k as isize;
    let n = n as isize;
    let signed = if k < (n + 1) / 2 { k } else { k - n };
    signed as f64 / (n as f64 * delta)
}

fn fft_axis(buf: &mut [Complex64], cols: usize, forward: bool) {
    let mut planner = FftPlanner::new();
    let fft = if forward {
        planner.plan_fft_forward(cols)
    } else {
        planner.plan_fft_inverse(cols)
    };
    buf.par_chunks_mut(cols).for_each(|row| {
        fft.process(row);
    });
}

fn transpose(buf: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); buf.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = buf[r * cols + c];
        }
    }
    out
}

/// In-place 2D FFT over a row-major `ny x nt` buffer. Unnormalized in both
/// directions; callers apply the `1/(nt ny)` inverse scaling.
fn fft2(buf: &mut Vec<Complex64>, ny: usize, nt: usize, forward: bool) {
    fft_axis(buf, nt, forward);
    let mut t = transpose(buf, ny, nt);
    fft_axis(&mut t, ny, forward);
    *buf = transpose(&t, nt, ny);
}

/// Unnormalized forward 2D DFT of a real field.
pub fn dft2(field: &Field2D) -> Spectrum2D {
    let g = field.grid;
    let mut buf: Vec<Complex64> = field
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft2(&mut buf, g.ny, g.nt, true);
    Spectrum2D { grid: g, coeffs: buf }
}

/// Inverse 2D DFT normalized by `1/(nt ny)`; returns the real part.
pub fn idft2(spec: &Spectrum2D) -> Field2D {
    let g = spec.grid;
    let mut buf = spec.coeffs.clone();
    fft2(&mut buf, g.ny, g.nt, false);
    let scale = 1.0 / (g.nt as f64 * g.ny as f64);
    Field2D::from_values(g, buf.iter().map(|c| c.re * scale).collect())
        .expect("matching dimensions")
}

/// Elementwise product of a spectrum with a coefficient matrix.
pub fn spectrum_product(spec: &Spectrum2D, k: &[Complex64]) -> Result<Spectrum2D> {
    if k.len() != spec.coeffs.len() {
        return Err(BrtError::GridMismatch(format!(
            "coefficient matrix has {} entries, spectrum {}",
            k.len(),
            spec.coeffs.len()
        )));
    }
    let coeffs = spec
        .coeffs
        .iter()
        .zip(k.iter())
        .map(|(a, b)| a * b)
        .collect();
    Ok(Spectrum2D { grid: spec.grid, coeffs })
}

/// Phase factor for shifting a length-`n` signal by `s` samples, applied to
/// bin `k`. Frequencies alias symmetrically and the Nyquist bin takes the
/// real average `cos(pi s)` so that real signals stay real.
fn shift_phase(k: usize, n: usize, s: f64) -> Complex64 {
    if n % 2 == 0 && k == n / 2 {
        return Complex64::new((std::f64::consts::PI * s).cos(), 0.0);
    }
    let ki = k as isize;
    let ni = n as isize;
    let signed = if ki < (ni + 1) / 2 { ki } else { ki - ni } as f64;
    let ang = -2.0 * std::f64::consts::PI * s * signed / n as f64;
    Complex64::new(ang.cos(), ang.sin())
}

/// DFT-based non-integer shift of one sampled signal against a batch of
/// shifts (in samples). The signal is concatenated with `pad` zeros and the
/// `fill` samples, transformed once, multiplied by the per-shift phasor, and
/// inverse transformed. Returns the full-length shifted copies, one column
/// per requested shift.
pub fn non_int_shift(x: &[f64], shifts: &[f64], pad: usize, fill: &[f64]) -> Mat {
    let n = x.len() + pad + fill.len();
    let mut base: Vec<Complex64> = Vec::with_capacity(n);
    base.extend(x.iter().map(|&v| Complex64::new(v, 0.0)));
    base.extend(std::iter::repeat(Complex64::default()).take(pad));
    base.extend(fill.iter().map(|&v| Complex64::new(v, 0.0)));

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    fwd.process(&mut base);

    let mut out = Mat::zeros(n, shifts.len());
    let cols: Vec<Vec<f64>> = shifts
        .par_iter()
        .map(|&s| {
            let mut work: Vec<Complex64> = base
                .iter()
                .enumerate()
                .map(|(k, y)| y * shift_phase(k, n, s))
                .collect();
            inv.process(&mut work);
            let scale = 1.0 / n as f64;
            work.iter().map(|c| c.re * scale).collect()
        })
        .collect();
    for (k, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            out.set(r, k, v);
        }
    }
    out
}

/// Shifts every row of a row-major buffer by `s` samples with `pad`
/// trailing zeros, returning the original length. Errors if the imaginary
/// residue of any row exceeds `1e-8` of the signal scale.
fn shift_rows_by(
    buf: &[f64],
    rows: usize,
    cols: usize,
    s: f64,
    pad: usize,
) -> Result<Vec<f64>> {
    let n = cols + pad;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let phase: Vec<Complex64> = (0..n).map(|k| shift_phase(k, n, s)).collect();
    let scale_ref = buf.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);

    let results: Vec<Result<Vec<f64>>> = buf
        .par_chunks(cols)
        .map(|row| {
            let mut work: Vec<Complex64> = Vec::with_capacity(n);
            work.extend(row.iter().map(|&v| Complex64::new(v, 0.0)));
            work.extend(std::iter::repeat(Complex64::default()).take(pad));
            fwd.process(&mut work);
            for (w, p) in work.iter_mut().zip(phase.iter()) {
                *w *= p;
            }
            inv.process(&mut work);
            let scale = 1.0 / n as f64;
            let mut residue = 0.0f64;
            let out: Vec<f64> = work[..cols]
                .iter()
                .map(|c| {
                    residue = residue.max(c.im.abs() * scale);
                    c.re * scale
                })
                .collect();
            if residue > 1e-8 * scale_ref {
                return Err(BrtError::ImaginaryResidue { residue: residue / scale_ref });
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::with_capacity(rows * cols);
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Default zero padding for shift operations: bounds wraparound leakage for
/// smooth fields below the shift tolerances used in the tests.
pub fn default_shift_pad(n: usize) -> usize {
    (n / 8).max(16)
}

/// Subsample translation of a field by `delta` (physical units): the output
/// satisfies `out(x) = in(x - delta)` up to interpolation. Realized by
/// separable per-axis DFT shifts with `pad` trailing zeros per axis.
pub fn shift2d(field: &Field2D, delta: Vec2, pad: usize) -> Result<Field2D> {
    let g = field.grid;
    let s_t = delta.t / g.dt;
    let s_y = delta.y / g.dy;
    // t axis: every row is a signal along columns
    let shifted_t = shift_rows_by(field.values(), g.ny, g.nt, s_t, pad)?;
    // y axis: transpose, shift, transpose back
    let mut tr = vec![0.0; g.len()];
    for n in 0..g.ny {
        for m in 0..g.nt {
            tr[m * g.ny + n] = shifted_t[n * g.nt + m];
        }
    }
    let shifted_y = shift_rows_by(&tr, g.nt, g.ny, s_y, pad)?;
    let mut out = vec![0.0; g.len()];
    for m in 0..g.nt {
        for n in 0..g.ny {
            out[n * g.nt + m] = shifted_y[m * g.ny + n];
        }
    }
    Field2D::from_values(g, out)
}

/// Normalized sinc: `sin(pi x) / (pi x)`, 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Fourier transform of the four-impulse PSF:
/// `-4 sin(pi a_i w.theta_i) sin(pi a_j w.theta_j)`.
pub fn psf_hat(w: Vec2, spec: &FilterSpec) -> f64 {
    let pi = std::f64::consts::PI;
    -4.0 * (pi * spec.a_i * w.dot(spec.theta_i.vec())).sin()
        * (pi * spec.a_j * w.dot(spec.theta_j.vec())).sin()
}

/// Fourier transform of the centered parallelogram indicator with edge
/// lengths `a_i`, `a_j` along `theta_i`, `theta_j`:
/// `a_i a_j |det| sinc(a_j w.theta_j) sinc(a_i w.theta_i)`.
pub fn parallelogram_ft(
    w: Vec2,
    theta_i: &Direction,
    theta_j: &Direction,
    a_i: f64,
    a_j: f64,
) -> Result<f64> {
    require_distinct(theta_i, theta_j)?;
    if !(a_i > 0.0 && a_j > 0.0) {
        return Err(BrtError::InvalidArgument(format!(
            "edge lengths must be positive, got ({a_i}, {a_j})"
        )));
    }
    let det = det2(theta_i.vec(), theta_j.vec()).abs();
    Ok(a_i * a_j * det * sinc(a_j * w.dot(theta_j.vec())) * sinc(a_i * w.dot(theta_i.vec())))
}
