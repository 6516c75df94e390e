//! Frequency-domain BRT inversion with Tikhonov regularization, the
//! filtered-image and blurred-image recovery paths, and spectral
//! diagnostics of the system function.

use rustfft::num_complex::Complex64;

use crate::error::{BrtError, Result};
use crate::filter::FilterSpec;
use crate::geometry::Parallelogram;
use crate::grid::{Field2D, Grid2D};
use crate::spectral::{dft2, idft2, shift2d, signed_freq, spectrum_product, Spectrum2D};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// System function of the filtered BRT:
/// `h(w) = -w.(theta_i + theta_j) / (i 2 pi (w.theta_i)(w.theta_j))`,
/// purely imaginary and commutative in the two angles.
pub fn h_hat(w_t: f64, w_y: f64, xi_i: f64, xi_j: f64) -> Result<Complex64> {
    let (ci, si) = (xi_i.cos(), xi_i.sin());
    let (cj, sj) = (xi_j.cos(), xi_j.sin());
    let d = (w_t * ci + w_y * si) * (w_t * cj + w_y * sj);
    if d == 0.0 {
        return Err(BrtError::SingularFrequency(w_t, w_y));
    }
    let num = -(w_t * (ci + cj) + w_y * (si + sj));
    // num / (i 2 pi d) = -i num / (2 pi d)
    Ok(Complex64::new(0.0, -num / (TWO_PI * d)))
}

/// Polar form of the system function:
/// `-cos(phi - (xi_i+xi_j)/2) cos((xi_i-xi_j)/2) / (i pi rho cos(phi-xi_i) cos(phi-xi_j))`.
pub fn h_hat_polar(rho: f64, phi: f64, xi_i: f64, xi_j: f64) -> Result<Complex64> {
    if !(rho > 0.0) {
        return Err(BrtError::InvalidArgument(format!(
            "rho must be positive, got {rho}"
        )));
    }
    let (ca, cb) = ((phi - xi_i).cos(), (phi - xi_j).cos());
    if ca.abs() < 1e-12 || cb.abs() < 1e-12 {
        return Err(BrtError::SingularPolarAngle(phi));
    }
    let num = -(phi - 0.5 * (xi_i + xi_j)).cos() * (0.5 * (xi_i - xi_j)).cos();
    let den = std::f64::consts::PI * rho * ca * cb;
    // num / (i den) = -i num / den
    Ok(Complex64::new(0.0, -num / den))
}

/// Samples of the system function on the signed frequency lattice of a grid,
/// with the exact zero set of the denominator.
#[derive(Debug, Clone)]
pub struct SystemSpectrum {
    pub grid: Grid2D,
    pub h: Vec<Complex64>,
    pub denom_zero: Vec<bool>,
}

/// Evaluates the system matrix at the lattice frequencies
/// `(m/(nt dt), n/(ny dy))` with the aliasing convention of the spectra.
/// Entries with `d(w) = 0` (detected by exact zero in double precision) are
/// stored as 0 and flagged.
pub fn system_spectrum(grid: &Grid2D, xi_i: f64, xi_j: f64) -> SystemSpectrum {
    let (ci, si) = (xi_i.cos(), xi_i.sin());
    let (cj, sj) = (xi_j.cos(), xi_j.sin());
    let mut h = vec![Complex64::default(); grid.len()];
    let mut denom_zero = vec![false; grid.len()];
    for n in 0..grid.ny {
        let w_y = signed_freq(n, grid.ny, grid.dy);
        for m in 0..grid.nt {
            let w_t = signed_freq(m, grid.nt, grid.dt);
            let d = (w_t * ci + w_y * si) * (w_t * cj + w_y * sj);
            let idx = n * grid.nt + m;
            if d == 0.0 {
                denom_zero[idx] = true;
            } else {
                let num = -(w_t * (ci + cj) + w_y * (si + sj));
                h[idx] = Complex64::new(0.0, -num / (TWO_PI * d));
            }
        }
    }
    SystemSpectrum { grid: *grid, h, denom_zero }
}

/// Marks lattice frequencies on (or within `tol` relative distance of) the
/// nullspace line `w.(theta_i + theta_j) = 0`, plus DC.
pub fn nullspace_mask(grid: &Grid2D, xi_i: f64, xi_j: f64, tol: f64) -> Vec<bool> {
    let st = xi_i.cos() + xi_j.cos();
    let sy = xi_i.sin() + xi_j.sin();
    let mut mask = vec![false; grid.len()];
    for n in 0..grid.ny {
        let w_y = signed_freq(n, grid.ny, grid.dy);
        for m in 0..grid.nt {
            let w_t = signed_freq(m, grid.nt, grid.dt);
            let norm = (w_t * w_t + w_y * w_y).sqrt();
            mask[n * grid.nt + m] =
                norm == 0.0 || (w_t * st + w_y * sy).abs() <= tol * norm;
        }
    }
    mask
}

/// Relative tolerance used to supplement the exact-zero denominator test on
/// the nullspace (numerator) line.
pub const NULLSPACE_TOL: f64 = 1e-9;

/// Tikhonov-stabilized elementwise reciprocal of the system matrix:
/// `K = conj(H) / (|H|^2 + eps)` where `d(w) != 0`, zero elsewhere and on
/// the nullspace line.
pub fn compute_k(grid: &Grid2D, xi_i: f64, xi_j: f64, epsilon: f64) -> Result<Vec<Complex64>> {
    if ((xi_i - xi_j) % std::f64::consts::PI).abs() < 1e-12 {
        return Err(BrtError::ParallelDirections((xi_i - xi_j).cos()));
    }
    if epsilon < 0.0 {
        return Err(BrtError::InvalidArgument(format!(
            "smoothing parameter must be non-negative, got {epsilon}"
        )));
    }
    let sys = system_spectrum(grid, xi_i, xi_j);
    let null = nullspace_mask(grid, xi_i, xi_j, NULLSPACE_TOL);
    let mut k = vec![Complex64::default(); grid.len()];
    for idx in 0..grid.len() {
        if sys.denom_zero[idx] || null[idx] {
            continue;
        }
        let h = sys.h[idx];
        let denom = h.norm_sqr() + epsilon;
        if denom == 0.0 {
            continue;
        }
        k[idx] = h.conj() / denom;
    }
    Ok(k)
}

/// Inverts filtered (bounded-support) BRT data in the frequency domain:
/// `Psi = IDFT2( DFT2(G) . K )`.
pub fn brt_invert_filtered(
    g_filtered: &Field2D,
    xi_i: f64,
    xi_j: f64,
    epsilon: f64,
) -> Result<Field2D> {
    let k = compute_k(&g_filtered.grid, xi_i, xi_j, epsilon)?;
    let g_hat = dft2(g_filtered);
    let psi_hat = spectrum_product(&g_hat, &k)?;
    Ok(idft2(&psi_hat))
}

/// Data-space residual `|| G_hat - (G_hat . K) . H ||` of a Tikhonov
/// reconstruction; non-decreasing in the smoothing parameter.
pub fn tikhonov_residual(g_filtered: &Field2D, xi_i: f64, xi_j: f64, epsilon: f64) -> Result<f64> {
    let sys = system_spectrum(&g_filtered.grid, xi_i, xi_j);
    let k = compute_k(&g_filtered.grid, xi_i, xi_j, epsilon)?;
    let g_hat = dft2(g_filtered);
    let mut sum = 0.0;
    for (idx, g) in g_hat.coeffs().iter().enumerate() {
        let r = g - g * k[idx] * sys.h[idx];
        sum += r.norm_sqr();
    }
    Ok(sum.sqrt())
}

/// Reassembles the unfiltered image from the filtered-image estimate using
/// the four non-overlapping signed copies. Requires shifts beyond half the
/// circumscribed-parallelogram edges (`a_i > alpha_i/2`, `a_j > alpha_j/2`)
/// and a support centered at the origin.
pub fn recover_unfiltered(
    psi_m: &Field2D,
    spec: &FilterSpec,
    parallelogram: &Parallelogram,
    pad: usize,
) -> Result<Field2D> {
    let (need_ai, need_aj) = (parallelogram.alpha_i / 2.0, parallelogram.alpha_j / 2.0);
    if !(spec.a_i > need_ai && spec.a_j > need_aj) {
        return Err(BrtError::ShiftTooSmall {
            need_ai,
            need_aj,
            ai: spec.a_i,
            aj: spec.a_j,
        });
    }
    let g = psi_m.grid;
    // Four copies: quadrant (sgn_i, sgn_j) reads
    // psi_m(x + sgn_i a_i/2 theta_i + sgn_j a_j/2 theta_j) with sign
    // sgn_i * sgn_j.
    let quadrants: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)];
    let mut copies = Vec::with_capacity(4);
    for (sgn_i, sgn_j) in quadrants {
        let c = spec.theta_i.vec().scale(sgn_i * spec.a_i / 2.0)
            + spec.theta_j.vec().scale(sgn_j * spec.a_j / 2.0);
        copies.push(shift2d(psi_m, -c, pad)?);
    }
    let mut out = Field2D::zeros(g);
    for n in 0..g.ny {
        for m in 0..g.nt {
            let x = g.point(n, m);
            let (s_i, s_j) = parallelogram.oblique(x);
            let (sgn_i, sgn_j) = (
                if s_i >= 0.0 { 1.0 } else { -1.0 },
                if s_j >= 0.0 { 1.0 } else { -1.0 },
            );
            let which = quadrants
                .iter()
                .position(|&(a, b)| a == sgn_i && b == sgn_j)
                .expect("quadrant table covers all sign pairs");
            out.set(n, m, sgn_i * sgn_j * copies[which].get(n, m));
        }
    }
    Ok(out)
}

/// Recovers the parallelogram-blurred image from filtered data:
/// `mu_p_hat = -G_m_hat / (i 2 pi a_i a_j w.(theta_i + theta_j))`, with the
/// stabilized reciprocal `-conj(D)/(|D|^2 + eps)` and zeros on the nullspace
/// line.
pub fn recover_blurred(g_filtered: &Field2D, spec: &FilterSpec, epsilon: f64) -> Result<Field2D> {
    let g = g_filtered.grid;
    let st = spec.theta_i.vec().t + spec.theta_j.vec().t;
    let sy = spec.theta_i.vec().y + spec.theta_j.vec().y;
    let null = nullspace_mask(
        &g,
        spec.theta_i.xi(),
        spec.theta_j.xi(),
        NULLSPACE_TOL,
    );
    let mut coeff = vec![Complex64::default(); g.len()];
    for n in 0..g.ny {
        let w_y = signed_freq(n, g.ny, g.dy);
        for m in 0..g.nt {
            let w_t = signed_freq(m, g.nt, g.dt);
            let idx = n * g.nt + m;
            if null[idx] {
                continue;
            }
            let d = Complex64::new(0.0, TWO_PI * spec.a_i * spec.a_j * (w_t * st + w_y * sy));
            let denom = d.norm_sqr() + epsilon;
            if denom == 0.0 {
                continue;
            }
            coeff[idx] = -d.conj() / denom;
        }
    }
    let g_hat = dft2(g_filtered);
    let mu_p_hat = spectrum_product(&g_hat, &coeff)?;
    Ok(idft2(&mu_p_hat))
}

/// Projects a spectrum so every row sum and column sum vanishes, which
/// zeroes the image along its first row and first column. Applying it twice
/// equals applying it once.
pub fn enforce_boundary(psi_hat: &Spectrum2D) -> Spectrum2D {
    let g = psi_hat.grid;
    let (ny, nt) = (g.ny, g.nt);
    let mut row_mean = vec![Complex64::default(); ny]; // spectrum of image column 0
    let mut col_mean = vec![Complex64::default(); nt]; // spectrum of image row 0
    let mut total = Complex64::default();
    for n in 0..ny {
        for m in 0..nt {
            let c = psi_hat.get(n, m);
            row_mean[n] += c;
            col_mean[m] += c;
            total += c;
        }
    }
    for v in row_mean.iter_mut() {
        *v /= nt as f64;
    }
    for v in col_mean.iter_mut() {
        *v /= ny as f64;
    }
    total /= (nt * ny) as f64;
    let mut coeffs = Vec::with_capacity(g.len());
    for n in 0..ny {
        for m in 0..nt {
            coeffs.push(psi_hat.get(n, m) - row_mean[n] - col_mean[m] + total);
        }
    }
    Spectrum2D::from_coeffs(g, coeffs).expect("dimensions preserved")
}

/// Spectral realization of the forward-integral reconstruction route: apply
/// both directional derivatives, then integrate along `+(theta_i+theta_j)`.
pub fn derivative_path_forward(
    g_hat: &Spectrum2D,
    xi_i: f64,
    xi_j: f64,
) -> Result<Spectrum2D> {
    derivative_path(g_hat, xi_i, xi_j, true)
}

/// Backward-integral variant: integrate along `-(theta_i+theta_j)` with the
/// compensating sign.
pub fn derivative_path_backward(
    g_hat: &Spectrum2D,
    xi_i: f64,
    xi_j: f64,
) -> Result<Spectrum2D> {
    derivative_path(g_hat, xi_i, xi_j, false)
}

fn derivative_path(g_hat: &Spectrum2D, xi_i: f64, xi_j: f64, forward: bool) -> Result<Spectrum2D> {
    let g = g_hat.grid;
    let (ci, si) = (xi_i.cos(), xi_i.sin());
    let (cj, sj) = (xi_j.cos(), xi_j.sin());
    let (st, sy) = (ci + cj, si + sj);
    let snorm = (st * st + sy * sy).sqrt();
    let null = nullspace_mask(&g, xi_i, xi_j, NULLSPACE_TOL);
    let mut coeffs = vec![Complex64::default(); g.len()];
    for n in 0..g.ny {
        let w_y = signed_freq(n, g.ny, g.dy);
        for m in 0..g.nt {
            let w_t = signed_freq(m, g.nt, g.dt);
            let idx = n * g.nt + m;
            if null[idx] {
                continue;
            }
            let di = Complex64::new(0.0, TWO_PI * (w_t * ci + w_y * si));
            let dj = Complex64::new(0.0, TWO_PI * (w_t * cj + w_y * sj));
            let w_dot_unit = (w_t * st + w_y * sy) / snorm;
            let mult = if forward {
                // (1/||s||) d_i d_j integral along +unit
                di * dj * (-1.0 / Complex64::new(0.0, TWO_PI * w_dot_unit)) / snorm
            } else {
                // -(1/||s||) d_i d_j integral along -unit
                -(di * dj * (-1.0 / Complex64::new(0.0, TWO_PI * (-w_dot_unit)))) / snorm
            };
            coeffs[idx] = g_hat.get(n, m) * mult;
        }
    }
    Spectrum2D::from_coeffs(g, coeffs)
}
