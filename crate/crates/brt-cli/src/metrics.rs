//! Error metrics between an estimate and a reference on the same grid.

use brt_core::{BrtError, Field2D};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub peak_abs_err: f64,
    pub rel_l2: f64,
    pub peak_abs_err_over_ref_peak: f64,
}

impl std::fmt::Display for Metrics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "peak_abs_err={:.6e} rel_l2={:.6e} peak_abs_err_over_ref_peak={:.6e}",
            self.peak_abs_err, self.rel_l2, self.peak_abs_err_over_ref_peak
        )
    }
}

pub fn metrics(estimate: &Field2D, reference: &Field2D) -> Result<Metrics> {
    if estimate.grid != reference.grid {
        return Err(BrtError::GridMismatch(
            "estimate and reference grids differ".into(),
        )
        .into());
    }
    let mut peak = 0.0f64;
    let mut diff2 = 0.0f64;
    let mut ref2 = 0.0f64;
    let mut ref_peak = 0.0f64;
    for (e, r) in estimate.values().iter().zip(reference.values()) {
        let d = e - r;
        peak = peak.max(d.abs());
        diff2 += d * d;
        ref2 += r * r;
        ref_peak = ref_peak.max(r.abs());
    }
    Ok(Metrics {
        peak_abs_err: peak,
        rel_l2: if ref2 > 0.0 { (diff2 / ref2).sqrt() } else { diff2.sqrt() },
        peak_abs_err_over_ref_peak: if ref_peak > 0.0 { peak / ref_peak } else { peak },
    })
}
