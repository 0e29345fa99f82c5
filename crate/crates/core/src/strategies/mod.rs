//! Gaussian strategy builders and sum-rate evaluators.

mod constant_gap;
mod dpc;
mod linear;
mod rates;
mod zf;

pub use constant_gap::{
    constant_gap_distribution, gamma_for_sum_fronthaul, sum_fronthaul_threshold,
    sum_rate_compression_scaled, CompressionRate,
};
pub use dpc::{build_dpc, dpc_rank_one_design, DpcDesign, DpcEvaluation};
pub use linear::{build_linear, LinearDesign, LinearEvaluation};
pub use rates::{compression_corner, compression_need, marton_sum_rate, sum_rate_ddf};
pub use zf::{zf_baseline, ZfGrid, ZfPoint, ZfTable};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerance for closed-form versus generic agreement, in bits.
pub const IDENTITY_TOL: f64 = 1e-9;

pub(crate) fn check_psd(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() || (m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
        return Err(Error::QNotPsd);
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let max = eig.max().abs();
    if eig.min() < -crate::model::PSD_REL_TOL * max.max(f64::MIN_POSITIVE) {
        return Err(Error::QNotPsd);
    }
    Ok(())
}

pub(crate) fn check_power(diag: impl Iterator<Item = f64>, cap: f64) -> Result<()> {
    for (index, value) in diag.enumerate() {
        if value > cap + crate::model::POWER_TOL {
            return Err(Error::PowerViolated { index, value, cap });
        }
    }
    Ok(())
}
