use nalgebra::DMatrix;
use serde::Serialize;

use super::rates::compression_corner;
use super::{check_power, check_psd};
use crate::error::{Error, Result};
use crate::info::{mutual_info, ChannelModel, JointDistribution, SymbolSet};
use crate::model::{GaussianChannel, GaussianSystemDistribution};

/// `X = W U + N` with `U ~ N(0, I)` and `N ~ N(0, Q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearDesign {
    /// `L x K`; column `k` is the beamformer of user `k`.
    pub w: DMatrix<f64>,
    /// `L x L`; diagonal for independent compression.
    pub q: DMatrix<f64>,
    /// Successive compression order of the BSs (0-based).
    pub compression_order: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearEvaluation {
    #[serde(skip)]
    pub dist: GaussianSystemDistribution,
    pub rates: Vec<f64>,
    /// `I(X_l; U)` per BS.
    pub fronthaul_indep: Vec<f64>,
    /// Successive-compression corner under the design's order.
    pub fronthaul_multi: Vec<f64>,
    /// Largest closed-form versus generic discrepancy over all displays.
    pub residual: f64,
}

impl LinearDesign {
    pub fn new(w: DMatrix<f64>, q: DMatrix<f64>) -> Self {
        let l = w.nrows();
        Self { w, q, compression_order: (0..l).collect() }
    }

    pub fn distribution(&self, power: f64) -> Result<GaussianSystemDistribution> {
        let (l, k) = self.w.shape();
        if self.q.shape() != (l, l) || self.compression_order.len() != l {
            return Err(Error::DimensionMismatch("W, Q and order must agree on L".into()));
        }
        check_psd(&self.q)?;
        let xx = &self.w * self.w.transpose() + &self.q;
        check_power(xx.diagonal().iter().copied(), power)?;
        let mut cov = DMatrix::zeros(k + l, k + l);
        cov.view_mut((0, 0), (k, k)).fill_with_identity();
        cov.view_mut((k, 0), (l, k)).copy_from(&self.w);
        cov.view_mut((0, k), (k, l)).copy_from(&self.w.transpose());
        cov.view_mut((k, k), (l, l)).copy_from(&xx);
        GaussianSystemDistribution::scalar(cov, k, l, Some(power))
    }
}

/// Builds the joint Gaussian for a linear beamforming design and evaluates user rates and
/// fronthaul requirements, both generically and by closed form.
pub fn build_linear(channel: &GaussianChannel, design: &LinearDesign) -> Result<LinearEvaluation> {
    if design.w.nrows() != channel.num_bs() || design.w.ncols() != channel.num_users() {
        return Err(Error::DimensionMismatch("W must be L x K".into()));
    }
    let dist = design.distribution(channel.power())?;
    let ext = channel.extend(&dist)?;
    let k = channel.num_users();
    let l = channel.num_bs();
    let all_u = dist.users(((1u64 << k) - 1) as u32)?;

    let mut rates = Vec::with_capacity(k);
    for i in 0..k {
        rates.push(mutual_info(&ext, ext.user(i)?, ext.output(i)?, SymbolSet::EMPTY)?);
    }
    let mut indep = Vec::with_capacity(l);
    for b in 0..l {
        indep.push(mutual_info(&dist, dist.bs(b)?, all_u, SymbolSet::EMPTY)?);
    }
    let multi = compression_corner(&dist, &design.compression_order)?;

    let (w, q, h) = (&design.w, &design.q, channel.h());
    let mut residual = 0.0f64;
    for i in 0..k {
        let hi = h.row(i).transpose();
        let gain = |j: usize| hi.dot(&w.column(j)).powi(2);
        let interference: f64 = (0..k).filter(|&j| j != i).map(gain).sum();
        let noise = (hi.transpose() * q * &hi)[(0, 0)] + channel.sigma2();
        let closed = 0.5 * (1.0 + gain(i) / (interference + noise)).log2();
        residual = residual.max((closed - rates[i]).abs());
    }
    let row_energy = |b: usize| w.row(b).norm_squared();
    for b in 0..l {
        let closed = 0.5 * (1.0 + row_energy(b) / q[(b, b)]).log2();
        residual = residual.max((closed - indep[b]).abs());
    }
    if l == 2 {
        let (first, second) = (design.compression_order[0], design.compression_order[1]);
        let q11 = q[(first, first)];
        let q22 = q[(second, second)];
        let q12 = q[(first, second)];
        let c1 = 0.5 * (1.0 + row_energy(first) / q11).log2();
        let c2 = 0.5 * (1.0 + row_energy(second) / q22).log2()
            + 0.5 * (q22 / (q22 - q12 * q12 / q11)).log2();
        residual = residual.max((c1 - multi[first]).abs()).max((c2 - multi[second]).abs());
    }
    Ok(LinearEvaluation { dist, rates, fronthaul_indep: indep, fronthaul_multi: multi, residual })
}
