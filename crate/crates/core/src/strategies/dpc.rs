use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::rates::compression_corner;
use super::{check_power, check_psd};
use crate::error::{Error, Result};
use crate::info::{mutual_info, ChannelModel, JointDistribution, Symbol, SymbolSet};
use crate::model::{GaussianChannel, GaussianSystemDistribution};

/// Two-user dirty-paper design: `S_1 ~ N(0, K1)`, `S_2 ~ N(0, K2)`, `N ~ N(0, Q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DpcDesign {
    pub k1: DMatrix<f64>,
    pub k2: DMatrix<f64>,
    pub q: DMatrix<f64>,
    /// Encoding order; the second user pre-subtracts the first.
    pub dpc_order: [usize; 2],
    pub compression_order: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DpcEvaluation {
    #[serde(skip)]
    pub dist: GaussianSystemDistribution,
    #[serde(skip)]
    pub a: DMatrix<f64>,
    /// Indexed by user.
    pub rates: [f64; 2],
    pub fronthaul_indep: Vec<f64>,
    pub fronthaul_multi: Vec<f64>,
    /// Largest closed-form versus generic discrepancy, including the pre-subtraction identity.
    pub residual: f64,
}

impl DpcDesign {
    pub fn new(k1: DMatrix<f64>, k2: DMatrix<f64>, q: DMatrix<f64>) -> Self {
        let l = q.nrows();
        Self { k1, k2, q, dpc_order: [0, 1], compression_order: (0..l).collect() }
    }

    fn k(&self, user: usize) -> &DMatrix<f64> {
        if user == 0 {
            &self.k1
        } else {
            &self.k2
        }
    }
}

/// Matched-filter rank-one covariances plus `ridge I`, scaled so the busiest BS meets its
/// power cap, with `Q = q I`.
pub fn dpc_rank_one_design(channel: &GaussianChannel, ridge: f64, q: f64) -> Result<DpcDesign> {
    if channel.num_users() != 2 {
        return Err(Error::InvalidModel("dirty-paper design needs exactly two users".into()));
    }
    let l = channel.num_bs();
    let dirs: Vec<DVector<f64>> = (0..2)
        .map(|k| {
            let h = channel.h().row(k).transpose();
            let n = h.norm();
            if n > 0.0 {
                h / n
            } else {
                DVector::from_element(l, 1.0 / (l as f64).sqrt())
            }
        })
        .collect();
    let load = (0..l)
        .map(|b| dirs.iter().map(|v| v[b] * v[b]).sum::<f64>())
        .fold(0.0, f64::max);
    let p = (channel.power() - 2.0 * ridge - q) / load;
    if p <= 0.0 {
        return Err(Error::InvalidModel("ridge and quantization noise exceed the power cap".into()));
    }
    let eye = DMatrix::identity(l, l);
    let k = |v: &DVector<f64>| v * v.transpose() * p + &eye * ridge;
    Ok(DpcDesign::new(k(&dirs[0]), k(&dirs[1]), eye * q))
}

fn quad(h: &DVector<f64>, m: &DMatrix<f64>) -> f64 {
    (h.transpose() * m * h)[(0, 0)]
}

/// Builds `U_a = S_a`, `U_b = S_b + A S_a`, `X = S_1 + S_2 + N` for the order `(a, b)` with
/// `A = K_b h_b (h_b^T (K_b + Q) h_b + sigma2)^{-1} h_b^T`, and evaluates rates and
/// fronthaul both generically and by closed form.
pub fn build_dpc(channel: &GaussianChannel, design: &DpcDesign) -> Result<DpcEvaluation> {
    let l = channel.num_bs();
    if channel.num_users() != 2 {
        return Err(Error::InvalidModel("dirty-paper construction needs exactly two users".into()));
    }
    for m in [&design.k1, &design.k2, &design.q] {
        if m.shape() != (l, l) {
            return Err(Error::DimensionMismatch("K1, K2 and Q must be L x L".into()));
        }
    }
    let [a_user, b_user] = design.dpc_order;
    if a_user == b_user || a_user > 1 || b_user > 1 {
        return Err(Error::InvalidModel("dpc order must be a permutation of two users".into()));
    }
    check_psd(&design.q)?;
    for k in [&design.k1, &design.k2] {
        check_psd(k).map_err(|_| Error::InvalidModel("signal covariance is not PSD".into()))?;
    }
    let sigma = &design.k1 + &design.k2;
    check_power((&sigma + &design.q).diagonal().iter().copied(), channel.power())?;

    let h = channel.h();
    let hb = h.row(b_user).transpose();
    let ha = h.row(a_user).transpose();
    let (ka, kb) = (design.k(a_user), design.k(b_user));
    let denom = quad(&hb, &(kb + &design.q)) + channel.sigma2();
    if !(denom > 0.0) {
        return Err(Error::SingularBlock("pre-subtraction denominator".into()));
    }
    let a = kb * &hb * hb.transpose() / denom;

    // latent (S_1, S_2, N) -> (U_1, U_2, X)
    let mut latent = DMatrix::zeros(3 * l, 3 * l);
    latent.view_mut((0, 0), (l, l)).copy_from(&design.k1);
    latent.view_mut((l, l), (l, l)).copy_from(&design.k2);
    latent.view_mut((2 * l, 2 * l), (l, l)).copy_from(&design.q);
    let eye = DMatrix::<f64>::identity(l, l);
    let mut map = DMatrix::zeros(3 * l, 3 * l);
    let (sa, sb) = (a_user * l, b_user * l);
    map.view_mut((sa, sa), (l, l)).copy_from(&eye);
    map.view_mut((sb, sb), (l, l)).copy_from(&eye);
    map.view_mut((sb, sa), (l, l)).copy_from(&a);
    for blk in 0..3 {
        map.view_mut((2 * l, blk * l), (l, l)).copy_from(&eye);
    }
    let cov = &map * latent * map.transpose();
    let blocks: Vec<(Symbol, usize)> = vec![(Symbol::User(0), l), (Symbol::User(1), l)]
        .into_iter()
        .chain((0..l).map(|b| (Symbol::Bs(b), 1)))
        .collect();
    let full = GaussianSystemDistribution::new(cov, &blocks, Some(channel.power()))?;
    // a silent user is a constant
    let silent: Vec<usize> = [0, 1].into_iter().filter(|&u| design.k(u).amax() == 0.0).collect();
    let dist = full.make_constant(&silent);

    let ext = channel.extend(&dist)?;
    let (ua, ub) = (ext.user(a_user)?, ext.user(b_user)?);
    let mut rates = [0.0; 2];
    rates[a_user] = mutual_info(&ext, ua, ext.output(a_user)?, SymbolSet::EMPTY)?;
    rates[b_user] = mutual_info(&ext, ub, ext.output(b_user)?, SymbolSet::EMPTY)?
        - mutual_info(&ext, ua, ub, SymbolSet::EMPTY)?;

    let all_u = ua | ub;
    let mut indep = Vec::with_capacity(l);
    for b in 0..l {
        indep.push(mutual_info(&dist, dist.bs(b)?, all_u, SymbolSet::EMPTY)?);
    }
    let multi = compression_corner(&dist, &design.compression_order)?;

    let noise_a = quad(&ha, kb) + quad(&ha, &design.q) + channel.sigma2();
    let closed_a = 0.5 * (1.0 + quad(&ha, ka) / noise_a).log2();
    let closed_b = 0.5 * (1.0 + quad(&hb, kb) / (quad(&hb, &design.q) + channel.sigma2())).log2();
    let mut residual = (closed_a - rates[a_user]).abs().max((closed_b - rates[b_user]).abs());
    if design.k(b_user).amax() > 0.0 {
        residual = residual.max((presubtraction_gain(channel, design)? - closed_b).abs());
    }
    for b in 0..l {
        let closed = 0.5 * (1.0 + sigma[(b, b)] / design.q[(b, b)]).log2();
        residual = residual.max((closed - indep[b]).abs());
    }
    if l == 2 {
        let (f, s) = (design.compression_order[0], design.compression_order[1]);
        let q = &design.q;
        let c1 = 0.5 * (1.0 + sigma[(f, f)] / q[(f, f)]).log2();
        let c2 = 0.5 * (1.0 + sigma[(s, s)] / q[(s, s)]).log2()
            + 0.5 * (q[(s, s)] / (q[(s, s)] - q[(f, s)] * q[(f, s)] / q[(f, f)])).log2();
        residual = residual.max((c1 - multi[f]).abs()).max((c2 - multi[s]).abs());
    }
    Ok(DpcEvaluation { dist, a, rates, fronthaul_indep: indep, fronthaul_multi: multi, residual })
}

/// `I(S_b; Y_b | S_a)` on the joint law of `(S_a, S_b, Y_b)`.
fn presubtraction_gain(channel: &GaussianChannel, design: &DpcDesign) -> Result<f64> {
    let l = channel.num_bs();
    let [a_user, b_user] = design.dpc_order;
    let hb = channel.h().row(b_user).transpose();
    let (ka, kb) = (design.k(a_user), design.k(b_user));
    let mut cov = DMatrix::zeros(2 * l + 1, 2 * l + 1);
    cov.view_mut((0, 0), (l, l)).copy_from(ka);
    cov.view_mut((l, l), (l, l)).copy_from(kb);
    let ya = ka * &hb;
    let yb = kb * &hb;
    for i in 0..l {
        cov[(2 * l, i)] = ya[i];
        cov[(i, 2 * l)] = ya[i];
        cov[(2 * l, l + i)] = yb[i];
        cov[(l + i, 2 * l)] = yb[i];
    }
    cov[(2 * l, 2 * l)] = quad(&hb, &(ka + kb + &design.q)) + channel.sigma2();
    let aux = GaussianSystemDistribution::new(
        cov,
        &[(Symbol::Aux(0), l), (Symbol::Aux(1), l), (Symbol::Output(0), 1)],
        None,
    )?;
    mutual_info(&aux, SymbolSet::singleton(1), SymbolSet::singleton(2), SymbolSet::singleton(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn channel() -> GaussianChannel {
        GaussianChannel::from_rows(&[vec![1.0, 0.5], vec![0.3, -0.9]], 1.0, 100.0).unwrap()
    }

    #[test]
    fn silent_second_user() {
        let ch = channel();
        let k1 = DMatrix::from_row_slice(2, 2, &[20.0, 5.0, 5.0, 10.0]);
        let d = DpcDesign::new(k1, DMatrix::zeros(2, 2), DMatrix::identity(2, 2));
        let ev = build_dpc(&ch, &d).unwrap();
        assert_eq!(ev.rates[1], 0.0);
        assert_eq!(ev.a.amax(), 0.0);
        assert!(ev.residual < 1e-9);
    }

    #[test]
    fn vanishing_quantization_approaches_broadcast_rates() {
        let ch = channel();
        let d = dpc_rank_one_design(&ch, 1e-3, 1e-4).unwrap();
        let ev = build_dpc(&ch, &d).unwrap();
        assert!(ev.residual < 1e-9);
        let h = ch.h();
        let h1 = h.row(0).transpose();
        let h2 = h.row(1).transpose();
        let bc1 = 0.5 * (1.0 + quad(&h1, &d.k1) / (quad(&h1, &d.k2) + 1.0)).log2();
        let bc2 = 0.5 * (1.0 + quad(&h2, &d.k2)).log2();
        assert!((ev.rates[0] - bc1).abs() < 1e-3);
        assert!((ev.rates[1] - bc2).abs() < 1e-3);
    }

    #[test]
    fn reversed_order_and_correlated_q() {
        let ch = channel();
        let mut d = dpc_rank_one_design(&ch, 0.5, 2.0).unwrap();
        d.q = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 2.0]);
        d.dpc_order = [1, 0];
        d.compression_order = vec![1, 0];
        let ev = build_dpc(&ch, &d).unwrap();
        assert!(ev.residual < 1e-9, "{}", ev.residual);
        assert!(ev.dist.validate().positive_definite);
    }

    #[test]
    fn power_cap_enforced() {
        let ch = channel();
        let k = DMatrix::identity(2, 2) * 60.0;
        let d = DpcDesign::new(k.clone(), k, DMatrix::identity(2, 2));
        assert!(matches!(build_dpc(&ch, &d), Err(Error::PowerViolated { .. })));
    }
}
