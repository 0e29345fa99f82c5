use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::rates::marton_sum_rate;
use crate::error::{Error, Result};
use crate::info::ChannelModel;
use crate::model::{GaussianChannel, GaussianSystemDistribution};

const BISECTION_ITERS: usize = 200;
const BISECTION_FLOOR: f64 = 1e-12;

/// `X ~ N(0, P I)` and `U = H X + Z'` with `Z' ~ N(0, sigma2 I)` independent of everything.
pub fn constant_gap_distribution(channel: &GaussianChannel) -> GaussianSystemDistribution {
    let h = channel.h();
    let k = channel.num_users();
    let l = channel.num_bs();
    let p = channel.power();
    let mut cov = DMatrix::zeros(k + l, k + l);
    let uu = h * h.transpose() * p + DMatrix::identity(k, k) * channel.sigma2();
    let ux = h * p;
    cov.view_mut((0, 0), (k, k)).copy_from(&uu);
    cov.view_mut((0, k), (k, l)).copy_from(&ux);
    cov.view_mut((k, 0), (l, k)).copy_from(&ux.transpose());
    cov.view_mut((k, k), (l, l)).copy_from(&(DMatrix::identity(l, l) * p));
    GaussianSystemDistribution::scalar(cov, k, l, Some(p)).expect("block layout is consistent")
}

fn gram_eigenvalues(channel: &GaussianChannel) -> Vec<f64> {
    let h = channel.h();
    SymmetricEigen::new(h * h.transpose())
        .eigenvalues
        .iter()
        .map(|&e| e.max(0.0))
        .collect()
}

fn half_log_det(eig: &[f64], snr: f64) -> f64 {
    0.5 * eig.iter().map(|e| (1.0 + snr * e).log2()).sum::<f64>()
}

/// `1/2 log2 |I + P H H^T / sigma2|`, the sum fronthaul beyond which no power scaling is needed.
pub fn sum_fronthaul_threshold(channel: &GaussianChannel) -> f64 {
    half_log_det(&gram_eigenvalues(channel), channel.power() / channel.sigma2())
}

/// Power scaling `gamma` with `1/2 log2 |I + gamma P H H^T / sigma2| = C`, or 1 when `C` is at
/// or above the threshold.
pub fn gamma_for_sum_fronthaul(channel: &GaussianChannel, c: f64) -> Result<f64> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::BadCapacity(c));
    }
    let eig = gram_eigenvalues(channel);
    let snr = channel.power() / channel.sigma2();
    if c >= half_log_det(&eig, snr) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_ITERS {
        if hi - lo <= BISECTION_FLOOR * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if half_log_det(&eig, mid * snr) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompressionRate {
    pub rate: f64,
    pub gamma: f64,
    /// `C' - sum_k 1/2 log2(1 + s_k gamma P / (s_k gamma P + sigma2))` with `C'` the fronthaul
    /// actually used.
    pub closed_form: f64,
    /// Marton sum rate of the scaled constant-gap distribution.
    pub generic: f64,
    pub residual: f64,
}

/// Compression sum rate with the constant-gap distribution, scaling the BS power by `gamma`
/// so the sum fronthaul requirement equals `C` when it would otherwise exceed it.
pub fn sum_rate_compression_scaled(channel: &GaussianChannel, c: f64) -> Result<CompressionRate> {
    let threshold = sum_fronthaul_threshold(channel);
    let gamma = gamma_for_sum_fronthaul(channel, c)?;
    let used = if gamma < 1.0 { c } else { threshold };
    let scaled = channel.with_power(gamma * channel.power())?;
    let gp = scaled.power();
    let penalty: f64 = (0..channel.num_users())
        .map(|k| {
            let s = channel.row_gain(k);
            0.5 * (1.0 + s * gp / (s * gp + channel.sigma2())).log2()
        })
        .sum();
    let closed_form = used - penalty;
    let generic = marton_sum_rate(&scaled.extend(&constant_gap_distribution(&scaled))?)?;
    Ok(CompressionRate {
        rate: generic.max(0.0),
        gamma,
        closed_form,
        generic,
        residual: (closed_form - generic).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{mutual_info, total_correlation, JointDistribution, SymbolSet};
    use crate::model::FronthaulBudget;
    use crate::strategies::sum_rate_ddf;

    fn eye() -> GaussianChannel {
        GaussianChannel::new(DMatrix::identity(2, 2), 1.0, 100.0).unwrap()
    }

    #[test]
    fn constant_gap_reference_values() {
        let ch = eye();
        let d = constant_gap_distribution(&ch);
        let diag = d.validate();
        assert!(diag.positive_definite && diag.power_ok);
        for v in d.bs_variances() {
            assert_eq!(v, 100.0);
        }
        let u = d.users(0b11).unwrap();
        let x = d.bss(0b11).unwrap();
        let i_ux = mutual_info(&d, u, x, SymbolSet::EMPTY).unwrap();
        assert!((i_ux - 101f64.log2()).abs() < 1e-12);
        assert!(total_correlation(&d, x).unwrap() < 1e-15);

        let ext = ch.extend(&d).unwrap();
        // 1/2 log2(101^2 / (101^2 - 100^2))
        let oracle = 0.5 * (101.0f64 * 101.0 / (101.0 * 101.0 - 100.0 * 100.0)).log2();
        for k in 0..2 {
            let i = mutual_info(&ext, ext.user(k).unwrap(), ext.output(k).unwrap(), SymbolSet::EMPTY).unwrap();
            assert!((i - oracle).abs() < 1e-12);
            assert!((i - 2.833).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_channel_carries_no_information() {
        let ch = GaussianChannel::new(DMatrix::zeros(2, 2), 1.0, 100.0).unwrap();
        let ext = ch.extend(&constant_gap_distribution(&ch)).unwrap();
        let u = ext.users(0b11).unwrap();
        assert!(mutual_info(&ext, u, ext.bss(0b11).unwrap(), SymbolSet::EMPTY).unwrap() < 1e-12);
        assert!(marton_sum_rate(&ext).unwrap().abs() < 1e-12);
    }

    #[test]
    fn gamma_reference_and_case_split() {
        let ch = eye();
        assert!((gamma_for_sum_fronthaul(&ch, 4.0).unwrap() - 0.15).abs() < 1e-9);
        assert_eq!(gamma_for_sum_fronthaul(&ch, 7.0).unwrap(), 1.0);
        assert!(gamma_for_sum_fronthaul(&ch, 0.0).is_err());
        let mut prev = 0.0;
        for c in [1e-6, 1e-3, 0.1, 1.0, 3.0, 6.0] {
            let g = gamma_for_sum_fronthaul(&ch, c).unwrap();
            assert!(g > prev);
            prev = g;
        }
        assert!(gamma_for_sum_fronthaul(&ch, 1e-9).unwrap() < 1e-9);
    }

    #[test]
    fn compression_reference_values() {
        let ch = eye();
        let r = sum_rate_compression_scaled(&ch, 4.0).unwrap();
        let oracle = 4.0 - (31.0f64 / 16.0).log2();
        assert!((r.rate - oracle).abs() < 1e-9);
        assert!((r.rate - 3.0458).abs() < 1e-4);
        assert!(r.residual < 1e-9);

        let hi = sum_rate_compression_scaled(&ch, 8.0).unwrap();
        assert_eq!(hi.gamma, 1.0);
        assert!((hi.rate - 5.6654).abs() < 1e-4);
        assert!(hi.residual < 1e-9);

        assert!(sum_rate_compression_scaled(&ch, 1e-6).unwrap().rate < 1e-5);
    }

    #[test]
    fn ddf_reference_values() {
        let ch = eye();
        let d = constant_gap_distribution(&ch);
        let r = sum_rate_ddf(&d, &ch, &FronthaulBudget::sum(4.0).unwrap()).unwrap();
        let marton = 2.0 * 0.5 * (10201.0f64 / 201.0).log2();
        assert!((r - (marton + 4.0 - 101f64.log2())).abs() < 1e-9);
        assert!((r - 3.0072).abs() < 1e-4);
        let hi = sum_rate_ddf(&d, &ch, &FronthaulBudget::sum(8.0).unwrap()).unwrap();
        assert!((hi - marton).abs() < 1e-9);
        let links = sum_rate_ddf(&d, &ch, &FronthaulBudget::per_link(vec![50.0, 50.0]).unwrap()).unwrap();
        assert!(links <= marton + 1e-12);
    }

    #[test]
    fn scaling_invariance() {
        let h = crate::model::sample_rayleigh_channel(2, 3, 5);
        let a = GaussianChannel::new(h.clone(), 1.0, 10.0).unwrap();
        let b = GaussianChannel::new(h * 3.0, 9.0, 10.0).unwrap();
        for c in [0.5, 2.0, 20.0] {
            let ra = sum_rate_compression_scaled(&a, c).unwrap();
            let rb = sum_rate_compression_scaled(&b, c).unwrap();
            assert!((ra.rate - rb.rate).abs() < 1e-9);
            let budget = FronthaulBudget::sum(c).unwrap();
            let da = sum_rate_ddf(&constant_gap_distribution(&a), &a, &budget).unwrap();
            let db = sum_rate_ddf(&constant_gap_distribution(&b), &b, &budget).unwrap();
            assert!((da - db).abs() < 1e-9);
        }
    }
}
