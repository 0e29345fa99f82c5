use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::regions::{ddf_f, marton, per_user_info};
use super::{verify_theorem3_corner, verify_theorem4_corner, VerificationReport};
use crate::error::Result;
use crate::info::{ChannelModel, JointDistribution, Symbol};
use crate::model::{
    sample_rayleigh_channel, DiscreteChannel, DiscreteSystemDistribution, GaussianChannel,
    GaussianSystemDistribution,
};
use crate::strategies::{constant_gap_distribution, sum_fronthaul_threshold};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Discrete,
    Gaussian,
}

fn exp_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| Exp1.sample(rng)).collect()
}

/// Rows of a random stochastic matrix; larger `sharpness` concentrates each row.
fn stochastic_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize, sharpness: i32) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let w: Vec<f64> = exp_weights(rng, cols).iter().map(|v| v.powi(sharpness)).collect();
        let s: f64 = w.iter().sum();
        let mut row: Vec<f64> = w.iter().map(|v| v / s).collect();
        let residue = 1.0 - row.iter().sum::<f64>();
        row[0] += residue;
        out.extend(row);
    }
    out
}

/// K = L = 2 with alphabets of size 2 or 3 and `C` in `(0, 3]`.
///
/// `U` is drawn from a mixture of a product pmf and a joint pmf (mixing weight below 1/2),
/// then `X` given `U` and the channel from concentrated random conditionals. Half of the time
/// `C` is uniform on `(0, 3]`; otherwise it is uniform on the part of that interval where the
/// sum-fronthaul constraint cuts into the Marton region, when that part is non-empty.
pub fn random_discrete_instance(seed: u64) -> Result<(DiscreteSystemDistribution, DiscreteChannel, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = |rng: &mut ChaCha8Rng| rng.random_range(2..=3usize);
    let us = [size(&mut rng), size(&mut rng)];
    let xs = [size(&mut rng), size(&mut rng)];
    let ys = [size(&mut rng), size(&mut rng)];
    let (nu, nx, ny) = (us[0] * us[1], xs[0] * xs[1], ys[0] * ys[1]);
    let p1 = stochastic_rows(&mut rng, 1, us[0], 1);
    let p2 = stochastic_rows(&mut rng, 1, us[1], 1);
    let joint = stochastic_rows(&mut rng, 1, nu, 1);
    let lambda = 0.5 * rng.random::<f64>();
    let x_given_u = stochastic_rows(&mut rng, nu, nx, 3);
    let mut pmf = Vec::with_capacity(nu * nx);
    for u in 0..nu {
        let pu = (1.0 - lambda) * p1[u / us[1]] * p2[u % us[1]] + lambda * joint[u];
        pmf.extend(x_given_u[u * nx..(u + 1) * nx].iter().map(|p| pu * p));
    }
    let dist = DiscreteSystemDistribution::from_weights(
        pmf,
        &[(Symbol::User(0), us[0]), (Symbol::User(1), us[1]), (Symbol::Bs(0), xs[0]), (Symbol::Bs(1), xs[1])],
    )?;
    let channel = DiscreteChannel::new(xs.to_vec(), ys.to_vec(), stochastic_rows(&mut rng, nx, ny, 3))?;
    let c = if rng.random::<bool>() {
        3.0 * (1.0 - rng.random::<f64>())
    } else {
        let f = ddf_f(&dist, &channel, 0.0)?;
        let lo = (-f.cap).max(0.0);
        let hi = (lo + f.marton.values().iter().copied().fold(0.0, f64::max)).min(3.0);
        let u = 1.0 - rng.random::<f64>();
        if hi > lo { lo + (hi - lo) * u } else { 3.0 * u }
    };
    Ok((dist, channel, c))
}

fn rayleigh(rng: &mut ChaCha8Rng) -> Result<GaussianChannel> {
    let k = rng.random_range(2..=3usize);
    let l = rng.random_range(2..=3usize);
    GaussianChannel::new(sample_rayleigh_channel(k, l, rng.random()), 1.0, 100.0)
}

/// Constant-gap distribution on a Rayleigh channel with K, L in {2, 3}, P = 100, unit noise
/// and `C` uniform on `(0, 1.5 x threshold]`.
pub fn random_gaussian_instance(seed: u64) -> Result<(GaussianSystemDistribution, GaussianChannel, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channel = rayleigh(&mut rng)?;
    let c = 1.5 * sum_fronthaul_threshold(&channel) * (1.0 - rng.random::<f64>());
    Ok((constant_gap_distribution(&channel), channel, c))
}

/// Rayleigh channel and `R = 0.9` times the constant-gap Marton sum rate.
pub fn theorem4_instance(seed: u64) -> Result<(GaussianChannel, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channel = rayleigh(&mut rng)?;
    let ext = channel.extend(&constant_gap_distribution(&channel))?;
    let info = per_user_info(&ext)?;
    let full = ((1u64 << channel.num_users()) - 1) as u32;
    Ok((channel, 0.9 * marton(&ext, &info, full)?.max(0.0)))
}

fn all_orderings(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

fn run3<C: ChannelModel>(dist: &C::Dist, channel: &C, c: f64, seed: u64) -> Vec<VerificationReport> {
    all_orderings(dist.num_users())
        .iter()
        .map(|ord| {
            verify_theorem3_corner(dist, channel, c, ord)
                .unwrap_or_else(|e| VerificationReport::failed(3, ord, &e))
                .with_instance(seed)
        })
        .collect()
}

/// Verifies every ordering of `n` instances seeded `seed, seed + 1, ...`; reports come back in
/// seed order.
pub fn theorem3_batch(n: usize, seed: u64, kind: InstanceKind) -> Vec<VerificationReport> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let built = match kind {
                InstanceKind::Discrete => random_discrete_instance(s).map(|(d, ch, c)| run3(&d, &ch, c, s)),
                InstanceKind::Gaussian => random_gaussian_instance(s).map(|(d, ch, c)| run3(&d, &ch, c, s)),
            };
            built.unwrap_or_else(|e| vec![VerificationReport::failed(3, &[], &e).with_instance(s)])
        })
        .flatten()
        .collect()
}

pub fn theorem4_batch(n: usize, seed: u64) -> Vec<VerificationReport> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            match theorem4_instance(s) {
                Ok((channel, r)) => all_orderings(channel.num_bs())
                    .iter()
                    .map(|ord| {
                        verify_theorem4_corner(&channel, r, ord)
                            .unwrap_or_else(|e| VerificationReport::failed(4, ord, &e))
                            .with_instance(s)
                    })
                    .collect(),
                Err(e) => vec![VerificationReport::failed(4, &[], &e).with_instance(s)],
            }
        })
        .flatten()
        .collect()
}
