use crate::error::Result;
use crate::info::{mutual_info, total_correlation, ChannelModel, JointDistribution, SymbolSet};
use crate::model::FronthaulBudget;
use crate::region::{greedy_corner, SetFunction};

/// `sum_k I(U_k; Y_k) - T(U(K))` on a distribution that already carries the outputs.
pub fn marton_sum_rate<D: JointDistribution>(ext: &D) -> Result<f64> {
    let k = ext.num_users();
    let mut sum = 0.0;
    for i in 0..k {
        sum += mutual_info(ext, ext.user(i)?, ext.output(i)?, SymbolSet::EMPTY)?;
    }
    let all = ext.users(((1u64 << k) - 1) as u32)?;
    Ok(sum - total_correlation(ext, all)?)
}

/// Distributed decode-forward sum rate for a fixed distribution over `(U, X)`.
///
/// With a sum budget `C` the value is the Marton sum rate plus
/// `min{0, C - I(U;X) - T(X)}`; with per-link budgets it is the minimum over BS subsets `S`
/// of `sum_k I(U_k;Y_k) + sum_{l in S} C_l - T(U(K), X(S))`. Both apply when both are given.
pub fn sum_rate_ddf<C: ChannelModel>(dist: &C::Dist, channel: &C, budget: &FronthaulBudget) -> Result<f64> {
    let ext = channel.extend(dist)?;
    let k = ext.num_users();
    let l = ext.num_bs();
    let users = ext.users(((1u64 << k) - 1) as u32)?;
    let all_bs = ext.bss(((1u64 << l) - 1) as u32)?;
    let mut sum_i = 0.0;
    for i in 0..k {
        sum_i += mutual_info(&ext, ext.user(i)?, ext.output(i)?, SymbolSet::EMPTY)?;
    }
    let marton = sum_i - total_correlation(&ext, users)?;
    let mut best = marton;
    if let Some(c) = budget.sum_cap() {
        if c.is_finite() {
            let need = mutual_info(&ext, users, all_bs, SymbolSet::EMPTY)?
                + total_correlation(&ext, all_bs)?;
            best = best.min(marton + (c - need).min(0.0));
        }
    }
    if let Some(links) = budget.links() {
        for mask in 1..1u32 << l {
            let cap: f64 = (0..l).filter(|i| mask & (1 << i) != 0).map(|i| links[i]).sum();
            if !cap.is_finite() {
                continue;
            }
            let t = total_correlation(&ext, users | ext.bss(mask)?)?;
            best = best.min(sum_i + cap - t);
        }
    }
    Ok(best.max(0.0))
}

/// Fronthaul need `S -> I(U(K); X(S)) + T(X(S))` of the compression strategy.
pub fn compression_need<D: JointDistribution>(dist: &D) -> Result<SetFunction> {
    let users = dist.users(((1u64 << dist.num_users()) - 1) as u32)?;
    SetFunction::try_from_fn(dist.num_bs(), |mask| {
        if mask == 0 {
            return Ok(0.0);
        }
        let xs = dist.bss(mask)?;
        Ok(mutual_info(dist, users, xs, SymbolSet::EMPTY)? + total_correlation(dist, xs)?)
    })
}

/// Successive-compression fronthaul corner: the greedy corner of the need function under `order`.
pub fn compression_corner<D: JointDistribution>(dist: &D, order: &[usize]) -> Result<Vec<f64>> {
    Ok(greedy_corner(&compression_need(dist)?, order)?.coords)
}
