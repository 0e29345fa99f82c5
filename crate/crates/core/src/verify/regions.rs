use serde::Serialize;

use super::VERIFY_TOL;
use crate::error::{Error, Result};
use crate::info::{mutual_info, total_correlation, ChannelModel, JointDistribution, SymbolSet};
use crate::model::FronthaulBudget;
use crate::region::{is_supermodular, SetFunction};

fn all_mask(n: usize) -> u32 {
    ((1u64 << n) - 1) as u32
}

pub(crate) fn per_user_info<D: JointDistribution>(ext: &D) -> Result<Vec<f64>> {
    (0..ext.num_users())
        .map(|k| mutual_info(ext, ext.user(k)?, ext.output(k)?, SymbolSet::EMPTY))
        .collect()
}

pub(crate) fn marton<D: JointDistribution>(ext: &D, info: &[f64], mask: u32) -> Result<f64> {
    let s: f64 = (0..info.len()).filter(|k| mask & (1 << k) != 0).map(|k| info[k]).sum();
    Ok(s - total_correlation(ext, ext.users(mask)?)?)
}

/// Rate set function of the decode-forward region under a sum fronthaul `C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DdfFunction {
    pub f: SetFunction,
    /// `sum_k I(U_k;Y_k) + C - T(U(K), X(L))`; `+inf` when `C` is.
    pub cap: f64,
    /// Marton values `sum_{k in D} I(U_k;Y_k) - T(U(D))`.
    pub marton: SetFunction,
    pub info: Vec<f64>,
    /// Smallest margin by which the full-set constraint is tighter than every subset one.
    pub tighter_margin: f64,
}

/// `f(D) = min{marton(D), sum_k I(U_k;Y_k) + C - T(U(K), X(L))}` with `f(empty) = 0`.
pub fn ddf_f<C: ChannelModel>(dist: &C::Dist, channel: &C, c: f64) -> Result<DdfFunction> {
    if c.is_nan() || c < 0.0 {
        return Err(Error::BadCapacity(c));
    }
    let ext = channel.extend(dist)?;
    let k = ext.num_users();
    let l = ext.num_bs();
    let info = per_user_info(&ext)?;
    let full = all_mask(k);
    let x = ext.bss(all_mask(l))?;
    let t_all = total_correlation(&ext, ext.users(full)? | x)?;
    let sum_info: f64 = info.iter().sum();
    let cap = if c.is_infinite() { f64::INFINITY } else { sum_info + c - t_all };
    let marton_fn = SetFunction::try_from_fn(k, |m| if m == 0 { Ok(0.0) } else { marton(&ext, &info, m) })?;
    let f = SetFunction::from_fn(k, |m| if m == 0 { 0.0 } else { marton_fn.value(m).min(cap) })?;
    // T(U(K),X) - T(U(D),X) - sum_{k not in D} I(U_k;Y_k) >= 0
    let mut tighter = f64::INFINITY;
    for m in 0..=full {
        let t_d = total_correlation(&ext, ext.users(m)? | x)?;
        let rest: f64 = (0..k).filter(|i| m & (1 << i) == 0).map(|i| info[i]).sum();
        tighter = tighter.min(t_all - t_d - rest);
    }
    Ok(DdfFunction { f, cap, marton: marton_fn, info, tighter_margin: tighter })
}

/// `g(S) = max{T(U(K), X(S)) + R - sum_k I(U_k;Y_k), 0}` with `g(empty) = 0`.
pub fn ddf_g<C: ChannelModel>(dist: &C::Dist, channel: &C, r: f64) -> Result<SetFunction> {
    let ext = channel.extend(dist)?;
    let k = ext.num_users();
    let users = ext.users(all_mask(k))?;
    let sum_info: f64 = per_user_info(&ext)?.iter().sum();
    SetFunction::try_from_fn(ext.num_bs(), |m| {
        if m == 0 {
            return Ok(0.0);
        }
        Ok((total_correlation(&ext, users | ext.bss(m)?)? + r - sum_info).max(0.0))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    /// `cap(S) - I(U(K); X(S)) - T(X(S))`, indexed by BS bitmask; entry 0 is unused.
    pub slacks: Vec<f64>,
    pub feasible: bool,
}

/// Fronthaul constraints of the compression region for every BS subset.
pub fn compression_region_feasible<D: JointDistribution>(
    dist: &D,
    budget: &FronthaulBudget,
) -> Result<Feasibility> {
    let l = dist.num_bs();
    budget.check_links(l)?;
    let users = dist.users(all_mask(dist.num_users()))?;
    let mut slacks = vec![0.0; 1 << l];
    for m in 1..1u32 << l {
        let xs = dist.bss(m)?;
        let need = mutual_info(dist, users, xs, SymbolSet::EMPTY)? + total_correlation(dist, xs)?;
        slacks[m as usize] = budget.cut_capacity(m, l) - need;
    }
    let feasible = slacks.iter().all(|&s| s >= -VERIFY_TOL);
    Ok(Feasibility { slacks, feasible })
}

/// `sum_k I(U_k;Y_k) - T(U(K))` minus `I(U(K); X(L)) - sum_k I(U_k; X(L) | Y_k)`, in absolute
/// value. Requires independent `X` and `U` conditionally independent given `X`.
pub fn lemma1_residual<C: ChannelModel>(dist: &C::Dist, channel: &C) -> Result<f64> {
    let k = dist.num_users();
    let x = dist.bss(all_mask(dist.num_bs()))?;
    let users = dist.users(all_mask(k))?;
    let t_x = dist.total_correlation_raw(x)?;
    if t_x.abs() > VERIFY_TOL {
        return Err(Error::PreconditionViolated(format!("BS signals are dependent (T = {t_x:e})")));
    }
    let h_x = dist.entropy(x)?;
    let mut cond = -(dist.entropy(users | x)? - h_x);
    for i in 0..k {
        cond += dist.entropy(dist.user(i)? | x)? - h_x;
    }
    if cond.abs() > VERIFY_TOL {
        return Err(Error::PreconditionViolated(format!(
            "users are dependent given the BS signals (T = {cond:e})"
        )));
    }
    let ext = channel.extend(dist)?;
    let info = per_user_info(&ext)?;
    let lhs = info.iter().sum::<f64>() - total_correlation(&ext, users)?;
    let mut rhs = mutual_info(&ext, users, x, SymbolSet::EMPTY)?;
    for i in 0..k {
        rhs -= mutual_info(&ext, ext.user(i)?, x, ext.output(i)?)?;
    }
    Ok((lhs - rhs).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    pub holds: bool,
    /// Smallest `DDF bound - compression bound` over user subsets.
    pub worst_margin: f64,
}

/// For a distribution feasible for compression, every compression rate bound is at most the
/// decode-forward bound. Returns `None` when the distribution is infeasible.
pub fn region_inclusion_check<C: ChannelModel>(
    dist: &C::Dist,
    channel: &C,
    budget: &FronthaulBudget,
) -> Result<Option<InclusionReport>> {
    if !compression_region_feasible(dist, budget)?.feasible {
        return Ok(None);
    }
    let ext = channel.extend(dist)?;
    let k = ext.num_users();
    let l = ext.num_bs();
    let info = per_user_info(&ext)?;
    let mut worst = f64::INFINITY;
    for d in 1..=all_mask(k) {
        let com = marton(&ext, &info, d)?;
        let sum_d: f64 = (0..k).filter(|i| d & (1 << i) != 0).map(|i| info[i]).sum();
        let u_d = ext.users(d)?;
        let mut ddf = f64::INFINITY;
        for s in 0..=all_mask(l) {
            let cap = budget.cut_capacity(s, l);
            if cap.is_infinite() {
                continue;
            }
            ddf = ddf.min(sum_d + cap - total_correlation(&ext, u_d | ext.bss(s)?)?);
        }
        worst = worst.min(ddf - com);
    }
    Ok(Some(InclusionReport { holds: worst >= -VERIFY_TOL, worst_margin: worst }))
}

/// Supermodularity of `g`.
pub(crate) fn g_is_supermodular(g: &SetFunction) -> bool {
    is_supermodular(g).holds
}
