use super::regions::{ddf_g, g_is_supermodular, per_user_info};
use super::{residual_check, slack_check, Atom, Check, Status, TimeShareSchedule, VerificationReport};
use crate::error::{Error, Result};
use crate::info::{mutual_info, total_correlation, ChannelModel, JointDistribution, SymbolSet};
use crate::model::{GaussianChannel, GaussianSystemDistribution};
use crate::region::greedy_corner;
use crate::strategies::{compression_corner, constant_gap_distribution};

const ACTIVE_TOL: f64 = 1e-12;

fn bs_positions(dist: &GaussianSystemDistribution, off: &[usize]) -> Result<Vec<usize>> {
    off.iter()
        .map(|&b| dist.bs(b).map(|s| s.positions().next().expect("singleton")))
        .collect()
}

/// Sum rate in the form `I(U; X) - sum_k I(U_k; X | Y_k)`, plus its gap to the Marton form.
fn lemma_sum_rate(ext: &GaussianSystemDistribution) -> Result<(f64, f64)> {
    let k = ext.num_users();
    let users = ext.users(((1u64 << k) - 1) as u32)?;
    let x = ext.bss(((1u64 << ext.num_bs()) - 1) as u32)?;
    let mut rate = mutual_info(ext, users, x, SymbolSet::EMPTY)?;
    for i in 0..k {
        rate -= mutual_info(ext, ext.user(i)?, x, ext.output(i)?)?;
    }
    let marton = per_user_info(ext)?.iter().sum::<f64>() - total_correlation(ext, users)?;
    Ok((rate, (rate - marton).abs()))
}

struct AtomEval {
    atom: Atom,
    /// Disagreement between conditioning on the shut-off BS signals and rebuilding the
    /// distribution without them, and between the two sum-rate forms.
    residual: f64,
}

fn shutoff_atom(channel: &GaussianChannel, ordering: &[usize], n_off: usize, weight: f64) -> Result<AtomEval> {
    let l = channel.num_bs();
    let off = &ordering[..n_off];
    let base = channel.extend(&constant_gap_distribution(channel))?;
    let conditioned = base.condition_on(&bs_positions(&base, off)?)?;

    let mut h = channel.h().clone();
    for &b in off {
        h.column_mut(b).fill(0.0);
    }
    let zeroed_channel = GaussianChannel::new(h, channel.sigma2(), channel.power())?;
    let zeroed_ext = zeroed_channel.extend(&constant_gap_distribution(&zeroed_channel))?;
    let zeroed = zeroed_ext.make_constant(&bs_positions(&zeroed_ext, off)?);

    let mut residual = 0.0f64;
    let mut eval = |d: &GaussianSystemDistribution| -> Result<(Vec<f64>, f64)> {
        let fronthaul = compression_corner(d, ordering)?;
        let (rate, lemma) = lemma_sum_rate(d)?;
        residual = residual.max(lemma);
        Ok((fronthaul, rate))
    };
    let (fronthaul, rate) = eval(&conditioned)?;
    let (fz, rz) = eval(&zeroed)?;
    residual = fronthaul
        .iter()
        .zip(&fz)
        .map(|(a, b)| (a - b).abs())
        .fold(residual.max((rate - rz).abs()), f64::max);
    let active: Vec<usize> = ordering[n_off..].to_vec();
    debug_assert_eq!(fronthaul.len(), l);
    Ok(AtomEval { atom: Atom { weight, active, rates: vec![rate], fronthaul }, residual })
}

/// Greedy corner of the decode-forward fronthaul polytope at sum rate `R` under the
/// constant-gap distribution, realized by time sharing two compression schemes with a prefix
/// of BSs shut off.
pub fn verify_theorem4_corner(channel: &GaussianChannel, r: f64, ordering: &[usize]) -> Result<VerificationReport> {
    let l = channel.num_bs();
    let dist = constant_gap_distribution(channel);
    let ext = channel.extend(&dist)?;
    let users = ext.users(((1u64 << channel.num_users()) - 1) as u32)?;
    let info = per_user_info(&ext)?;
    let sum_info: f64 = info.iter().sum();
    let t_u = total_correlation(&ext, users)?;
    let max = sum_info - t_u;
    if r > max + super::VERIFY_TOL {
        return Err(Error::InfeasibleRate { rate: r, max });
    }
    let g = ddf_g(&dist, channel, r)?;
    let corner = greedy_corner(&g, ordering)?;
    let supermodular = g_is_supermodular(&g);
    let j = corner.ordering.iter().position(|&b| corner.coords[b] > ACTIVE_TOL).map(|p| p + 1);

    let mut checks: Vec<Check> = Vec::new();
    checks.push(Check { name: "g_supermodular", value: 0.0, pass: supermodular });
    let mut residual = 0.0f64;
    let (atoms, beta) = match j {
        None => {
            let a = shutoff_atom(channel, ordering, l, 1.0)?;
            residual = residual.max(a.residual);
            (vec![a.atom], None)
        }
        Some(j) => {
            let bj = ordering[j - 1];
            let prior = ext.bss(ordering[..j - 1].iter().fold(0, |m, &b| m | (1 << b)))?;
            let i_prior = mutual_info(&ext, prior, users, SymbolSet::EMPTY)?;
            let i_j = mutual_info(&ext, ext.bs(bj)?, users, prior)?;
            let beta = -(i_prior + r - sum_info + t_u) / i_j;
            if !(beta > 0.0 && beta <= 1.0 + ACTIVE_TOL) {
                return Err(Error::WeightOutOfRange { name: "beta", value: beta });
            }
            let beta = beta.min(1.0);
            checks.push(Check { name: "beta_in_range", value: beta, pass: beta > 0.0 && beta <= 1.0 });
            let first = shutoff_atom(channel, ordering, j - 1, 1.0 - beta)?;
            let second = shutoff_atom(channel, ordering, j, beta)?;
            residual = residual.max(first.residual).max(second.residual);
            (vec![first.atom, second.atom], Some(beta))
        }
    };
    let schedule = TimeShareSchedule::mix(atoms);
    let fronthaul_residual = schedule
        .avg_fronthaul
        .iter()
        .zip(&corner.coords)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let surplus = schedule.achieved_rates[0] - r;
    checks.push(residual_check("fronthaul_residual", fronthaul_residual));
    checks.push(slack_check("sum_rate_surplus", surplus));
    checks.push(residual_check("shutoff_identity_residual", residual));
    Ok(VerificationReport {
        theorem: 4,
        instance: 0,
        ordering: ordering.to_vec(),
        status: Status::Pass,
        reason: None,
        polymatroid: supermodular,
        corner: corner.coords,
        j,
        weight: beta,
        checks,
        worst_residual: fronthaul_residual.max(residual).max((-surplus).max(0.0)),
        schedule: Some(schedule),
    }
    .finish())
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;

    fn eye() -> GaussianChannel {
        GaussianChannel::new(DMatrix::identity(2, 2), 1.0, 100.0).unwrap()
    }

    #[test]
    fn fixed_instance_passes_both_orderings() {
        for ord in [[0, 1], [1, 0]] {
            let r = verify_theorem4_corner(&eye(), 3.0, &ord).unwrap();
            assert!(r.passed(), "{r:?}");
            let b = r.weight.unwrap();
            assert!(b > 0.0 && b <= 1.0);
            assert!(r.worst_residual < 1e-9);
        }
    }

    #[test]
    fn g_reference_value() {
        let ch = eye();
        let marton = 2.0 * 0.5 * (10201.0f64 / 201.0).log2();
        let g = ddf_g(&constant_gap_distribution(&ch), &ch, marton).unwrap();
        assert!((g.value(0b11) - 101f64.log2()).abs() < 1e-9);
        assert!(g_is_supermodular(&g));
        assert!(g.value(0b01) > 0.0 && g.value(0b10) > 0.0);
    }

    #[test]
    fn zero_rate_needs_no_fronthaul() {
        let silent = GaussianChannel::new(DMatrix::zeros(2, 2), 1.0, 100.0).unwrap();
        let r = verify_theorem4_corner(&silent, 0.0, &[0, 1]).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.j, None);
        assert!(r.corner.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn rate_above_marton_is_infeasible() {
        assert!(matches!(verify_theorem4_corner(&eye(), 6.0, &[0, 1]), Err(Error::InfeasibleRate { .. })));
    }
}
