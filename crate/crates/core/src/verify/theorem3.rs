use super::regions::{ddf_f, marton};
use super::{residual_check, slack_check, Atom, Check, TimeShareSchedule, VerificationReport, SELECT_TOL};
use crate::error::{Error, Result};
use crate::info::{mutual_info, total_correlation, ChannelModel, JointDistribution, SymbolSet};
use crate::region::{greedy_corner, is_submodular};

fn prefix_mask(ordering: &[usize], n: usize) -> u32 {
    ordering[..n].iter().fold(0, |m, &k| m | (1 << k))
}

/// Rates and sum-fronthaul need of one atom with only the users in `active` transmitting.
fn atom<C: ChannelModel>(
    dist: &C::Dist,
    channel: &C,
    ordering: &[usize],
    n_active: usize,
    weight: f64,
) -> Result<Atom> {
    let k = dist.num_users();
    let l = dist.num_bs();
    let active = prefix_mask(ordering, n_active);
    let off = dist.users(((1u64 << k) - 1) as u32 & !active)?;
    let modified = dist.with_constants(off);
    let ext = channel.extend(&modified)?;
    let mut rates = vec![0.0; k];
    for (pos, &u) in ordering[..n_active].iter().enumerate() {
        let before = ext.users(prefix_mask(ordering, pos))?;
        let uk = ext.user(u)?;
        rates[u] = mutual_info(&ext, uk, ext.output(u)?, SymbolSet::EMPTY)?
            - mutual_info(&ext, uk, before, SymbolSet::EMPTY)?;
    }
    let x = modified.bss(((1u64 << l) - 1) as u32)?;
    let need = mutual_info(&modified, modified.users(active)?, x, SymbolSet::EMPTY)?
        + total_correlation(&modified, x)?;
    Ok(Atom { weight, active: ordering[..n_active].to_vec(), rates, fronthaul: vec![need] })
}

/// Greedy corner of the decode-forward rate polytope under a sum fronthaul `C`, realized by
/// time sharing two compression schemes with a suffix of users shut off.
///
/// Instances whose rate function is not a polymatroid, or whose region is empty, are
/// returned as skipped. A weight outside `(0, 1]` is an error.
pub fn verify_theorem3_corner<C: ChannelModel>(
    dist: &C::Dist,
    channel: &C,
    c: f64,
    ordering: &[usize],
) -> Result<VerificationReport> {
    let k = dist.num_users();
    let ddf = ddf_f(dist, channel, c)?;
    let corner = greedy_corner(&ddf.f, ordering)?;
    if ddf.cap < 0.0 {
        return Ok(VerificationReport::skipped(3, ordering, "empty rate region"));
    }
    let sub = is_submodular(&ddf.f);
    if !sub.holds || !corner.is_monotone() {
        let reason = if sub.holds {
            "not a polymatroid (negative corner increment)".to_string()
        } else {
            format!("not a polymatroid (submodularity violation {:e})", sub.worst_violation)
        };
        let mut r = VerificationReport::skipped(3, ordering, reason);
        r.corner = corner.coords;
        return Ok(r);
    }

    let ext = channel.extend(dist)?;
    let info = &ddf.info;
    let prefix_marton = |n: usize| -> Result<f64> {
        if n == 0 {
            Ok(0.0)
        } else {
            marton(&ext, info, prefix_mask(ordering, n))
        }
    };
    let mut j = None;
    for n in 1..=k {
        if ddf.cap < prefix_marton(n)? - SELECT_TOL {
            j = Some(n);
            break;
        }
    }

    let mut checks: Vec<Check> = vec![slack_check("tighter_constraint", ddf.tighter_margin)];
    let (schedule, alpha) = match j {
        None => (TimeShareSchedule::mix(vec![atom(dist, channel, ordering, k, 1.0)?]), None),
        Some(j) => {
            let uj = ordering[j - 1];
            let x = ext.bss(((1u64 << ext.num_bs()) - 1) as u32)?;
            let before = ext.users(prefix_mask(ordering, j - 1))?;
            let r_j = info[uj] - mutual_info(&ext, ext.user(uj)?, before, SymbolSet::EMPTY)?;
            let t_all = total_correlation(&ext, ext.users(((1u64 << k) - 1) as u32)? | x)?;
            let t_prefix = total_correlation(&ext, ext.users(prefix_mask(ordering, j))?)?;
            let rest: f64 = ordering[j..].iter().map(|&u| info[u]).sum();
            let alpha = (t_all - t_prefix - c - rest) / r_j;
            if !(alpha > 0.0 && alpha <= 1.0 + SELECT_TOL) {
                return Err(Error::WeightOutOfRange { name: "alpha", value: alpha });
            }
            let alpha = alpha.min(1.0);
            // fronthaul increment of U_j is at least its rate increment
            let with_j = mutual_info(&ext, ext.users(prefix_mask(ordering, j))?, x, SymbolSet::EMPTY)?;
            let without_j = mutual_info(&ext, before, x, SymbolSet::EMPTY)?;
            checks.push(slack_check("fronthaul_exceeds_rate_increment", with_j - without_j - r_j));
            let atoms = vec![
                atom(dist, channel, ordering, j, 1.0 - alpha)?,
                atom(dist, channel, ordering, j - 1, alpha)?,
            ];
            (TimeShareSchedule::mix(atoms), Some(alpha))
        }
    };

    let rate_residual = schedule
        .achieved_rates
        .iter()
        .zip(&corner.coords)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let slack = c - schedule.avg_fronthaul[0];
    checks.push(residual_check("rate_residual", rate_residual));
    checks.push(slack_check("fronthaul_slack", slack));
    if let Some(a) = alpha {
        checks.push(Check { name: "alpha_in_range", value: a, pass: a > 0.0 && a <= 1.0 });
    }
    Ok(VerificationReport {
        theorem: 3,
        instance: 0,
        ordering: ordering.to_vec(),
        status: crate::verify::Status::Pass,
        reason: None,
        polymatroid: true,
        corner: corner.coords,
        j,
        weight: alpha,
        checks,
        worst_residual: rate_residual.max((-slack).max(0.0)),
        schedule: Some(schedule),
    }
    .finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiscreteChannel, DiscreteSystemDistribution};

    fn worked() -> (DiscreteSystemDistribution, DiscreteChannel) {
        // U_k = X_k, X_1 and X_2 independent uniform bits
        let mut pmf = vec![0.0; 16];
        for x1 in 0..2 {
            for x2 in 0..2 {
                pmf[x1 * 8 + x2 * 4 + x1 * 2 + x2] = 0.25;
            }
        }
        let dist = DiscreteSystemDistribution::over_users_and_bs(pmf, &[2, 2], &[2, 2]).unwrap();
        (dist, DiscreteChannel::identity(&[2, 2]).unwrap())
    }

    #[test]
    fn worked_discrete_instance() {
        let (dist, ch) = worked();
        let ddf = ddf_f(&dist, &ch, 1.0).unwrap();
        assert_eq!(ddf.f.values(), &[0.0, 1.0, 1.0, 1.0]);
        let r = verify_theorem3_corner(&dist, &ch, 1.0, &[0, 1]).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.corner, vec![1.0, 0.0]);
        assert_eq!(r.j, Some(2));
        assert!((r.weight.unwrap() - 1.0).abs() < 1e-12);
        let s = r.schedule.unwrap();
        assert!((s.avg_fronthaul[0] - 1.0).abs() < 1e-12);
        assert!((s.achieved_rates[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_fronthaul_is_pure_marton() {
        let (dist, ch) = worked();
        let r = verify_theorem3_corner(&dist, &ch, f64::INFINITY, &[1, 0]).unwrap();
        assert!(r.passed());
        assert_eq!(r.j, None);
        assert_eq!(r.corner, vec![1.0, 1.0]);
        assert_eq!(r.schedule.unwrap().atoms.len(), 1);
    }

    #[test]
    fn independent_users_give_modular_f() {
        let (dist, ch) = worked();
        let ddf = ddf_f(&dist, &ch, f64::INFINITY).unwrap();
        let f = &ddf.f;
        assert_eq!(f.value(0b11), f.value(0b01) + f.value(0b10));
    }
}
