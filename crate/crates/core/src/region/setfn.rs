use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{approx_eq, MAX_ENUMERATION, REGION_TOL};
use crate::error::{Error, Result};

/// Real-valued function on subsets of `{0, .., n-1}`, stored densely by bitmask.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetFunction {
    n: usize,
    values: Vec<f64>,
}

impl SetFunction {
    pub const MAX_GROUND: usize = 16;

    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > Self::MAX_GROUND {
            return Err(Error::GroundSetTooLarge(n));
        }
        if values.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "set function on {n} elements needs {} values, got {}",
                1 << n,
                values.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidModel(format!("value of the empty set is {}", values[0])));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidModel("set function value is NaN".into()));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(u32) -> f64) -> Result<Self> {
        Self::try_from_fn(n, |m| Ok(f(m)))
    }

    pub fn try_from_fn(n: usize, mut f: impl FnMut(u32) -> Result<f64>) -> Result<Self> {
        if n > Self::MAX_GROUND {
            return Err(Error::GroundSetTooLarge(n));
        }
        let values = (0..1u32 << n).map(&mut f).collect::<Result<Vec<_>>>()?;
        Self::new(n, values)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn value(&self, mask: u32) -> f64 {
        self.values[mask as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    fn negated(&self) -> Self {
        Self { n: self.n, values: self.values.iter().map(|v| -v).collect() }
    }
}

/// Result of a submodularity or supermodularity scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModularityCheck {
    pub holds: bool,
    /// Largest amount by which a marginal-gain inequality fails (0 when none does).
    pub worst_violation: f64,
}

/// Scans `F(D + i) - F(D) >= F(D' + i) - F(D')` over all `D ⊆ D'` and `i ∉ D'`.
pub fn is_submodular(f: &SetFunction) -> ModularityCheck {
    let n = f.n;
    let full = f.full_mask();
    let mut worst = 0.0f64;
    for big in 0..=full {
        // every submask of `big`, including 0
        let mut small = big;
        loop {
            for i in 0..n {
                let bit = 1u32 << i;
                if big & bit != 0 {
                    continue;
                }
                let gain_small = f.value(small | bit) - f.value(small);
                let gain_big = f.value(big | bit) - f.value(big);
                worst = worst.max(gain_big - gain_small);
            }
            if small == 0 {
                break;
            }
            small = (small - 1) & big;
        }
    }
    ModularityCheck { holds: worst <= REGION_TOL, worst_violation: worst }
}

/// Mirror of [`is_submodular`] with the inequality reversed.
pub fn is_supermodular(g: &SetFunction) -> ModularityCheck {
    is_submodular(&g.negated())
}

/// Greedy extreme point for one linear ordering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerPoint {
    /// 0-based permutation of the ground set.
    pub ordering: Vec<usize>,
    /// Coordinates indexed by ground element (not by position in the ordering).
    pub coords: Vec<f64>,
    /// Elements whose greedy increment is below `-REGION_TOL`.
    pub negative_increments: Vec<usize>,
}

impl CornerPoint {
    pub fn is_monotone(&self) -> bool {
        self.negative_increments.is_empty()
    }
}

fn check_permutation(ordering: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if ordering.len() != n {
        return Err(Error::InvalidModel(format!("ordering has {} entries, expected {n}", ordering.len())));
    }
    for &i in ordering {
        if i >= n || seen[i] {
            return Err(Error::InvalidModel(format!("{ordering:?} is not a permutation")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// `coords[i_j] = F({i_1..i_j}) - F({i_1..i_{j-1}})`.
pub fn greedy_corner(f: &SetFunction, ordering: &[usize]) -> Result<CornerPoint> {
    check_permutation(ordering, f.n)?;
    let mut coords = vec![0.0; f.n];
    let mut negative = Vec::new();
    let mut prefix = 0u32;
    for &i in ordering {
        let next = prefix | (1 << i);
        let inc = f.value(next) - f.value(prefix);
        if inc < -REGION_TOL {
            negative.push(i);
        }
        coords[i] = inc;
        prefix = next;
    }
    Ok(CornerPoint { ordering: ordering.to_vec(), coords, negative_increments: negative })
}

/// Greedy corners over every ordering (lexicographic), deduplicated within `REGION_TOL`.
pub fn enumerate_corners(f: &SetFunction) -> Result<Vec<CornerPoint>> {
    if f.n > MAX_ENUMERATION {
        return Err(Error::GroundSetTooLarge(f.n));
    }
    let orderings: Vec<Vec<usize>> = (0..f.n).permutations(f.n).collect();
    let corners = orderings
        .par_iter()
        .map(|o| greedy_corner(f, o))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<CornerPoint> = Vec::new();
    for c in corners {
        if !out.iter().any(|d| approx_eq(&d.coords, &c.coords, REGION_TOL)) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Random monotone submodular function: a non-negative mix of concave functions of
/// non-negative modular weights.
pub fn random_monotone_submodular(n: usize, seed: u64) -> SetFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = 3;
    let coef: Vec<f64> = (0..terms).map(|_| rng.random_range(0.2..2.0)).collect();
    let weights: Vec<Vec<f64>> = (0..terms)
        .map(|_| (0..n).map(|_| rng.random_range(0.0..3.0)).collect())
        .collect();
    SetFunction::from_fn(n, |mask| {
        (0..terms)
            .map(|t| {
                let w: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| weights[t][i]).sum();
                let concave = match t % 3 {
                    0 => w.sqrt(),
                    1 => w.ln_1p(),
                    _ => w.min(2.5),
                };
                coef[t] * concave
            })
            .sum()
    })
    .expect("ground set within limits")
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn toy_f() -> SetFunction {
        SetFunction::new(2, vec![0.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn submodularity_examples() {
        let c = is_submodular(&toy_f());
        assert!(c.holds && c.worst_violation == 0.0);

        let sup = SetFunction::new(2, vec![0.0, 1.0, 1.0, 3.0]).unwrap();
        let c = is_submodular(&sup);
        assert!(!c.holds);
        assert!((c.worst_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn supermodularity_examples() {
        let g = SetFunction::new(2, vec![0.0, 0.0, 1.0, 3.0]).unwrap();
        assert!(is_supermodular(&g).holds);
        let modular = SetFunction::from_fn(3, |m| [1.5, -0.5, 2.0].iter().enumerate()
            .filter(|(i, _)| m & (1 << i) != 0).map(|(_, v)| v).sum()).unwrap();
        let up = is_supermodular(&modular);
        let down = is_submodular(&modular);
        assert!(up.holds && down.holds);
        assert!(up.worst_violation < 1e-15 && down.worst_violation < 1e-15);
    }

    #[test]
    fn greedy_examples() {
        let f = toy_f();
        assert_eq!(greedy_corner(&f, &[0, 1]).unwrap().coords, vec![2.0, 2.0]);
        assert_eq!(greedy_corner(&f, &[1, 0]).unwrap().coords, vec![1.0, 3.0]);
        let g = SetFunction::new(2, vec![0.0, 0.0, 1.0, 3.0]).unwrap();
        assert_eq!(greedy_corner(&g, &[0, 1]).unwrap().coords, vec![0.0, 3.0]);
        assert!(greedy_corner(&f, &[0, 0]).is_err());
    }

    #[test]
    fn negative_increment_is_flagged() {
        let f = SetFunction::new(2, vec![0.0, 2.0, 3.0, 1.0]).unwrap();
        let c = greedy_corner(&f, &[0, 1]).unwrap();
        assert_eq!(c.negative_increments, vec![1]);
        assert!(!c.is_monotone());
    }

    #[test]
    fn enumeration_examples() {
        let corners = enumerate_corners(&toy_f()).unwrap();
        let pts: Vec<_> = corners.iter().map(|c| c.coords.clone()).collect();
        assert_eq!(pts, vec![vec![2.0, 2.0], vec![1.0, 3.0]]);

        let modular = SetFunction::from_fn(4, |m| m.count_ones() as f64 * 0.5).unwrap();
        assert_eq!(enumerate_corners(&modular).unwrap().len(), 1);

        let big = SetFunction::from_fn(9, |m| m.count_ones() as f64).unwrap();
        assert_eq!(enumerate_corners(&big), Err(Error::GroundSetTooLarge(9)));
    }

    #[test]
    fn empty_set_must_be_zero() {
        assert!(SetFunction::new(1, vec![0.5, 1.0]).is_err());
        assert!(SetFunction::new(2, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn random_functions_are_monotone_submodular() {
        for seed in 0..20 {
            let f = random_monotone_submodular(4, seed);
            assert!(is_submodular(&f).holds);
            for c in enumerate_corners(&f).unwrap() {
                assert!(c.is_monotone());
            }
        }
    }

    proptest! {
        #[test]
        fn greedy_telescopes(vals in proptest::collection::vec(-5.0f64..5.0, 7), perm_seed in 0usize..6) {
            let mut v = vec![0.0];
            v.extend(vals);
            let f = SetFunction::new(3, v).unwrap();
            let orderings: Vec<Vec<usize>> = (0..3).permutations(3).collect();
            let c = greedy_corner(&f, &orderings[perm_seed]).unwrap();
            let total: f64 = c.coords.iter().sum();
            prop_assert!((total - f.value(0b111)).abs() < 1e-12);
        }

        #[test]
        fn sub_and_super_iff_modular(vals in proptest::collection::vec(-5.0f64..5.0, 3), bump in -1.0f64..1.0) {
            let modular = SetFunction::from_fn(3, |m| (0..3).filter(|i| m & (1 << i) != 0).map(|i| vals[i]).sum()).unwrap();
            prop_assert!(is_submodular(&modular).holds && is_supermodular(&modular).holds);
            // perturbing one value of a modular function breaks one of the two
            let mut v = modular.values().to_vec();
            v[0b011] += bump;
            let f = SetFunction::new(3, v).unwrap();
            let both = is_submodular(&f).holds && is_supermodular(&f).holds;
            prop_assert_eq!(both, bump.abs() <= REGION_TOL);
        }
    }
}
