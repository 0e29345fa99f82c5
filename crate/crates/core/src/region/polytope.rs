use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{dedup_points, SetFunction, MAX_ORACLE_DIM, REGION_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Bound {
    /// `sum_{i in D} x_i <= F(D)` for every `D`.
    Upper,
    /// `sum_{i in D} x_i >= F(D)` for every `D`.
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polytope {
    pub function: SetFunction,
    pub bound: Bound,
    /// Also require `x >= 0`.
    pub nonneg: bool,
}

impl Polytope {
    pub fn upper(function: SetFunction, nonneg: bool) -> Self {
        Self { function, bound: Bound::Upper, nonneg }
    }

    pub fn lower(function: SetFunction, nonneg: bool) -> Self {
        Self { function, bound: Bound::Lower, nonneg }
    }

    pub fn dim(&self) -> usize {
        self.function.ground_size()
    }

    /// Checks every subset inequality (and the orthant when flagged) within `REGION_TOL`.
    pub fn contains(&self, point: &[f64]) -> bool {
        if point.len() != self.dim() {
            return false;
        }
        if self.nonneg && point.iter().any(|&x| x < -REGION_TOL) {
            return false;
        }
        (1..=self.function.full_mask()).all(|mask| {
            let s: f64 = point
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| x)
                .sum();
            let f = self.function.value(mask);
            match self.bound {
                Bound::Upper => s <= f + REGION_TOL,
                Bound::Lower => s >= f - REGION_TOL,
            }
        })
    }

    /// Halfspaces `a . x <= b`.
    fn halfspaces(&self) -> Vec<(Vec<f64>, f64)> {
        let d = self.dim();
        let sign = match self.bound {
            Bound::Upper => 1.0,
            Bound::Lower => -1.0,
        };
        let mut rows = Vec::new();
        for mask in 1..=self.function.full_mask() {
            let a = (0..d)
                .map(|i| if mask & (1 << i) != 0 { sign } else { 0.0 })
                .collect();
            rows.push((a, sign * self.function.value(mask)));
        }
        if self.nonneg {
            for i in 0..d {
                let mut a = vec![0.0; d];
                a[i] = -1.0;
                rows.push((a, 0.0));
            }
        }
        rows
    }
}

/// Brute-force vertex enumeration: solve every `d`-subset of the defining halfspaces as
/// equalities and keep the feasible solutions. Singular subsystems are skipped.
pub fn vertex_oracle(p: &Polytope) -> Result<Vec<Vec<f64>>> {
    let d = p.dim();
    if d > MAX_ORACLE_DIM {
        return Err(Error::GroundSetTooLarge(d));
    }
    if d == 0 {
        return Ok(vec![Vec::new()]);
    }
    let rows = p.halfspaces();
    let mut found = Vec::new();
    for combo in (0..rows.len()).combinations(d) {
        let a = DMatrix::from_fn(d, d, |i, j| rows[combo[i]].0[j]);
        let b = DVector::from_fn(d, |i, _| rows[combo[i]].1);
        let lu = a.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        let feasible = rows.iter().all(|(a, b)| {
            a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum::<f64>() <= b + REGION_TOL
        });
        if feasible {
            found.push(x);
        }
    }
    Ok(dedup_points(found, REGION_TOL))
}

/// True iff `sum_i w_i atom_i >= target - REGION_TOL` componentwise.
pub fn dominated_by_mixture(target: &[f64], atoms: &[(f64, Vec<f64>)]) -> Result<bool> {
    let total: f64 = atoms.iter().map(|a| a.0).sum();
    if atoms.iter().any(|a| !(a.0 >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::BadWeights);
    }
    if atoms.iter().any(|a| a.1.len() != target.len()) {
        return Err(Error::DimensionMismatch("atom and target lengths differ".into()));
    }
    Ok(target.iter().enumerate().all(|(i, t)| {
        let mix: f64 = atoms.iter().map(|(w, x)| w * x[i]).sum();
        mix >= t - REGION_TOL
    }))
}
