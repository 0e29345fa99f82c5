use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::Symbol;

/// Relative PSD tolerance: eigenvalues down to `-PSD_REL_TOL * lambda_max` count as zero.
pub const PSD_REL_TOL: f64 = 1e-10;
/// Slack allowed on power caps.
pub const POWER_TOL: f64 = 1e-9;

/// Joint Gaussian over stacked symbols. Each symbol owns a contiguous coordinate range;
/// an empty range denotes a constant (shut-off) symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSystemDistribution {
    cov: DMatrix<f64>,
    symbols: Vec<Symbol>,
    ranges: Vec<Range<usize>>,
    power_cap: Option<f64>,
}

/// Outcome of [`GaussianSystemDistribution::validate`]. Violations are reported, not raised.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub symmetric: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `min_eigenvalue / max_eigenvalue` (1 for identity, negative on a PSD violation).
    pub psd_margin: f64,
    pub psd_ok: bool,
    pub positive_definite: bool,
    /// `cap - var(X coordinate)` for every BS coordinate, empty without a cap.
    pub power_slack: Vec<f64>,
    pub power_ok: bool,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.symmetric && self.psd_ok && self.power_ok
    }
}

impl GaussianSystemDistribution {
    /// `blocks` lists each symbol with its dimension, in coordinate order.
    pub fn new(
        cov: DMatrix<f64>,
        blocks: &[(Symbol, usize)],
        power_cap: Option<f64>,
    ) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.1).sum();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "covariance is {}x{}, blocks cover {n} coordinates",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if blocks.len() > 64 {
            return Err(Error::InvalidModel("at most 64 symbols are supported".into()));
        }
        for (i, (s, _)) in blocks.iter().enumerate() {
            if blocks[..i].iter().any(|(t, _)| t == s) {
                return Err(Error::InvalidModel(format!("duplicate symbol {s}")));
            }
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("covariance entries must be finite".into()));
        }
        let mut start = 0;
        let mut ranges = Vec::with_capacity(blocks.len());
        for &(_, d) in blocks {
            ranges.push(start..start + d);
            start += d;
        }
        // symmetrize away round-off from builders
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self {
            cov,
            symbols: blocks.iter().map(|b| b.0).collect(),
            ranges,
            power_cap,
        })
    }

    /// Scalar `U_1..U_K` followed by scalar `X_1..X_L`.
    pub fn scalar(cov: DMatrix<f64>, k: usize, l: usize, power_cap: Option<f64>) -> Result<Self> {
        let blocks: Vec<_> = (0..k)
            .map(|i| (Symbol::User(i), 1))
            .chain((0..l).map(|i| (Symbol::Bs(i), 1)))
            .collect();
        Self::new(cov, &blocks, power_cap)
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn range(&self, pos: usize) -> Range<usize> {
        self.ranges[pos].clone()
    }

    pub fn power_cap(&self) -> Option<f64> {
        self.power_cap
    }

    pub fn dim(&self) -> usize {
        self.cov.nrows()
    }

    pub fn position(&self, s: Symbol) -> Option<usize> {
        self.symbols.iter().position(|&t| t == s)
    }

    /// Coordinates covered by a set of symbol positions, in increasing order.
    pub fn coords(&self, positions: impl Iterator<Item = usize>) -> Vec<usize> {
        positions.flat_map(|p| self.ranges[p].clone()).collect()
    }

    /// Principal submatrix on the given coordinates.
    pub fn sub_cov(&self, coords: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(coords.len(), coords.len(), |i, j| self.cov[(coords[i], coords[j])])
    }

    /// Cross-covariance block between two coordinate lists.
    pub fn cross_cov(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.cov[(rows[i], cols[j])])
    }

    /// Variances of every BS coordinate, in BS order.
    pub fn bs_variances(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (pos, s) in self.symbols.iter().enumerate() {
            if matches!(s, Symbol::Bs(_)) {
                out.extend(self.ranges[pos].clone().map(|c| self.cov[(c, c)]));
            }
        }
        out
    }

    pub fn validate(&self) -> Diagnostics {
        let n = self.dim();
        let asym = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.cov[(i, j)] - self.cov[(j, i)]).abs())
            .fold(0.0, f64::max);
        let scale = self.cov.amax().max(1.0);
        let (min_eig, max_eig) = if n == 0 {
            (1.0, 1.0)
        } else {
            let eig = SymmetricEigen::new(self.cov.clone()).eigenvalues;
            (eig.min(), eig.max())
        };
        let psd_margin = if max_eig > 0.0 { min_eig / max_eig } else { min_eig };
        let power_slack: Vec<f64> = match self.power_cap {
            Some(cap) => self.bs_variances().iter().map(|v| cap - v).collect(),
            None => Vec::new(),
        };
        Diagnostics {
            symmetric: asym <= 1e-12 * scale,
            min_eigenvalue: min_eig,
            max_eigenvalue: max_eig,
            psd_margin,
            psd_ok: min_eig >= -PSD_REL_TOL * max_eig.abs(),
            positive_definite: min_eig > PSD_REL_TOL * max_eig.abs(),
            power_ok: power_slack.iter().all(|&s| s >= -POWER_TOL),
            power_slack,
        }
    }

    /// Drop the coordinates of `positions`, leaving those symbols constant.
    pub fn make_constant(&self, positions: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.symbols.len())
            .filter(|p| !positions.contains(p))
            .flat_map(|p| self.ranges[p].clone())
            .collect();
        let cov = self.sub_cov(&keep);
        let blocks = self.blocks_without(positions);
        Self::new(cov, &blocks, self.power_cap).expect("sub-covariance keeps block layout")
    }

    /// Condition on the symbols in `positions` taking a known value; they become constants.
    /// For a zero-mean Gaussian the conditional covariance does not depend on that value.
    pub fn condition_on(&self, positions: &[usize]) -> Result<Self> {
        let given: Vec<usize> = self.coords(positions.iter().copied());
        let keep: Vec<usize> = (0..self.symbols.len())
            .filter(|p| !positions.contains(p))
            .flat_map(|p| self.ranges[p].clone())
            .collect();
        let blocks = self.blocks_without(positions);
        if given.is_empty() {
            return Self::new(self.sub_cov(&keep), &blocks, self.power_cap);
        }
        let s_gg = self.sub_cov(&given);
        let s_kg = self.cross_cov(&keep, &given);
        let chol = s_gg
            .cholesky()
            .ok_or_else(|| Error::SingularBlock("conditioning block".into()))?;
        let schur = self.sub_cov(&keep) - &s_kg * chol.solve(&s_kg.transpose());
        Self::new(schur, &blocks, self.power_cap)
    }

    fn blocks_without(&self, positions: &[usize]) -> Vec<(Symbol, usize)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(p, &s)| {
                let d = if positions.contains(&p) { 0 } else { self.ranges[p].len() };
                (s, d)
            })
            .collect()
    }
}

/// Joint pmf over a product alphabet, row-major with the last symbol fastest.
/// A symbol with alphabet size 1 is a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSystemDistribution {
    pmf: Vec<f64>,
    sizes: Vec<usize>,
    symbols: Vec<Symbol>,
}

impl DiscreteSystemDistribution {
    pub fn new(pmf: Vec<f64>, blocks: &[(Symbol, usize)]) -> Result<Self> {
        if blocks.iter().any(|b| b.1 == 0) {
            return Err(Error::InvalidModel("alphabet sizes must be positive".into()));
        }
        if blocks.len() > 64 {
            return Err(Error::InvalidModel("at most 64 symbols are supported".into()));
        }
        let n: usize = blocks.iter().map(|b| b.1).product();
        if pmf.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "pmf has {} entries, alphabet product is {n}",
                pmf.len()
            )));
        }
        if pmf.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidModel("probabilities must be non-negative".into()));
        }
        let mass: f64 = pmf.iter().sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("total mass {mass} differs from 1")));
        }
        Ok(Self {
            pmf,
            sizes: blocks.iter().map(|b| b.1).collect(),
            symbols: blocks.iter().map(|b| b.0).collect(),
        })
    }

    /// Alphabets for `U_1..U_K` then `X_1..X_L`.
    pub fn over_users_and_bs(pmf: Vec<f64>, user_sizes: &[usize], bs_sizes: &[usize]) -> Result<Self> {
        let blocks: Vec<_> = user_sizes
            .iter()
            .enumerate()
            .map(|(k, &s)| (Symbol::User(k), s))
            .chain(bs_sizes.iter().enumerate().map(|(l, &s)| (Symbol::Bs(l), s)))
            .collect();
        Self::new(pmf, &blocks)
    }

    /// Normalize non-negative weights into a pmf.
    pub fn from_weights(weights: Vec<f64>, blocks: &[(Symbol, usize)]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidModel("weights must have positive mass".into()));
        }
        let mut pmf: Vec<f64> = weights.iter().map(|w| w / total).collect();
        // push the rounding residue into the largest cell so the mass is 1 to machine precision
        let residue = 1.0 - pmf.iter().sum::<f64>();
        if let Some(m) = pmf
            .iter_mut()
            .max_by(|a, b| a.partial_cmp(b).expect("finite"))
        {
            *m += residue;
        }
        Self::new(pmf, blocks)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn position(&self, s: Symbol) -> Option<usize> {
        self.symbols.iter().position(|&t| t == s)
    }

    /// Marginal pmf over the axes in `positions` (ascending), row-major in that order.
    pub fn marginal(&self, positions: &[usize]) -> Vec<f64> {
        let out_sizes: Vec<usize> = positions.iter().map(|&p| self.sizes[p]).collect();
        let out_len: usize = out_sizes.iter().product();
        let mut out = vec![0.0; out_len];
        if positions.len() == self.sizes.len() {
            out.copy_from_slice(&self.pmf);
            return out;
        }
        // strides of the kept axes inside the output tensor
        let mut out_stride = vec![0usize; self.sizes.len()];
        let mut acc = 1;
        for (i, &p) in positions.iter().enumerate().rev() {
            out_stride[p] = acc;
            acc *= out_sizes[i];
        }
        let mut idx = vec![0usize; self.sizes.len()];
        for &p in &self.pmf {
            let o: usize = idx.iter().zip(&out_stride).map(|(i, s)| i * s).sum();
            out[o] += p;
            for ax in (0..idx.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < self.sizes[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        out
    }

    /// Sum out the listed axes; those symbols become constants (alphabet size 1).
    pub fn make_constant(&self, positions: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.sizes.len()).filter(|p| !positions.contains(p)).collect();
        let pmf = self.marginal(&keep);
        let blocks: Vec<_> = self
            .symbols
            .iter()
            .enumerate()
            .map(|(p, &s)| (s, if positions.contains(&p) { 1 } else { self.sizes[p] }))
            .collect();
        Self::new(pmf, &blocks).expect("marginal of a valid pmf")
    }
}
