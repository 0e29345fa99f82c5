use std::f64::consts::{E, LN_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};

use super::symbols::{mask_members, Symbol, SymbolSet};
use crate::error::{Error, Result};
use crate::model::{
    DiscreteChannel, DiscreteSystemDistribution, GaussianChannel, GaussianSystemDistribution,
    PSD_REL_TOL,
};

/// Pre-clamp values down to `-CLAMP_TOL` bits are treated as round-off and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-9;

/// Determinants at or below this value are singular.
const MIN_DET: f64 = 1e-300;

/// Joint distribution whose information measures can be evaluated exactly. All values are
/// in bits. Constant symbols (empty Gaussian block, unit discrete alphabet) carry zero entropy.
pub trait JointDistribution {
    fn symbol_list(&self) -> &[Symbol];

    /// Joint (differential) entropy of the symbols in `set`; zero for the empty set.
    fn entropy(&self, set: SymbolSet) -> Result<f64>;

    /// Same distribution with the symbols in `set` replaced by constants.
    fn with_constants(&self, set: SymbolSet) -> Self
    where
        Self: Sized;

    /// `I(A; B | C)` before clamping.
    fn mutual_info_raw(&self, a: SymbolSet, b: SymbolSet, given: SymbolSet) -> Result<f64> {
        if !a.is_disjoint(b) {
            return Err(Error::DisjointnessViolated);
        }
        let ac = a | given;
        let bc = b | given;
        Ok(self.entropy(ac)? + self.entropy(bc)? - self.entropy(given)? - self.entropy(ac | bc)?)
    }

    /// `sum_{s in A} H(s) - H(A)` before clamping.
    fn total_correlation_raw(&self, a: SymbolSet) -> Result<f64> {
        let mut marginals = 0.0;
        for p in a.positions() {
            marginals += self.entropy(SymbolSet::singleton(p))?;
        }
        Ok(marginals - self.entropy(a)?)
    }

    fn position(&self, s: Symbol) -> Option<usize> {
        self.symbol_list().iter().position(|&t| t == s)
    }

    fn set_of(&self, syms: &[Symbol]) -> Result<SymbolSet> {
        syms.iter()
            .map(|&s| {
                self.position(s)
                    .map(SymbolSet::singleton)
                    .ok_or_else(|| Error::DimensionMismatch(format!("distribution has no symbol {s}")))
            })
            .collect()
    }

    fn user(&self, k: usize) -> Result<SymbolSet> {
        self.set_of(&[Symbol::User(k)])
    }

    fn bs(&self, l: usize) -> Result<SymbolSet> {
        self.set_of(&[Symbol::Bs(l)])
    }

    fn output(&self, k: usize) -> Result<SymbolSet> {
        self.set_of(&[Symbol::Output(k)])
    }

    /// Users in the bitmask `mask`.
    fn users(&self, mask: u32) -> Result<SymbolSet> {
        let syms: Vec<_> = mask_members(mask).map(Symbol::User).collect();
        self.set_of(&syms)
    }

    /// Base stations in the bitmask `mask`.
    fn bss(&self, mask: u32) -> Result<SymbolSet> {
        let syms: Vec<_> = mask_members(mask).map(Symbol::Bs).collect();
        self.set_of(&syms)
    }

    fn num_users(&self) -> usize {
        self.symbol_list().iter().filter(|s| matches!(s, Symbol::User(_))).count()
    }

    fn num_bs(&self) -> usize {
        self.symbol_list().iter().filter(|s| matches!(s, Symbol::Bs(_))).count()
    }

    fn has_outputs(&self) -> bool {
        self.symbol_list().iter().any(|s| matches!(s, Symbol::Output(_)))
    }
}

/// Clamp a raw information value to be non-negative, rejecting values below `-CLAMP_TOL`.
pub fn clamp_audited(raw: f64) -> Result<f64> {
    if raw < -CLAMP_TOL {
        Err(Error::NegativeInformation { raw })
    } else {
        Ok(raw.max(0.0))
    }
}

/// `I(A; B | given)` in bits, clamped at zero.
pub fn mutual_info<D: JointDistribution + ?Sized>(
    dist: &D,
    a: SymbolSet,
    b: SymbolSet,
    given: SymbolSet,
) -> Result<f64> {
    clamp_audited(dist.mutual_info_raw(a, b, given)?)
}

/// Total correlation `T(A)` in bits, clamped at zero.
pub fn total_correlation<D: JointDistribution + ?Sized>(dist: &D, a: SymbolSet) -> Result<f64> {
    clamp_audited(dist.total_correlation_raw(a)?)
}

/// Differential entropy of a Gaussian symbol set, `1/2 log2((2 pi e)^n det Sigma_A)`.
pub fn gaussian_entropy(dist: &GaussianSystemDistribution, a: SymbolSet) -> Result<f64> {
    dist.entropy(a)
}

/// `log2 det` of a symmetric positive definite matrix via its eigenvalues.
pub fn log2_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let max = eig.max();
    let min = eig.min();
    if !(max > 0.0) || !(min > PSD_REL_TOL * max) {
        return Err(Error::SingularBlock(format!(
            "eigenvalue range [{min:e}, {max:e}]"
        )));
    }
    let ln_det: f64 = eig.iter().map(|v| v.ln()).sum();
    if ln_det <= MIN_DET.ln() {
        return Err(Error::SingularBlock(format!("determinant e^{ln_det}")));
    }
    Ok(ln_det / LN_2)
}

impl GaussianSystemDistribution {
    fn log2_det(&self, set: SymbolSet) -> Result<f64> {
        let coords = self.coords(set.positions());
        log2_det_spd(&self.sub_cov(&coords))
    }

    fn n_coords(&self, set: SymbolSet) -> usize {
        set.positions().map(|p| self.range(p).len()).sum()
    }
}

impl JointDistribution for GaussianSystemDistribution {
    fn symbol_list(&self) -> &[Symbol] {
        self.symbols()
    }

    fn entropy(&self, set: SymbolSet) -> Result<f64> {
        let n = self.n_coords(set) as f64;
        Ok(0.5 * (n * (2.0 * PI * E).log2() + self.log2_det(set)?))
    }

    fn with_constants(&self, set: SymbolSet) -> Self {
        self.make_constant(&set.positions().collect::<Vec<_>>())
    }

    // log-det differences directly; the (2 pi e)^n factors cancel
    fn mutual_info_raw(&self, a: SymbolSet, b: SymbolSet, given: SymbolSet) -> Result<f64> {
        if !a.is_disjoint(b) {
            return Err(Error::DisjointnessViolated);
        }
        let ac = a | given;
        let bc = b | given;
        Ok(0.5
            * (self.log2_det(ac)? + self.log2_det(bc)?
                - self.log2_det(given)?
                - self.log2_det(ac | bc)?))
    }

    fn total_correlation_raw(&self, a: SymbolSet) -> Result<f64> {
        let mut marginals = 0.0;
        for p in a.positions() {
            marginals += self.log2_det(SymbolSet::singleton(p))?;
        }
        Ok(0.5 * (marginals - self.log2_det(a)?))
    }
}

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn shannon_entropy(pmf: &[f64]) -> f64 {
    -pmf.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

impl JointDistribution for DiscreteSystemDistribution {
    fn symbol_list(&self) -> &[Symbol] {
        self.symbols()
    }

    fn entropy(&self, set: SymbolSet) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let positions: Vec<usize> = set.positions().collect();
        if positions.iter().any(|&p| p >= self.sizes().len()) {
            return Err(Error::DimensionMismatch("symbol set outside the distribution".into()));
        }
        Ok(shannon_entropy(&self.marginal(&positions)))
    }

    fn with_constants(&self, set: SymbolSet) -> Self {
        self.make_constant(&set.positions().collect::<Vec<_>>())
    }
}

/// A second-hop channel that can append `Y_1..Y_K` to a system distribution.
pub trait ChannelModel {
    type Dist: JointDistribution + Clone;

    fn num_users(&self) -> usize;
    fn num_bs(&self) -> usize;

    /// Adjoin the channel outputs; `U -> X -> Y` holds by construction.
    fn extend(&self, dist: &Self::Dist) -> Result<Self::Dist>;
}

fn check_no_outputs(symbols: &[Symbol]) -> Result<()> {
    if symbols.iter().any(|s| matches!(s, Symbol::Output(_))) {
        return Err(Error::DimensionMismatch("distribution already carries outputs".into()));
    }
    Ok(())
}

impl ChannelModel for GaussianChannel {
    type Dist = GaussianSystemDistribution;

    fn num_users(&self) -> usize {
        GaussianChannel::num_users(self)
    }

    fn num_bs(&self) -> usize {
        GaussianChannel::num_bs(self)
    }

    /// `Y = H X + Z` with `Z ~ N(0, sigma2 I)` independent of everything else.
    fn extend(&self, dist: &GaussianSystemDistribution) -> Result<GaussianSystemDistribution> {
        check_no_outputs(dist.symbols())?;
        let l = self.num_bs();
        let k = self.num_users();
        let mut x_coords = Vec::with_capacity(l);
        for b in 0..l {
            let pos = dist.position(Symbol::Bs(b)).ok_or_else(|| {
                Error::DimensionMismatch(format!("distribution lacks X{}", b + 1))
            })?;
            let r = dist.range(pos);
            if r.len() != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "X{} has dimension {}, expected a single antenna",
                    b + 1,
                    r.len()
                )));
            }
            x_coords.push(r.start);
        }
        if dist.num_bs() != l {
            return Err(Error::DimensionMismatch("extra base stations in distribution".into()));
        }
        let n = dist.dim();
        let all: Vec<usize> = (0..n).collect();
        let h = self.h();
        // Cov(Y, V) = H Cov(X, V)
        let cov_xv = dist.cross_cov(&x_coords, &all);
        let cov_yv = h * &cov_xv;
        let cov_xx = dist.sub_cov(&x_coords);
        let cov_yy = h * cov_xx * h.transpose() + DMatrix::identity(k, k) * self.sigma2();
        let mut cov = DMatrix::zeros(n + k, n + k);
        cov.view_mut((0, 0), (n, n)).copy_from(dist.cov());
        cov.view_mut((n, 0), (k, n)).copy_from(&cov_yv);
        cov.view_mut((0, n), (n, k)).copy_from(&cov_yv.transpose());
        cov.view_mut((n, n), (k, k)).copy_from(&cov_yy);
        let mut blocks: Vec<(Symbol, usize)> = dist
            .symbols()
            .iter()
            .enumerate()
            .map(|(p, &s)| (s, dist.range(p).len()))
            .collect();
        blocks.extend((0..k).map(|i| (Symbol::Output(i), 1)));
        GaussianSystemDistribution::new(cov, &blocks, dist.power_cap())
    }
}

impl ChannelModel for DiscreteChannel {
    type Dist = DiscreteSystemDistribution;

    fn num_users(&self) -> usize {
        DiscreteChannel::num_users(self)
    }

    fn num_bs(&self) -> usize {
        DiscreteChannel::num_bs(self)
    }

    /// `p(u, x, y) = p(u, x) p(y | x)`.
    fn extend(&self, dist: &DiscreteSystemDistribution) -> Result<DiscreteSystemDistribution> {
        check_no_outputs(dist.symbols())?;
        let l = self.num_bs();
        if dist.num_bs() != l {
            return Err(Error::DimensionMismatch("base station count differs from channel".into()));
        }
        let mut x_axes = Vec::with_capacity(l);
        for b in 0..l {
            let pos = dist.position(Symbol::Bs(b)).ok_or_else(|| {
                Error::DimensionMismatch(format!("distribution lacks X{}", b + 1))
            })?;
            if dist.sizes()[pos] != self.x_sizes()[b] {
                return Err(Error::DimensionMismatch(format!(
                    "X{} alphabet {} differs from channel input alphabet {}",
                    b + 1,
                    dist.sizes()[pos],
                    self.x_sizes()[b]
                )));
            }
            x_axes.push(pos);
        }
        let sizes = dist.sizes();
        let ny: usize = self.y_sizes().iter().product();
        let mut pmf = Vec::with_capacity(dist.pmf().len() * ny);
        let mut idx = vec![0usize; sizes.len()];
        for &p in dist.pmf() {
            let x_flat = x_axes
                .iter()
                .zip(self.x_sizes())
                .fold(0, |acc, (&ax, &s)| acc * s + idx[ax]);
            for y in 0..ny {
                pmf.push(p * self.prob(x_flat, y));
            }
            for ax in (0..idx.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < sizes[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        let mut blocks: Vec<(Symbol, usize)> =
            dist.symbols().iter().copied().zip(sizes.iter().copied()).collect();
        blocks.extend(self.y_sizes().iter().enumerate().map(|(k, &s)| (Symbol::Output(k), s)));
        DiscreteSystemDistribution::new(pmf, &blocks)
    }
}

/// Free-function form of [`ChannelModel::extend`].
pub fn channel_extend<C: ChannelModel>(dist: &C::Dist, channel: &C) -> Result<C::Dist> {
    channel.extend(dist)
}
