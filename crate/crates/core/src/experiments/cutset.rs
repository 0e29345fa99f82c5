use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::info::symbols::mask_members;
use crate::model::{FronthaulBudget, GaussianChannel};

const RHO_GRID: usize = 65;
const GOLDEN_ITERS: usize = 100;
const RESTARTS: usize = 20;
const MAX_SWEEPS: usize = 100;
const ASCENT_TOL: f64 = 1e-12;

/// Input covariance used in the wireless cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputPolicy {
    /// `Sigma = P I`.
    Independent,
    /// Correlated inputs, each BS at power `P`.
    Optimized,
}

fn half_log_det(m: &DMatrix<f64>) -> f64 {
    match m.clone().cholesky() {
        Some(ch) => ch.l().diagonal().iter().map(|d| d.log2()).sum(),
        None => f64::NEG_INFINITY,
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

/// `1/2 log2 |I + H_A (P R) H_A^T / sigma2|` for a correlation matrix `R`.
fn cut_value(ha: &DMatrix<f64>, snr: f64, r: &DMatrix<f64>) -> f64 {
    let k = ha.nrows();
    half_log_det(&(DMatrix::identity(k, k) + ha * r * ha.transpose() * snr))
}

fn golden_max(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if b - a < 1e-14 {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    [(lo, f(lo)), (hi, f(hi)), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

fn optimize_pair(ha: &DMatrix<f64>, snr: f64) -> f64 {
    let value = |rho: f64| cut_value(ha, snr, &DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]));
    let step = 2.0 / (RHO_GRID - 1) as f64;
    let (i, _) = (0..RHO_GRID)
        .map(|i| (i, value(-1.0 + step * i as f64)))
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let centre = -1.0 + step * i as f64;
    golden_max((centre - step).max(-1.0), (centre + step).min(1.0), value).1
}

/// Interval of `r_ij` values keeping `R` positive semidefinite, all else fixed.
fn feasible_interval(r: &DMatrix<f64>, i: usize, j: usize) -> (f64, f64) {
    let psd = |v: f64| {
        let mut m = r.clone();
        m[(i, j)] = v;
        m[(j, i)] = v;
        min_eigenvalue(&m) >= -1e-12
    };
    let edge = |outer: f64| {
        let (mut inside, mut out) = (r[(i, j)], outer);
        if psd(out) {
            return out;
        }
        for _ in 0..60 {
            let mid = 0.5 * (inside + out);
            if psd(mid) {
                inside = mid;
            } else {
                out = mid;
            }
        }
        inside
    };
    (edge(-1.0), edge(1.0))
}

fn random_correlation(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut v: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    for mut row in v.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }
    let mut r = &v * v.transpose();
    r.fill_diagonal(1.0);
    r
}

fn optimize_general(ha: &DMatrix<f64>, snr: f64) -> f64 {
    let n = ha.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best = f64::NEG_INFINITY;
    for restart in 0..RESTARTS {
        let mut r = if restart == 0 { DMatrix::identity(n, n) } else { random_correlation(n, &mut rng) };
        let mut current = cut_value(ha, snr, &r);
        for _ in 0..MAX_SWEEPS {
            let before = current;
            for i in 0..n {
                for j in i + 1..n {
                    let (lo, hi) = feasible_interval(&r, i, j);
                    let at = |v: f64| {
                        let mut m = r.clone();
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                        cut_value(ha, snr, &m)
                    };
                    let (v, f) = golden_max(lo, hi, at);
                    if f > current {
                        r[(i, j)] = v;
                        r[(j, i)] = v;
                        current = f;
                    }
                }
            }
            if current - before <= ASCENT_TOL {
                break;
            }
        }
        best = best.max(current);
    }
    best
}

/// Wireless cut `max 1/2 log2 |I + H_A Sigma H_A^T / sigma2|` for the BSs in `mask`.
pub fn wireless_cut(channel: &GaussianChannel, mask: u32, policy: InputPolicy) -> f64 {
    let cols: Vec<usize> = mask_members(mask).collect();
    if cols.is_empty() {
        return 0.0;
    }
    let ha = channel.h().select_columns(&cols);
    let snr = channel.power() / channel.sigma2();
    match (policy, cols.len()) {
        (InputPolicy::Independent, n) | (InputPolicy::Optimized, n @ 1) => {
            cut_value(&ha, snr, &DMatrix::identity(n, n))
        }
        (InputPolicy::Optimized, 2) => optimize_pair(&ha, snr),
        (InputPolicy::Optimized, _) => optimize_general(&ha, snr),
    }
}

/// Wireless cut values for every BS subset, reusable across fronthaul budgets.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSet {
    l: usize,
    wireless: Vec<f64>,
}

impl CutSet {
    pub fn new(channel: &GaussianChannel, policy: InputPolicy) -> Self {
        let l = channel.num_bs();
        let wireless = (0..1u32 << l).map(|m| wireless_cut(channel, m, policy)).collect();
        Self { l, wireless }
    }

    /// `min_S [sum_{l in S} C_l + W(S^c)]`.
    pub fn value(&self, budget: &FronthaulBudget) -> f64 {
        let full = (1u32 << self.l) - 1;
        (0..=full)
            .map(|s| budget.cut_capacity(s, self.l) + self.wireless[(full & !s) as usize])
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn cutset_sum_rate(channel: &GaussianChannel, budget: &FronthaulBudget, policy: InputPolicy) -> f64 {
    CutSet::new(channel, policy).value(budget)
}
