use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Real Gaussian second hop `Y = H X + Z`, `Z ~ N(0, sigma2 I)`, per-BS power `power`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianChannel {
    h: DMatrix<f64>,
    sigma2: f64,
    power: f64,
}

impl GaussianChannel {
    pub fn new(h: DMatrix<f64>, sigma2: f64, power: f64) -> Result<Self> {
        if h.nrows() == 0 || h.ncols() == 0 {
            return Err(Error::InvalidModel("channel needs K >= 1 and L >= 1".into()));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("channel gains must be finite".into()));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidModel(format!("noise variance {sigma2} must be positive")));
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidModel(format!("power {power} must be positive")));
        }
        Ok(Self { h, sigma2, power })
    }

    /// Build from row-major rows, one row per user.
    pub fn from_rows(rows: &[Vec<f64>], sigma2: f64, power: f64) -> Result<Self> {
        let k = rows.len();
        let l = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != l) {
            return Err(Error::DimensionMismatch("ragged channel rows".into()));
        }
        let h = DMatrix::from_fn(k, l, |i, j| rows[i][j]);
        Self::new(h, sigma2, power)
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn num_users(&self) -> usize {
        self.h.nrows()
    }

    pub fn num_bs(&self) -> usize {
        self.h.ncols()
    }

    /// Same gains and noise with a different per-BS power.
    pub fn with_power(&self, power: f64) -> Result<Self> {
        Self::new(self.h.clone(), self.sigma2, power)
    }

    /// Rows of H as plain vectors.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.h.nrows())
            .map(|i| self.h.row(i).iter().copied().collect())
            .collect()
    }

    /// Squared row norm `sum_l h_{k,l}^2`.
    pub fn row_gain(&self, k: usize) -> f64 {
        self.h.row(k).norm_squared()
    }
}

/// Rayleigh-faded real channel: i.i.d. standard normal gains, pure in `(k, l, seed)`.
pub fn sample_rayleigh_channel(k: usize, l: usize, seed: u64) -> DMatrix<f64> {
    assert!(k >= 1 && l >= 1, "channel needs K >= 1 and L >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // column-major fill; the order only has to be deterministic
    DMatrix::from_fn(k, l, |_, _| StandardNormal.sample(&mut rng))
}

/// Discrete memoryless channel `p(y_1..y_K | x_1..x_L)`.
///
/// `table` has one row per joint input (row-major over `x_sizes`, last BS fastest)
/// and one column per joint output (row-major over `y_sizes`).
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteChannel {
    x_sizes: Vec<usize>,
    y_sizes: Vec<usize>,
    table: Vec<f64>,
}

impl DiscreteChannel {
    pub fn new(x_sizes: Vec<usize>, y_sizes: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if x_sizes.is_empty() || y_sizes.is_empty() {
            return Err(Error::InvalidModel("channel needs K >= 1 and L >= 1".into()));
        }
        if x_sizes.iter().chain(&y_sizes).any(|&s| s == 0) {
            return Err(Error::InvalidModel("alphabet sizes must be positive".into()));
        }
        let nx: usize = x_sizes.iter().product();
        let ny: usize = y_sizes.iter().product();
        if table.len() != nx * ny {
            return Err(Error::DimensionMismatch(format!(
                "channel table has {} entries, expected {}",
                table.len(),
                nx * ny
            )));
        }
        if table.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidModel("channel probabilities must be non-negative".into()));
        }
        for (row, slice) in table.chunks(ny).enumerate() {
            let mass: f64 = slice.iter().sum();
            if (mass - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidModel(format!(
                    "conditional slice {row} sums to {mass}"
                )));
            }
        }
        Ok(Self { x_sizes, y_sizes, table })
    }

    /// `Y_k = X_k` for K = L; every alphabet shared.
    pub fn identity(sizes: &[usize]) -> Result<Self> {
        let n: usize = sizes.iter().product();
        let mut table = vec![0.0; n * n];
        for i in 0..n {
            table[i * n + i] = 1.0;
        }
        Self::new(sizes.to_vec(), sizes.to_vec(), table)
    }

    pub fn x_sizes(&self) -> &[usize] {
        &self.x_sizes
    }

    pub fn y_sizes(&self) -> &[usize] {
        &self.y_sizes
    }

    pub fn num_users(&self) -> usize {
        self.y_sizes.len()
    }

    pub fn num_bs(&self) -> usize {
        self.x_sizes.len()
    }

    /// `p(y | x)` for flat joint indices.
    pub fn prob(&self, x_flat: usize, y_flat: usize) -> f64 {
        let ny: usize = self.y_sizes.iter().product();
        self.table[x_flat * ny + y_flat]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_is_deterministic() {
        assert_eq!(sample_rayleigh_channel(2, 2, 7), sample_rayleigh_channel(2, 2, 7));
        assert_ne!(sample_rayleigh_channel(2, 2, 7), sample_rayleigh_channel(2, 2, 8));
    }

    #[test]
    fn rayleigh_moments() {
        let mut sum = 0.0;
        let mut sq = 0.0;
        let mut n = 0.0;
        for seed in 0..2_500u64 {
            for v in sample_rayleigh_channel(4, 10, seed).iter() {
                sum += v;
                sq += v * v;
                n += 1.0;
            }
        }
        assert_eq!(n, 1e5);
        let mean = sum / n;
        let var = sq / n - mean * mean;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn rejects_bad_gaussian_parameters() {
        let h = DMatrix::identity(2, 2);
        assert!(GaussianChannel::new(h.clone(), 0.0, 1.0).is_err());
        assert!(GaussianChannel::new(h.clone(), 1.0, -1.0).is_err());
        assert!(GaussianChannel::new(DMatrix::zeros(0, 2), 1.0, 1.0).is_err());
        let mut bad = h;
        bad[(0, 1)] = f64::NAN;
        assert!(GaussianChannel::new(bad, 1.0, 1.0).is_err());
    }

    #[test]
    fn discrete_channel_validation() {
        assert!(DiscreteChannel::new(vec![2], vec![2], vec![0.5, 0.5, 1.0, 0.0]).is_ok());
        assert!(DiscreteChannel::new(vec![2], vec![2], vec![0.5, 0.4, 1.0, 0.0]).is_err());
        assert!(DiscreteChannel::new(vec![2], vec![2], vec![1.5, -0.5, 1.0, 0.0]).is_err());
        assert!(DiscreteChannel::new(vec![2], vec![2], vec![1.0, 0.0]).is_err());
        let id = DiscreteChannel::identity(&[2, 3]).unwrap();
        assert_eq!(id.prob(4, 4), 1.0);
        assert_eq!(id.prob(4, 3), 0.0);
    }
}
