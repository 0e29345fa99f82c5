use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GaussianChannel, POWER_TOL};

/// Search resolution for the zero-forcing baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZfGrid {
    /// Geometric points per beam power (zero is always added).
    pub power_points: usize,
    /// Geometric points per BS quantization noise level.
    pub noise_points: usize,
}

impl Default for ZfGrid {
    fn default() -> Self {
        Self { power_points: 64, noise_points: 64 }
    }
}

impl ZfGrid {
    /// Doubles the resolution; every old grid point remains a grid point.
    pub fn refined(self) -> Self {
        Self { power_points: 2 * self.power_points - 1, noise_points: 2 * self.noise_points - 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZfPoint {
    pub rate: f64,
    pub fronthaul: f64,
    pub powers: [f64; 2],
    pub noise: [f64; 2],
    #[serde(skip)]
    index: [u32; 4],
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (i as f64) / ((n - 1) as f64) * (b - a)).exp()).collect()
}

fn better(a: &ZfPoint, b: &ZfPoint) -> bool {
    a.rate > b.rate || (a.rate == b.rate && a.index < b.index)
}

/// Every feasible grid tuple of the 2x2 zero-forcing scheme, evaluated once so a whole
/// fronthaul sweep can be answered from the same table.
pub struct ZfTable {
    points: Vec<ZfPoint>,
}

impl ZfTable {
    /// Beams are the normalized columns of `H^{-1}`; independent compression with noise
    /// levels `q_l`; per-BS power `sum_k p_k w_lk^2 + q_l <= P`.
    pub fn new(channel: &GaussianChannel, grid: ZfGrid) -> Result<Self> {
        if channel.num_users() != 2 || channel.num_bs() != 2 {
            return Err(Error::InvalidModel("zero-forcing baseline needs K = L = 2".into()));
        }
        let h = channel.h();
        let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
        let scale = h.amax();
        if !(det.abs() > 1e-12 * scale * scale) {
            return Err(Error::SingularChannel);
        }
        let inv = h.clone().try_inverse().ok_or(Error::SingularChannel)?;
        let p = channel.power();
        let s2 = channel.sigma2();
        // beam k: unit-norm column k of H^{-1}; effective gain h_k . w_k
        let mut w = [[0.0; 2]; 2];
        let mut gain = [0.0; 2];
        for k in 0..2 {
            let col = inv.column(k);
            let n = col.norm();
            for l in 0..2 {
                w[l][k] = col[l] / n;
            }
            gain[k] = (h.row(k) * col)[(0, 0)].powi(2) / (n * n);
        }
        let powers: Vec<Vec<f64>> = (0..2)
            .map(|k| {
                let cap = p / w[0][k].powi(2).max(w[1][k].powi(2));
                let mut g = vec![0.0];
                g.extend(geometric(1e-4, 1.0 - 1e-8, grid.power_points).into_iter().map(|x| x * cap));
                g
            })
            .collect();
        let noise = geometric(1e-8 * p, 1e3 * p, grid.noise_points);
        let hq: Vec<[f64; 2]> = (0..2).map(|k| [h[(k, 0)].powi(2), h[(k, 1)].powi(2)]).collect();

        let points = (0..powers[0].len())
            .into_par_iter()
            .flat_map_iter(|i0| {
                let mut out = Vec::new();
                for (i1, &p1) in powers[1].iter().enumerate() {
                    let p0 = powers[0][i0];
                    let load = [
                        p0 * w[0][0].powi(2) + p1 * w[0][1].powi(2),
                        p0 * w[1][0].powi(2) + p1 * w[1][1].powi(2),
                    ];
                    if load[0] > p + POWER_TOL || load[1] > p + POWER_TOL {
                        continue;
                    }
                    for (j0, &q0) in noise.iter().enumerate() {
                        if load[0] + q0 > p + POWER_TOL {
                            break;
                        }
                        for (j1, &q1) in noise.iter().enumerate() {
                            if load[1] + q1 > p + POWER_TOL {
                                break;
                            }
                            let pw = [p0, p1];
                            let rate: f64 = (0..2)
                                .map(|k| {
                                    let n = hq[k][0] * q0 + hq[k][1] * q1 + s2;
                                    0.5 * (1.0 + pw[k] * gain[k] / n).log2()
                                })
                                .sum();
                            let fronthaul = 0.5 * (1.0 + load[0] / q0).log2() + 0.5 * (1.0 + load[1] / q1).log2();
                            out.push(ZfPoint {
                                rate,
                                fronthaul,
                                powers: pw,
                                noise: [q0, q1],
                                index: [i0 as u32, i1 as u32, j0 as u32, j1 as u32],
                            });
                        }
                    }
                }
                out
            })
            .collect();
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Best sum rate for each capacity in `c_grid` (sorted ascending) with `C_1 + C_2 <= C`.
    pub fn sweep(&self, c_grid: &[f64]) -> Vec<ZfPoint> {
        let n = c_grid.len();
        let empty = ZfPoint { rate: 0.0, fronthaul: 0.0, powers: [0.0; 2], noise: [0.0; 2], index: [u32::MAX; 4] };
        let reduce = |mut acc: Vec<Option<ZfPoint>>, other: Vec<Option<ZfPoint>>| {
            for (a, b) in acc.iter_mut().zip(other) {
                if let Some(b) = b {
                    if a.as_ref().is_none_or(|a| better(&b, a)) {
                        *a = Some(b);
                    }
                }
            }
            acc
        };
        let buckets = self
            .points
            .par_iter()
            .fold(
                || vec![None; n],
                |mut acc: Vec<Option<ZfPoint>>, pt| {
                    let b = c_grid.partition_point(|&c| c < pt.fronthaul);
                    if b < n && acc[b].as_ref().is_none_or(|a| better(pt, a)) {
                        acc[b] = Some(*pt);
                    }
                    acc
                },
            )
            .reduce(|| vec![None; n], reduce);
        let mut best = empty;
        buckets
            .into_iter()
            .map(|b| {
                if let Some(b) = b {
                    if better(&b, &best) {
                        best = b;
                    }
                }
                best
            })
            .collect()
    }
}

/// Best zero-forcing sum rate at a single sum fronthaul `C`.
pub fn zf_baseline(channel: &GaussianChannel, c: f64, grid: ZfGrid) -> Result<ZfPoint> {
    Ok(ZfTable::new(channel, grid)?.sweep(&[c])[0])
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;

    fn eye() -> GaussianChannel {
        GaussianChannel::new(DMatrix::identity(2, 2), 1.0, 100.0).unwrap()
    }

    #[test]
    fn infinite_fronthaul_limit() {
        let r = zf_baseline(&eye(), f64::INFINITY, ZfGrid::default()).unwrap();
        assert!((r.rate - 101f64.log2()).abs() < 1e-4, "{}", r.rate);
    }

    #[test]
    fn zero_fronthaul_gives_zero() {
        assert_eq!(zf_baseline(&eye(), 0.0, ZfGrid::default()).unwrap().rate, 0.0);
    }

    #[test]
    fn refinement_never_hurts() {
        let ch = GaussianChannel::from_rows(&[vec![1.2, -0.4], vec![0.7, 0.9]], 1.0, 100.0).unwrap();
        let grid = ZfGrid { power_points: 9, noise_points: 9 };
        let cs = [0.5, 1.0, 2.0, 4.0, 8.0];
        let coarse = ZfTable::new(&ch, grid).unwrap().sweep(&cs);
        let fine = ZfTable::new(&ch, grid.refined()).unwrap().sweep(&cs);
        for (a, b) in coarse.iter().zip(&fine) {
            assert!(b.rate >= a.rate);
            assert!(a.fronthaul <= 8.0);
        }
        for w in coarse.windows(2) {
            assert!(w[1].rate >= w[0].rate);
        }
    }

    #[test]
    fn sweep_respects_budget_and_power() {
        let ch = GaussianChannel::from_rows(&[vec![1.2, -0.4], vec![0.7, 0.9]], 1.0, 100.0).unwrap();
        let cs = [0.3, 3.0];
        for (c, pt) in cs.iter().zip(ZfTable::new(&ch, ZfGrid { power_points: 16, noise_points: 16 }).unwrap().sweep(&cs)) {
            assert!(pt.fronthaul <= *c);
            assert!(pt.rate > 0.0);
        }
    }

    #[test]
    fn singular_channel_rejected() {
        let ch = GaussianChannel::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1.0, 100.0).unwrap();
        assert!(matches!(zf_baseline(&ch, 1.0, ZfGrid::default()), Err(Error::SingularChannel)));
    }
}
