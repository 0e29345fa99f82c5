use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::cutset::{CutSet, InputPolicy};
use crate::error::{Error, Result};
use crate::model::{FronthaulBudget, GaussianChannel};
use crate::strategies::{
    constant_gap_distribution, sum_fronthaul_threshold, sum_rate_compression_scaled, sum_rate_ddf,
    ZfGrid, ZfTable,
};

pub const CSV_HEADER: [&str; 8] = ["C", "R_zf", "R_ddf", "R_com", "cutset", "gap_com", "gamma", "seed"];

/// Monotonicity and bound slack for sweep columns.
pub const SWEEP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    #[serde(rename = "C")]
    pub c: f64,
    /// NaN unless K = L = 2.
    #[serde(rename = "R_zf")]
    pub r_zf: f64,
    #[serde(rename = "R_ddf")]
    pub r_ddf: f64,
    #[serde(rename = "R_com")]
    pub r_com: f64,
    pub cutset: f64,
    pub gap_com: f64,
    pub gamma: f64,
    pub seed: u64,
}

/// `n` log-spaced sum fronthaul values on `[0.1, 1.5 x threshold]`.
pub fn default_c_grid(channel: &GaussianChannel, n: usize) -> Vec<f64> {
    let lo = 0.1f64;
    let hi = (1.5 * sum_fronthaul_threshold(channel)).max(lo);
    log_grid(lo, hi, n)
}

pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

fn check_monotone(rows: &[SweepResult]) -> Result<()> {
    let columns: [(&'static str, fn(&SweepResult) -> f64); 5] = [
        ("R_zf", |r| r.r_zf),
        ("R_ddf", |r| r.r_ddf),
        ("R_com", |r| r.r_com),
        ("cutset", |r| r.cutset),
        ("gamma", |r| r.gamma),
    ];
    for w in rows.windows(2) {
        for (name, get) in &columns {
            let (a, b) = (get(&w[0]), get(&w[1]));
            if b < a - SWEEP_TOL {
                return Err(Error::NonMonotone { column: name, c: w[1].c });
            }
        }
    }
    Ok(())
}

/// Sum rates of zero forcing, decode-forward and compression against the cut-set bound
/// (optimized inputs) over an ascending grid of sum fronthaul values.
pub fn fig2_sweep(channel: &GaussianChannel, c_grid: &[f64], grid: ZfGrid, seed: u64) -> Result<Vec<SweepResult>> {
    if c_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidModel("C grid must be ascending".into()));
    }
    let zf: Vec<f64> = if channel.num_users() == 2 && channel.num_bs() == 2 {
        ZfTable::new(channel, grid)?.sweep(c_grid).iter().map(|p| p.rate).collect()
    } else {
        vec![f64::NAN; c_grid.len()]
    };
    let cut = CutSet::new(channel, InputPolicy::Optimized);
    let dist = constant_gap_distribution(channel);
    let rows = c_grid
        .par_iter()
        .zip(zf)
        .map(|(&c, r_zf)| {
            let budget = FronthaulBudget::sum(c)?;
            let com = sum_rate_compression_scaled(channel, c)?;
            let r_ddf = sum_rate_ddf(&dist, channel, &budget)?;
            let cutset = cut.value(&budget);
            Ok(SweepResult {
                c,
                r_zf,
                r_ddf,
                r_com: com.rate,
                cutset,
                gap_com: cutset - com.rate,
                gamma: com.gamma,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    check_monotone(&rows)?;
    for r in &rows {
        let best = r.r_com.max(r.r_ddf).max(if r.r_zf.is_nan() { 0.0 } else { r.r_zf });
        if best > r.cutset + SWEEP_TOL {
            return Err(Error::IdentityFailed { what: "achievable rate above cut-set bound", residual: best - r.cutset });
        }
    }
    Ok(rows)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the header row and one row per result, reals at 17 significant digits.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            fmt(r.c),
            fmt(r.r_zf),
            fmt(r.r_ddf),
            fmt(r.r_com),
            fmt(r.cutset),
            fmt(r.gap_com),
            fmt(r.gamma),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;

    fn eye() -> GaussianChannel {
        GaussianChannel::new(DMatrix::identity(2, 2), 1.0, 100.0).unwrap()
    }

    fn coarse() -> ZfGrid {
        ZfGrid { power_points: 16, noise_points: 16 }
    }

    #[test]
    fn grid_spans_both_regimes() {
        let g = default_c_grid(&eye(), 64);
        assert_eq!(g.len(), 64);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!((g[63] - 1.5 * 101f64.log2()).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn identity_sweep_regimes() {
        let thr = 101f64.log2();
        let rows = fig2_sweep(&eye(), &default_c_grid(&eye(), 24), coarse(), 0).unwrap();
        for r in &rows {
            assert!(r.gap_com >= -SWEEP_TOL);
            assert!(r.gap_com <= 2.0);
            if r.c < thr {
                assert!(r.gap_com <= 1.0);
                assert!(r.r_com >= r.r_ddf - SWEEP_TOL);
            } else {
                assert!((r.r_com - r.r_ddf).abs() < 1e-9);
                assert_eq!(r.gamma, 1.0);
            }
        }
    }

    #[test]
    fn three_by_three_has_no_zf_column() {
        let ch = GaussianChannel::new(DMatrix::identity(3, 3), 1.0, 10.0).unwrap();
        let rows = fig2_sweep(&ch, &[0.5, 2.0], coarse(), 0).unwrap();
        assert!(rows.iter().all(|r| r.r_zf.is_nan()));
    }

    #[test]
    fn rejects_unsorted_grid() {
        assert!(fig2_sweep(&eye(), &[2.0, 1.0], coarse(), 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = fig2_sweep(&eye(), &[4.0], coarse(), 9).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "C,R_zf,R_ddf,R_com,cutset,gap_com,gamma,seed");
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[0], "4.0000000000000000e0");
        assert_eq!(fields[7], "9");
        let gamma: f64 = fields[6].parse().unwrap();
        assert_eq!(gamma, rows[0].gamma);
        assert!((gamma - 0.15).abs() < 1e-9);
    }
}
