//! Executable checks that time-shared compression reaches the corner points of the
//! decode-forward rate and fronthaul regions.

mod instances;
mod regions;
mod theorem3;
mod theorem4;

pub use instances::{
    random_discrete_instance, random_gaussian_instance, theorem3_batch, theorem4_batch,
    theorem4_instance, InstanceKind,
};
pub use regions::{
    compression_region_feasible, ddf_f, ddf_g, lemma1_residual, region_inclusion_check,
    DdfFunction, Feasibility, InclusionReport,
};
pub use theorem3::verify_theorem3_corner;
pub use theorem4::verify_theorem4_corner;

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Residual tolerance for verified identities, in bits.
pub const VERIFY_TOL: f64 = 1e-9;

/// Tolerance for the strict inequality that selects the time-sharing index.
pub const SELECT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub pass: bool,
}

/// One term of a time-sharing schedule: a copy of the distribution with some users or BSs
/// shut off.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub weight: f64,
    /// Active users (rate corners) or active BSs (fronthaul corners), 0-based.
    pub active: Vec<usize>,
    pub rates: Vec<f64>,
    pub fronthaul: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeShareSchedule {
    pub atoms: Vec<Atom>,
    pub achieved_rates: Vec<f64>,
    pub avg_fronthaul: Vec<f64>,
}

impl TimeShareSchedule {
    pub(crate) fn mix(atoms: Vec<Atom>) -> Self {
        let n = atoms.first().map_or(0, |a| a.rates.len());
        let m = atoms.first().map_or(0, |a| a.fronthaul.len());
        let mut achieved_rates = vec![0.0; n];
        let mut avg_fronthaul = vec![0.0; m];
        for a in &atoms {
            for (r, v) in achieved_rates.iter_mut().zip(&a.rates) {
                *r += a.weight * v;
            }
            for (c, v) in avg_fronthaul.iter_mut().zip(&a.fronthaul) {
                *c += a.weight * v;
            }
        }
        Self { atoms, achieved_rates, avg_fronthaul }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem: u8,
    pub instance: u64,
    pub ordering: Vec<usize>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub polymatroid: bool,
    pub corner: Vec<f64>,
    /// 1-based position in the ordering where time sharing starts.
    pub j: Option<usize>,
    /// `alpha` for rate corners, `beta` for fronthaul corners.
    pub weight: Option<f64>,
    pub checks: Vec<Check>,
    pub worst_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<TimeShareSchedule>,
}

impl VerificationReport {
    pub(crate) fn skipped(theorem: u8, ordering: &[usize], reason: impl Into<String>) -> Self {
        Self {
            theorem,
            instance: 0,
            ordering: ordering.to_vec(),
            status: Status::Skipped,
            reason: Some(reason.into()),
            polymatroid: false,
            corner: Vec::new(),
            j: None,
            weight: None,
            checks: Vec::new(),
            worst_residual: 0.0,
            schedule: None,
        }
    }

    pub(crate) fn failed(theorem: u8, ordering: &[usize], err: &crate::Error) -> Self {
        let mut r = Self::skipped(theorem, ordering, err.to_string());
        r.status = Status::Fail;
        r
    }

    pub(crate) fn finish(mut self) -> Self {
        self.status = if self.checks.iter().all(|c| c.pass) { Status::Pass } else { Status::Fail };
        self
    }

    pub fn with_instance(mut self, instance: u64) -> Self {
        self.instance = instance;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Writes one JSON object per line.
pub fn write_json_lines<W: Write>(mut out: W, reports: &[VerificationReport]) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub(crate) fn residual_check(name: &'static str, value: f64) -> Check {
    Check { name, value, pass: value.abs() < VERIFY_TOL }
}

pub(crate) fn slack_check(name: &'static str, value: f64) -> Check {
    Check { name, value, pass: value >= -VERIFY_TOL }
}
