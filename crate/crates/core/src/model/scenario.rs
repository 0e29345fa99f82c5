//! JSON scenario files:
//!
//! ```json
//! {"H": [[1.0, 0.0], [0.0, 1.0]], "sigma2": 1.0, "P": 100.0, "fronthaul": {"sum": 4.0}}
//! ```
//!
//! `H` is row-major with one row per user. `fronthaul` is either `{"per_link": [...]}`
//! or `{"sum": x}` and may be omitted.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FronthaulBudget, GaussianChannel};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FronthaulSpec {
    PerLink(Vec<f64>),
    Sum(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub sigma2: f64,
    #[serde(rename = "P")]
    pub power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fronthaul: Option<FronthaulSpec>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn channel(&self) -> Result<GaussianChannel> {
        GaussianChannel::from_rows(&self.h, self.sigma2, self.power)
    }

    pub fn budget(&self) -> Result<Option<FronthaulBudget>> {
        match &self.fronthaul {
            None => Ok(None),
            Some(FronthaulSpec::PerLink(v)) => FronthaulBudget::per_link(v.clone()).map(Some),
            Some(FronthaulSpec::Sum(c)) => FronthaulBudget::sum(*c).map(Some),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_budget_forms() {
        let s = Scenario::from_json(
            r#"{"H": [[1, 0.5], [0, 1]], "sigma2": 1, "P": 100, "fronthaul": {"per_link": [1, 2]}}"#,
        )
        .unwrap();
        let ch = s.channel().unwrap();
        assert_eq!(ch.h()[(0, 1)], 0.5);
        assert_eq!(ch.h()[(1, 0)], 0.0);
        assert_eq!(s.budget().unwrap().unwrap().links(), Some(&[1.0, 2.0][..]));

        let s = Scenario::from_json(r#"{"H": [[1]], "sigma2": 2, "P": 3, "fronthaul": {"sum": 4}}"#)
            .unwrap();
        assert_eq!(s.budget().unwrap().unwrap().sum_cap(), Some(4.0));

        let s = Scenario::from_json(r#"{"H": [[1]], "sigma2": 2, "P": 3}"#).unwrap();
        assert!(s.budget().unwrap().is_none());
    }

    #[test]
    fn rejects_malformed() {
        assert!(Scenario::from_json(r#"{"H": [[1, 2], [3]], "sigma2": 1, "P": 1}"#)
            .unwrap()
            .channel()
            .is_err());
        assert!(Scenario::from_json(r#"{"H": [[1]], "sigma2": 1}"#).is_err());
    }
}
