use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::symbols::mask_members;

/// Fronthaul capacities in bits per channel use. `f64::INFINITY` is allowed and
/// stands for an unlimited link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FronthaulBudget {
    per_link: Option<Vec<f64>>,
    sum_cap: Option<f64>,
}

impl FronthaulBudget {
    pub fn new(per_link: Option<Vec<f64>>, sum_cap: Option<f64>) -> Result<Self> {
        if per_link.is_none() && sum_cap.is_none() {
            return Err(Error::InvalidModel("fronthaul budget needs per-link or sum capacities".into()));
        }
        let bad = |c: &f64| c.is_nan() || *c < 0.0;
        if per_link.iter().flatten().any(bad) || sum_cap.iter().any(bad) {
            return Err(Error::InvalidModel("fronthaul capacities must be non-negative".into()));
        }
        Ok(Self { per_link, sum_cap })
    }

    pub fn per_link(caps: Vec<f64>) -> Result<Self> {
        Self::new(Some(caps), None)
    }

    pub fn sum(cap: f64) -> Result<Self> {
        Self::new(None, Some(cap))
    }

    pub fn unlimited() -> Self {
        Self { per_link: None, sum_cap: Some(f64::INFINITY) }
    }

    pub fn links(&self) -> Option<&[f64]> {
        self.per_link.as_deref()
    }

    pub fn sum_cap(&self) -> Option<f64> {
        self.sum_cap
    }

    /// Upper bound on `sum_{l in S} C_l` for the BS subset `mask` of `l` stations.
    ///
    /// Under a pure sum budget only the full set is constrained; every proper subset
    /// can be given as much of the budget as it needs, so it reports `+inf`.
    pub fn cut_capacity(&self, mask: u32, l: usize) -> f64 {
        let full = mask == crate::info::symbols::full_mask(l);
        let mut cap = f64::INFINITY;
        if let Some(links) = &self.per_link {
            cap = mask_members(mask).map(|i| links[i]).sum();
        }
        if full {
            if let Some(s) = self.sum_cap {
                cap = cap.min(s);
            }
        }
        if mask == 0 {
            0.0
        } else {
            cap
        }
    }

    pub fn check_links(&self, l: usize) -> Result<()> {
        match &self.per_link {
            Some(v) if v.len() != l => Err(Error::DimensionMismatch(format!(
                "budget lists {} links, system has {l} base stations",
                v.len()
            ))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_capacities() {
        let b = FronthaulBudget::per_link(vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(b.cut_capacity(0b000, 3), 0.0);
        assert_eq!(b.cut_capacity(0b101, 3), 5.0);
        assert_eq!(b.cut_capacity(0b111, 3), 7.0);

        let s = FronthaulBudget::sum(3.0).unwrap();
        assert_eq!(s.cut_capacity(0b01, 2), f64::INFINITY);
        assert_eq!(s.cut_capacity(0b11, 2), 3.0);

        let both = FronthaulBudget::new(Some(vec![2.0, 2.0]), Some(3.0)).unwrap();
        assert_eq!(both.cut_capacity(0b11, 2), 3.0);
        assert_eq!(both.cut_capacity(0b10, 2), 2.0);
    }

    #[test]
    fn rejects_empty_or_negative() {
        assert!(FronthaulBudget::new(None, None).is_err());
        assert!(FronthaulBudget::per_link(vec![1.0, -0.5]).is_err());
        assert!(FronthaulBudget::sum(f64::NAN).is_err());
        assert!(FronthaulBudget::sum(f64::INFINITY).is_ok());
    }
}
