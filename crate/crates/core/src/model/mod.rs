//! Channel and distribution data model.

mod budget;
mod channel;
mod distribution;
mod scenario;

pub use budget::FronthaulBudget;
pub use channel::{sample_rayleigh_channel, DiscreteChannel, GaussianChannel};
pub use distribution::{
    Diagnostics, DiscreteSystemDistribution, GaussianSystemDistribution, POWER_TOL, PSD_REL_TOL,
};
pub use scenario::{FronthaulSpec, Scenario};
