//! Achievable rate regions, fronthaul regions and capacity bounds for the downlink
//! cloud radio access network (C-RAN), together with executable checks that
//! time-shared compression strategies reach the corner points of the distributed
//! decode-forward (DDF) regions.
//!
//! All information quantities are in bits. The Gaussian model is real-valued.

pub mod error;
pub mod experiments;
pub mod info;
pub mod model;
pub mod region;
pub mod strategies;
pub mod verify;

pub use error::{Error, Result};
