//! Exact entropy, mutual information and total correlation for Gaussian and discrete
//! system distributions.

mod measures;
pub mod symbols;

pub use measures::{
    channel_extend, clamp_audited, gaussian_entropy, log2_det_spd, mutual_info, shannon_entropy,
    total_correlation, ChannelModel, JointDistribution, CLAMP_TOL,
};
pub use symbols::{Symbol, SymbolSet};
