//! Cut-set bound, fronthaul sweeps and Monte-Carlo gap audits.

mod cutset;
mod gap;
mod sweep;

pub use cutset::{cutset_sum_rate, wireless_cut, CutSet, InputPolicy};
pub use gap::{gap_montecarlo, CGrid, GapConfig, GapSummary, RegimeStats, GAP_TOL};
pub use sweep::{default_c_grid, fig2_sweep, write_sweep_csv, SweepResult, CSV_HEADER, SWEEP_TOL};
