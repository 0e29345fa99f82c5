//! Set-function description of rate and fronthaul polytopes.
//!
//! An upper-bounded polytope `{r : sum_{k in D} r_k <= f(D)}` is a polymatroid when `f` is
//! submodular and monotone; a lower-bounded one `{c : sum_{l in S} c_l >= g(S)}` is a
//! contra-polymatroid when `g` is supermodular. In both cases the extreme points are
//! produced by the greedy rule over linear orderings of the ground set.

mod polytope;
mod setfn;

pub use polytope::{dominated_by_mixture, vertex_oracle, Bound, Polytope};
pub use setfn::{
    enumerate_corners, greedy_corner, is_submodular, is_supermodular, random_monotone_submodular,
    CornerPoint, ModularityCheck, SetFunction,
};

/// Feasibility and deduplication tolerance, in bits.
pub const REGION_TOL: f64 = 1e-9;

/// Largest ground set for corner enumeration (`n!` orderings).
pub const MAX_ENUMERATION: usize = 8;

/// Largest dimension for the brute-force vertex oracle.
pub const MAX_ORACLE_DIM: usize = 4;

pub(crate) fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

pub(crate) fn dedup_points(points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| approx_eq(q, &p, tol)) {
            out.push(p);
        }
    }
    out
}
