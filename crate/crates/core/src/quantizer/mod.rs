//! Empirical quantization of discretized measures.

pub mod bounds;
pub mod brute;
pub mod cloud;
pub mod curve;
mod kdtree;
pub mod lloyd;
pub mod logcell;

pub use bounds::{antichain_codebook, antichain_upper_bound, geometric_bound, AntichainBound};
pub use brute::{brute_force_error, candidate_grid};
pub use cloud::{antichain_cloud, discretize, discretize_with_budget, Provenance, WeightedCloud};
pub use curve::{error_curve, error_curve_on, least_squares_slope, CurveRow, ErrorCurve};
pub use lloyd::{codebook_error, codebook_objective, lloyd, lloyd_from, LloydParams, LloydResult};
