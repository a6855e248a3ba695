//! Explicit upper bounds on quantization errors from antichains: one centre
//! per approximate square.

use crate::carpet::{Carpet, PlanePoint};
use crate::error::{Error, Result};
use crate::symbolic::{build_antichain, AntichainKind, BuildOptions};

use super::cloud::antichain_cloud;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntichainBound {
    /// Number of squares (codebook size).
    pub count: u64,
    /// Upper bound on the error (`r > 0`) or on the log error (`r = 0`).
    pub bound: f64,
}

/// `(N_{j,r}, (sum mu (delta m^{-|.|})^r)^{1/r})` for `Gamma_{j,r}`.
pub fn antichain_upper_bound(carpet: &Carpet, r: f64, j: f64, budget: u64) -> Result<AntichainBound> {
    let a = build_antichain(carpet, AntichainKind::GammaJR { j, r }, BuildOptions { budget, collect_words: false })?;
    Ok(AntichainBound { count: a.stats.cardinality, bound: carpet.derived().delta * a.stats.sum_value.powf(1.0 / r) })
}

/// `(psi_j, sum mu log(delta m^{-|.|}))` for `Lambda_j`.
pub fn geometric_bound(carpet: &Carpet, j: f64, budget: u64) -> Result<AntichainBound> {
    if !carpet.derived().separated {
        return Err(Error::SeparationRequired);
    }
    let a = build_antichain(carpet, AntichainKind::Lambda0J { j }, BuildOptions { budget, collect_words: false })?;
    Ok(AntichainBound {
        count: a.stats.cardinality,
        bound: carpet.derived().delta.ln() * a.stats.sum_weight + a.stats.sum_weight_log_scale,
    })
}

/// Centres of the squares of an antichain, in tree order.
pub fn antichain_codebook(carpet: &Carpet, kind: AntichainKind, budget: u64) -> Result<Vec<PlanePoint>> {
    Ok(antichain_cloud(carpet, kind, 0, budget)?.points)
}
