//! Row constants deciding whether the main dimension formulas are sharp.

use crate::carpet::Carpet;
use crate::error::Result;
use crate::sum::csum;

use super::{s0, solve_sr, solve_tr};

/// Default tolerance for declaring per-row constants equal.
pub const CONDITION_TOL: f64 = 1e-9;

/// Per-row constants (in `gy` order) and whether they coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    pub values: Vec<f64>,
    pub equal: bool,
}

impl ConditionRow {
    fn new(values: Vec<f64>, tol: f64) -> Self {
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        ConditionRow { equal: max - min < tol, values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimReport {
    pub r: f64,
    pub s0: f64,
    /// `s_r`; equals `s0` when `r = 0`.
    pub sr: f64,
    /// `t_r`; equals `s0` when `r = 0`.
    pub tr: f64,
    /// `sr / (sr + r)`.
    pub kappa: f64,
    /// `C_{j,r} = q_j^{-kappa} sum_i p_ij^kappa`; only for `r > 0`.
    pub condition_a: Option<ConditionRow>,
    /// `C_j = q_j^{-1} sum_i p_ij log(p_ij / q_j)`.
    pub condition_b: ConditionRow,
    /// The row marginals `q_j`.
    pub condition_c: ConditionRow,
    /// Common value of the `C_{j,r}` when they coincide.
    pub pi_r: Option<f64>,
}

pub fn condition_report(carpet: &Carpet, r: f64) -> Result<DimReport> {
    condition_report_with_tol(carpet, r, CONDITION_TOL)
}

pub fn condition_report_with_tol(carpet: &Carpet, r: f64, tol: f64) -> Result<DimReport> {
    let s0 = s0(carpet);
    let (sr, tr) = if r == 0.0 { (s0, s0) } else { (solve_sr(carpet, r)?, solve_tr(carpet, r)?) };
    let kappa = sr / (sr + r);
    let d = carpet.derived();
    let row_p = |pos: usize| carpet.row_digits(pos).iter().map(move |&idx| carpet.digits()[idx].p);

    let condition_a = (r > 0.0).then(|| {
        let values =
            d.qj.iter().enumerate().map(|(pos, &q)| q.powf(-kappa) * csum(row_p(pos).map(|p| p.powf(kappa)))).collect();
        ConditionRow::new(values, tol)
    });
    let b_values = d.qj.iter().enumerate().map(|(pos, &q)| csum(row_p(pos).map(|p| p * (p / q).ln())) / q).collect();
    let condition_b = ConditionRow::new(b_values, tol);
    let condition_c = ConditionRow::new(d.qj.clone(), tol);
    let pi_r = condition_a.as_ref().filter(|a| a.equal).map(|a| a.values[0]);
    Ok(DimReport { r, s0, sr, tr, kappa, condition_a, condition_b, condition_c, pi_r })
}
