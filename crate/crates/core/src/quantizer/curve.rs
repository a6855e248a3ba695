//! Error curves `k -> e_{k,r}` and the dimension and coefficient estimates
//! read off them.

use crate::carpet::Carpet;
use crate::error::{Error, Result};

use super::cloud::{discretize, WeightedCloud};
use super::lloyd::{lloyd, LloydParams};

/// Slack for flagging `e_k` increases between consecutive `k`.
pub const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub k: usize,
    /// `e_{k,r}`; for `r = 0` the geometric-mean error `exp(e-hat_k)`.
    pub error: f64,
    /// Relative objective decrease in the last optimizer iteration.
    pub residual: f64,
    pub restarts: usize,
    /// `k^{1/s} e_k` for `r > 0`; `s^{-1} log k + e-hat_k` for `r = 0`.
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub r: f64,
    /// Exponent used for the coefficient column.
    pub s: f64,
    pub rows: Vec<CurveRow>,
    /// Least-squares slope of `log k` against `-log e_k` over the larger half of `k`.
    pub slope: f64,
    /// Root-mean-square residual of that fit.
    pub slope_residual: f64,
    /// Values of `k` whose error exceeds the previous one by more than the slack.
    pub monotone_violations: Vec<usize>,
    /// Largest atom-square diagonal, bounding the discretization bias.
    pub discretization_bias: f64,
}

impl ErrorCurve {
    /// `max / min` of the coefficient column (`r > 0`).
    pub fn coefficient_ratio(&self) -> f64 {
        let max = self.rows.iter().map(|r| r.coefficient).fold(f64::NEG_INFINITY, f64::max);
        let min = self.rows.iter().map(|r| r.coefficient).fold(f64::INFINITY, f64::min);
        max / min
    }
}

/// Ordinary least squares slope of `y` on `x` and the RMS residual.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

fn check_k_list(k_list: &[usize]) -> Result<()> {
    if k_list.is_empty() || k_list[0] == 0 || k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam(format!("k list {k_list:?} must be strictly ascending positive integers")));
    }
    Ok(())
}

/// Runs the optimizer on the depth-`depth` discretization for every `k`.
/// `s` is the exponent of the coefficient column.
pub fn error_curve(
    carpet: &Carpet,
    r: f64,
    k_list: &[usize],
    depth: usize,
    s: f64,
    params: &LloydParams,
) -> Result<ErrorCurve> {
    check_k_list(k_list)?;
    let cloud = discretize(carpet, depth)?;
    error_curve_on(&cloud, r, k_list, s, params)
}

pub fn error_curve_on(
    cloud: &WeightedCloud,
    r: f64,
    k_list: &[usize],
    s: f64,
    params: &LloydParams,
) -> Result<ErrorCurve> {
    check_k_list(k_list)?;
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let res = lloyd(cloud, k, r, params)?;
        let kf = k as f64;
        let coefficient = if r > 0.0 { kf.powf(1.0 / s) * res.error } else { kf.ln() / s + res.log_error() };
        rows.push(CurveRow { k, error: res.error, residual: res.residual, restarts: res.restarts, coefficient });
    }
    let monotone_violations =
        rows.windows(2).filter(|w| w[1].error > w[0].error * (1.0 + MONOTONE_SLACK)).map(|w| w[1].k).collect();
    let top = &rows[rows.len() / 2..];
    let x: Vec<f64> = top.iter().map(|row| -row.error.ln()).collect();
    let y: Vec<f64> = top.iter().map(|row| (row.k as f64).ln()).collect();
    let (slope, slope_residual) = least_squares_slope(&x, &y);
    Ok(ErrorCurve {
        r,
        s,
        rows,
        slope,
        slope_residual,
        monotone_violations,
        discretization_bias: cloud.max_cell_diameter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::two_map;

    #[test]
    fn rejects_unsorted_k() {
        let p = LloydParams::default();
        assert!(matches!(error_curve(&two_map(), 2.0, &[4, 2], 4, 1.0, &p), Err(Error::InvalidParam(_))));
        assert!(matches!(error_curve(&two_map(), 2.0, &[2, 2], 4, 1.0, &p), Err(Error::InvalidParam(_))));
    }

    #[test]
    fn slope_of_exact_power_law() {
        let x: Vec<f64> = (1..6).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.5 * v + 2.0).collect();
        let (s, res) = least_squares_slope(&x, &y);
        assert!((s - 1.5).abs() < 1e-12 && res < 1e-12);
    }

    #[test]
    fn curve_is_deterministic() {
        let p = LloydParams { restarts: 2, seed: 4, ..LloydParams::default() };
        let a = error_curve(&two_map(), 2.0, &[1, 2, 4, 8], 6, 1.0, &p).unwrap();
        let b = error_curve(&two_map(), 2.0, &[1, 2, 4, 8], 6, 1.0, &p).unwrap();
        assert_eq!(a, b);
        assert!(a.monotone_violations.is_empty());
    }
}
