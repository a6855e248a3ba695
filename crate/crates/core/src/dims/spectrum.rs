//! The temperature function `T`, its Legendre data and the points `vartheta_r`.

use rayon::prelude::*;

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::roots::bisect;

use super::{row_power_sum, SOLVER_FTOL};

/// Step of the central difference used for `T'`.
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// `T(t) = log_m sum_j q_j^{(1-theta) t} S_j(t)^theta`.
pub fn temperature(carpet: &Carpet, t: f64) -> f64 {
    row_power_sum(carpet, t).ln() / (carpet.m() as f64).ln()
}

/// Central difference `(T(t+h) - T(t-h)) / 2h` with `h = DERIVATIVE_STEP`.
pub fn temperature_derivative(carpet: &Carpet, t: f64) -> f64 {
    let h = DERIVATIVE_STEP;
    (temperature(carpet, t + h) - temperature(carpet, t - h)) / (2.0 * h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub t: f64,
    pub temperature: f64,
    /// `-T'(t)`.
    pub alpha: f64,
    /// `alpha t + T(t)`, not truncated at zero.
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRow {
    pub r: f64,
    /// Solution of `T(theta) = r theta`.
    pub theta: f64,
    /// `T(theta) / (1 - theta)`; at `r = 0` its limit `-T'(1)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
    pub theta: Vec<ThetaRow>,
}

impl SpectrumTable {
    /// Smallest second difference of `T` along the grid (convexity check).
    pub fn min_second_difference(&self) -> f64 {
        self.rows
            .windows(3)
            .map(|w| w[0].temperature - 2.0 * w[1].temperature + w[2].temperature)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates `T`, `alpha` and `f` on `t_grid` and solves for `vartheta_r`
/// for every `r` in `r_list`.
pub fn spectrum(carpet: &Carpet, t_grid: &[f64], r_list: &[f64]) -> Result<SpectrumTable> {
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let temperature = temperature(carpet, t);
            let alpha = -temperature_derivative(carpet, t);
            SpectrumRow { t, temperature, alpha, f: alpha * t + temperature }
        })
        .collect();
    let theta = r_list
        .iter()
        .map(|&r| {
            let theta = solve_theta_r(carpet, r)?;
            let ratio = if r == 0.0 {
                -temperature_derivative(carpet, 1.0)
            } else {
                temperature(carpet, theta) / (1.0 - theta)
            };
            Ok(ThetaRow { r, theta, ratio })
        })
        .collect::<Result<_>>()?;
    Ok(SpectrumTable { rows, theta })
}

/// `vartheta_r`, the solution of `T(t) = r t`; equal to one at `r = 0`.
pub fn solve_theta_r(carpet: &Carpet, r: f64) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParam(format!("r = {r} must be non-negative")));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let h = |t: f64| temperature(carpet, t) - r * t;
    let mut hi = 1.0;
    while h(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoSignChange(format!("T(t) - {r} t stays non-negative on (0, {hi}]")));
        }
    }
    Ok(bisect(h, 0.0, hi, SOLVER_FTOL)?.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::solve_tr;
    use crate::reference::{balanced_rows_example, full_grid, unequal_rows};

    #[test]
    fn temperature_vanishes_at_one() {
        for c in [balanced_rows_example(), unequal_rows(), full_grid(5, 3)] {
            assert!(temperature(&c, 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn temperature_at_zero_counts_columns() {
        let c = unequal_rows();
        let theta = c.theta();
        let expected: f64 =
            c.derived().gxj.iter().map(|cols| (cols.len() as f64).powf(theta)).sum::<f64>().ln() / 2f64.ln();
        assert!((temperature(&c, 0.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn full_grid_is_linear() {
        let c = full_grid(3, 2);
        let grid: Vec<f64> = (0..=100).map(|i| -1.0 + 0.04 * i as f64).collect();
        let table = spectrum(&c, &grid, &[0.5, 1.0, 2.0]).unwrap();
        for row in &table.rows {
            assert!((row.temperature - 2.0 * (1.0 - row.t)).abs() < 1e-10);
            assert!((row.f - 2.0).abs() < 1e-8);
        }
        for th in &table.theta {
            assert!((th.theta - 2.0 / (2.0 + th.r)).abs() < 1e-10);
            assert!((th.ratio - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn theta_ratio_matches_tr() {
        let c = unequal_rows();
        for r in [0.25, 1.0, 4.0] {
            let th = solve_theta_r(&c, r).unwrap();
            let ratio = temperature(&c, th) / (1.0 - th);
            assert!((ratio - solve_tr(&c, r).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn spectrum_is_convex_and_peaks_at_t_zero() {
        let c = unequal_rows();
        let grid: Vec<f64> = (0..=200).map(|i| -2.0 + 0.03 * i as f64).collect();
        let table = spectrum(&c, &grid, &[0.0]).unwrap();
        assert!(table.min_second_difference() >= -1e-8);
        let fmax = table.rows.iter().map(|r| r.f).fold(f64::NEG_INFINITY, f64::max);
        assert!((fmax - temperature(&c, 0.0)).abs() < 1e-3);
        let at_one = spectrum(&c, &[1.0], &[]).unwrap().rows[0];
        assert!((at_one.f - at_one.alpha).abs() < 1e-12);
        assert!((table.theta[0].ratio - crate::dims::s0(&c)).abs() < 1e-7);
    }
}
