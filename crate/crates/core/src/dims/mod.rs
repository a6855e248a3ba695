//! Dimension-like quantities of the measure and their solvers.
//!
//! Implicit equations are solved by bisection in `u = s / (s + r)`, which
//! lies in `(0, 1)` and makes each left-hand side strictly monotone.

mod conditions;
mod spectrum;

pub use conditions::{condition_report, condition_report_with_tol, ConditionRow, DimReport, CONDITION_TOL};
pub use spectrum::{
    solve_theta_r, spectrum, temperature, temperature_derivative, SpectrumRow, SpectrumTable, ThetaRow, DERIVATIVE_STEP,
};

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::sum::csum;
use crate::symbolic::{digit_entropy, row_entropy};

/// Residual tolerance for the dimension equations.
pub const SOLVER_FTOL: f64 = 1e-14;

/// Geometric-mean dimension `s0`.
pub fn s0(carpet: &Carpet) -> f64 {
    let theta = carpet.theta();
    (theta * digit_entropy(carpet) + (1.0 - theta) * row_entropy(carpet)) / -(carpet.m() as f64).ln()
}

fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidR(r))
    }
}

/// `-r u log m + theta log sum p^u + (1 - theta) log sum q^u`.
///
/// The logarithm of the left side of the defining equation of `s_r`; its
/// zero in `u` is `s_r / (s_r + r)`.
pub fn sr_equation(carpet: &Carpet, r: f64, u: f64) -> f64 {
    let theta = carpet.theta();
    let sp = csum(carpet.digits().iter().map(|d| d.p.powf(u)));
    let sq = csum(carpet.derived().qj.iter().map(|&q| q.powf(u)));
    -r * u * (carpet.m() as f64).ln() + theta * sp.ln() + (1.0 - theta) * sq.ln()
}

/// `-r v log m + log sum_j q_j^{(1-theta) v} (sum_i p_ij^v)^theta`.
pub fn tr_equation(carpet: &Carpet, r: f64, v: f64) -> f64 {
    -r * v * (carpet.m() as f64).ln() + row_power_sum(carpet, v).ln()
}

/// `sum_j q_j^{(1-theta) t} S_j(t)^theta` with `S_j(t) = sum_i p_ij^t`.
pub(crate) fn row_power_sum(carpet: &Carpet, t: f64) -> f64 {
    let theta = carpet.theta();
    let d = carpet.derived();
    csum(d.qj.iter().enumerate().map(|(pos, &q)| {
        let s = csum(carpet.row_digits(pos).iter().map(|&idx| carpet.digits()[idx].p.powf(t)));
        q.powf((1.0 - theta) * t) * s.powf(theta)
    }))
}

/// A solved dimension together with its transformed variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solved {
    pub value: f64,
    /// `value / (value + r)`.
    pub u: f64,
    /// Equation residual at `u`.
    pub residual: f64,
    pub iterations: usize,
}

fn solve_in_u(r: f64, eq: impl Fn(f64) -> f64) -> Result<Solved> {
    let root = bisect(eq, 0.0, 1.0, SOLVER_FTOL)?;
    Ok(Solved { value: r * root.x / (1.0 - root.x), u: root.x, residual: root.fx, iterations: root.iterations })
}

/// Quantization dimension `s_r` of order `r > 0`.
pub fn solve_sr(carpet: &Carpet, r: f64) -> Result<f64> {
    Ok(solve_sr_detail(carpet, r)?.value)
}

pub fn solve_sr_detail(carpet: &Carpet, r: f64) -> Result<Solved> {
    check_r(r)?;
    solve_in_u(r, |u| sr_equation(carpet, r, u))
}

/// The conformal-heuristic exponent `t_r` of order `r > 0`; never above `s_r`.
pub fn solve_tr(carpet: &Carpet, r: f64) -> Result<f64> {
    Ok(solve_tr_detail(carpet, r)?.value)
}

pub fn solve_tr_detail(carpet: &Carpet, r: f64) -> Result<Solved> {
    check_r(r)?;
    solve_in_u(r, |v| tr_equation(carpet, r, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{balanced_rows_example, full_grid, two_map, unequal_rows};

    /// s0 of the balanced-rows carpet evaluated with 50-digit arithmetic.
    const BALANCED_ROWS_S0: f64 = 0.892_909_118_692_168_5;

    #[test]
    fn s0_closed_forms() {
        assert!((s0(&full_grid(3, 2)) - 2.0).abs() < 1e-14);
        assert!((s0(&two_map()) - 1.0).abs() < 1e-14);
        assert!((s0(&balanced_rows_example()) - BALANCED_ROWS_S0).abs() < 1e-12);
    }

    #[test]
    fn balanced_rows_has_sr_equal_tr_equal_one() {
        let c = balanced_rows_example();
        let s = solve_sr_detail(&c, 1.0).unwrap();
        let t = solve_tr_detail(&c, 1.0).unwrap();
        assert!((s.value - 1.0).abs() < 1e-9 && (t.value - 1.0).abs() < 1e-9);
        assert!(s.residual.abs() < 1e-13 && t.residual.abs() < 1e-13);
    }

    #[test]
    fn symmetric_carpets() {
        for r in [0.5, 1.0, 2.0] {
            let g = full_grid(3, 2);
            assert!((solve_sr(&g, r).unwrap() - 2.0).abs() < 1e-10);
            assert!((solve_tr(&g, r).unwrap() - 2.0).abs() < 1e-10);
            assert!((solve_sr(&two_map(), r).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn unequal_rows_are_strictly_holder() {
        let c = unequal_rows();
        for r in [0.5, 1.0, 3.0] {
            assert!(solve_sr(&c, r).unwrap() > solve_tr(&c, r).unwrap() + 1e-6);
        }
    }

    #[test]
    fn rejects_nonpositive_r() {
        assert_eq!(solve_sr(&two_map(), 0.0), Err(Error::InvalidR(0.0)));
        assert_eq!(solve_tr(&two_map(), -1.0), Err(Error::InvalidR(-1.0)));
    }
}
