//! Bracketing root finder shared by every implicit equation in the crate.

use crate::error::{Error, Result};

/// Iteration cap for [`bisect`].
pub const MAX_BISECTIONS: usize = 200;

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs.
///
/// Stops when `|f(x)| < ftol` or the bracket can no longer be split in
/// double precision; in the latter case the endpoint with the smaller
/// residual is returned. Fails if the bracket is invalid or the iteration
/// cap is reached first.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, ftol: f64) -> Result<Root>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(Root { x: lo, fx: flo, iterations: 0 });
    }
    if fhi == 0.0 {
        return Ok(Root { x: hi, fx: fhi, iterations: 0 });
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoBracket(format!("f({lo}) = {flo} and f({hi}) = {fhi} do not bracket a root")));
    }
    for it in 1..=MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            let (x, fx) = if flo.abs() <= fhi.abs() { (lo, flo) } else { (hi, fhi) };
            return Ok(Root { x, fx, iterations: it });
        }
        let fm = f(mid);
        if fm.abs() < ftol || fm == 0.0 {
            return Ok(Root { x: mid, fx: fm, iterations: it });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    Err(Error::NoConvergence(format!("bisection did not settle within {MAX_BISECTIONS} iterations on [{lo}, {hi}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.iterations <= MAX_BISECTIONS);
    }

    #[test]
    fn decreasing_functions_work() {
        let r = bisect(|x| 0.3 - x, 0.0, 1.0, 0.0).unwrap();
        assert!((r.x - 0.3).abs() < 1e-16);
    }

    #[test]
    fn rejects_missing_bracket() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::NoBracket(_))));
    }
}
