//! Level sets of `mu m^{-|.|r}` on the logarithmic scale `exp(-k lambda_1)`.

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::symbolic::tree::{traverse, NodeView, Visitor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellRow {
    pub k: usize,
    /// Words with `exp(-(k+1) lambda_1) <= mu m^{-|.|r} < exp(-k lambda_1)`.
    pub phi: u64,
    /// Words whose value drops below `exp(-k lambda_1)` while their parent's
    /// value does not.
    pub phi_tilde: u64,
    /// `(k lambda_1)^{-1} log phi`; NaN for `k = 0`.
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellCounts {
    pub r: f64,
    pub lambda1: f64,
    pub rows: Vec<ShellRow>,
}

struct ShellVisitor {
    thresholds: Vec<f64>,
    phi: Vec<u64>,
    phi_tilde: Vec<u64>,
}

impl Visitor for ShellVisitor {
    fn fork(&self) -> Self {
        let len = self.phi.len();
        ShellVisitor { thresholds: self.thresholds.clone(), phi: vec![0; len], phi_tilde: vec![0; len] }
    }

    fn visit(&mut self, node: &NodeView<'_>) -> bool {
        let t = &self.thresholds;
        let k_max = self.phi.len() - 1;
        // First index whose threshold is <= value; the shell is the one before.
        let below = t.partition_point(|&x| x > node.value);
        if below >= 1 && below - 1 <= k_max {
            self.phi[below - 1] += 1;
        }
        let start = t.partition_point(|&x| x > node.parent_value);
        for k in start..below.min(k_max + 1) {
            self.phi_tilde[k] += 1;
        }
        node.value >= t[k_max + 1]
    }

    fn absorb(&mut self, other: Self) {
        for (a, b) in self.phi.iter_mut().zip(other.phi) {
            *a += b;
        }
        for (a, b) in self.phi_tilde.iter_mut().zip(other.phi_tilde) {
            *a += b;
        }
    }
}

/// Exhaustive shell counts for `k = 0..=k_max`.
pub fn shell_counts(carpet: &Carpet, r: f64, k_max: usize, budget: u64) -> Result<ShellCounts> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParam(format!("r = {r} must be positive")));
    }
    if k_max == 0 {
        return Err(Error::InvalidParam("k_max must be at least 1".into()));
    }
    let lambda1 = carpet.derived().lambda1(r);
    let thresholds: Vec<f64> = (0..=k_max + 1).map(|k| (-(k as f64) * lambda1).exp()).collect();
    // Each step shrinks the value by at least exp(-lambda_2) > 0; descending
    // stops below exp(-(k_max+1) lambda_1), reached within this many steps.
    let step = carpet.derived().qmax * (carpet.m() as f64).powf(-r);
    let max_depth = ((k_max + 1) as f64 * lambda1 / -step.ln()).ceil() as usize + 2;
    let visitor = ShellVisitor { thresholds, phi: vec![0; k_max + 1], phi_tilde: vec![0; k_max + 1] };
    let (v, _) = traverse(carpet, r, max_depth, budget, visitor)?;
    let rows = (0..=k_max)
        .map(|k| ShellRow {
            k,
            phi: v.phi[k],
            phi_tilde: v.phi_tilde[k],
            growth: if k == 0 { f64::NAN } else { (v.phi[k] as f64).ln() / (k as f64 * lambda1) },
        })
        .collect();
    Ok(ShellCounts { r, lambda1, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{balanced_rows_example, two_map};
    use crate::symbolic::tree::DEFAULT_NODE_BUDGET;

    #[test]
    fn two_map_shells_match_depth_counts() {
        // Depth-d words all have value 2^{-1.3 d}; lambda_1 = 2.3 ln 2, so
        // depth d lands in shell floor(13 d / 23) (no ties for d < 23).
        let c = two_map();
        let r = 0.3;
        let s = shell_counts(&c, r, 10, DEFAULT_NODE_BUDGET).unwrap();
        assert!((s.lambda1 - 2.3 * 2f64.ln()).abs() < 1e-12);
        let mut phi = [0u64; 11];
        let mut phi_tilde = [0u64; 11];
        for d in 1..23usize {
            let k = 13 * d / 23;
            if k <= 10 {
                phi[k] += 1 << d;
            }
            let kp = 13 * (d - 1) / 23;
            for slot in phi_tilde.iter_mut().take(k.min(10) + 1).skip(kp + 1) {
                *slot += 1 << d;
            }
        }
        phi_tilde[0] = 2;
        for row in &s.rows {
            assert_eq!(row.phi, phi[row.k], "phi at k = {}", row.k);
            assert_eq!(row.phi_tilde, phi_tilde[row.k], "phi_tilde at k = {}", row.k);
        }
    }

    #[test]
    fn tilde_counts_never_exceed_shell_counts() {
        let c = balanced_rows_example();
        let s = shell_counts(&c, 1.0, 3, DEFAULT_NODE_BUDGET).unwrap();
        assert!(s.rows[0].growth.is_nan());
        for row in &s.rows[1..] {
            assert!(row.phi_tilde <= row.phi);
            assert!(row.phi > 0);
        }
    }
}
