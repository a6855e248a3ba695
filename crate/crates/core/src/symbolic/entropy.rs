//! Entropy of the level-`k` partition.

use crate::carpet::Carpet;
use crate::sum::csum;

/// `sum p log p` over the digits.
pub fn digit_entropy(carpet: &Carpet) -> f64 {
    csum(carpet.digits().iter().map(|d| d.p * d.p.ln()))
}

/// `sum q log q` over the occupied rows.
pub fn row_entropy(carpet: &Carpet) -> f64 {
    csum(carpet.derived().qj.iter().map(|&q| q * q.ln()))
}

/// `I_k = sum_{Omega_k} mu log mu = ell(k) sum p log p + (k - ell(k)) sum q log q`.
pub fn entropy_ik(carpet: &Carpet, k: usize) -> f64 {
    let l = carpet.ell(k);
    l as f64 * digit_entropy(carpet) + (k - l) as f64 * row_entropy(carpet)
}

/// `s_{k,0} = I_k / (-k log m)`.
pub fn mean_exponent_sk0(carpet: &Carpet, k: usize) -> f64 {
    entropy_ik(carpet, k) / (-(k as f64) * (carpet.m() as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{balanced_rows_example, full_grid};
    use crate::symbolic::tree::{level_words, DEFAULT_NODE_BUDGET};

    #[test]
    fn matches_direct_sum_over_level() {
        let c = balanced_rows_example();
        for k in 1..=6 {
            let words = level_words(&c, k, DEFAULT_NODE_BUDGET).unwrap();
            let direct = csum(words.iter().map(|w| w.weight() * w.weight().ln()));
            assert!((direct - entropy_ik(&c, k)).abs() < 1e-12 * k as f64);
        }
    }

    #[test]
    fn increments_follow_ell_steps() {
        let c = balanced_rows_example();
        for k in 1..40 {
            let step = entropy_ik(&c, k + 1) - entropy_ik(&c, k);
            let expected = if c.ell(k + 1) > c.ell(k) { digit_entropy(&c) } else { row_entropy(&c) };
            assert!((step - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn full_grid_is_two_when_k_theta_is_an_integer() {
        // For odd k the level has one column digit fewer than k/2 and the
        // exponent is (k + 2 ell(k)) / k.
        let c = full_grid(4, 2);
        for k in 1..20 {
            let expected = (k + 2 * c.ell(k)) as f64 / k as f64;
            assert!((mean_exponent_sk0(&c, k) - expected).abs() < 1e-12);
            if k % 2 == 0 {
                assert!((mean_exponent_sk0(&c, k) - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn converges_to_s0_at_rate_one_over_k() {
        let c = balanced_rows_example();
        let ln_m = (c.m() as f64).ln();
        let chi = (digit_entropy(&c).abs() + row_entropy(&c).abs()) / ln_m;
        let s0 = (c.theta() * digit_entropy(&c) + (1.0 - c.theta()) * row_entropy(&c)) / -ln_m;
        for k in 1..200 {
            assert!((mean_exponent_sk0(&c, k) - s0).abs() <= chi / k as f64 + 1e-12);
        }
    }
}
