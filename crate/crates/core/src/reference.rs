//! Reference carpets used by the examples, the bundled configs and the tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::carpet::{Carpet, CarpetSpec, Digit};
use crate::roots::bisect;

/// `n = 3, m = 2`, digits `(0,0)` and `(2,1)` with equal weights.
pub fn two_map() -> Carpet {
    Carpet::new(CarpetSpec::from_triples(3, 2, &[(0, 0, 0.5), (2, 1, 0.5)])).expect("valid")
}

/// Every cell of the `n x m` grid with uniform weights (Lebesgue measure).
pub fn full_grid(n: u32, m: u32) -> Carpet {
    let p = 1.0 / (n * m) as f64;
    let digits = (0..m).flat_map(|j| (0..n).map(move |i| Digit { i, j, p })).collect();
    Carpet::new(CarpetSpec::new(n, m, digits)).expect("valid")
}

/// A carpet whose rows carry different conditional distributions, so that
/// the row constants differ and the Hölder comparison is strict.
pub fn unequal_rows() -> Carpet {
    Carpet::new(CarpetSpec::from_triples(4, 2, &[(0, 0, 0.1), (1, 0, 0.2), (3, 0, 0.3), (2, 1, 0.4)])).expect("valid")
}

/// The two weights `(x1, x2)` of the nine-by-three example with balanced
/// rows, found by bisection:
///
/// * `x1` solves `sqrt(x) + sqrt(3/8 - x) = sqrt(2)/2` on `[0, 3/16]`,
/// * `x2` solves `sqrt(x) + sqrt(7/16 - x) = sqrt(2)/2` on `[0, 7/32]`.
pub fn balanced_rows_weights() -> (f64, f64) {
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let g1 = |x: f64| x.sqrt() + (0.375 - x).sqrt() - target;
    let g2 = |x: f64| x.sqrt() + (0.4375 - x).sqrt() - target;
    let x1 = bisect(g1, 0.0, 3.0 / 16.0, 0.0).expect("g1 changes sign").x;
    let x2 = bisect(g2, 0.0, 7.0 / 32.0, 0.0).expect("g2 changes sign").x;
    (x1, x2)
}

/// Spec of the `n = 9, m = 3` example whose row constants coincide at `r = 1`.
pub fn balanced_rows_spec() -> CarpetSpec {
    let (x1, x2) = balanced_rows_weights();
    CarpetSpec::from_triples(
        9,
        3,
        &[
            (1, 0, 0.125),
            (3, 0, x1),
            (5, 0, 0.375 - x1),
            (1, 2, x2),
            (3, 2, 0.4375 - x2),
            (5, 2, 1.0 / 32.0),
            (7, 2, 1.0 / 32.0),
        ],
    )
}

pub fn balanced_rows_example() -> Carpet {
    Carpet::new(balanced_rows_spec()).expect("valid")
}

/// A random valid carpet: `3 <= n <= 7`, `2 <= m < n`, between 2 and 10 digits
/// with weights bounded away from zero.
pub fn random_carpet<R: Rng>(rng: &mut R) -> Carpet {
    loop {
        let n = rng.random_range(3..=7u32);
        let m = rng.random_range(2..n);
        let mut cells: Vec<(u32, u32)> = (0..m).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
        cells.shuffle(rng);
        let count = rng.random_range(2..=cells.len().min(10));
        cells.truncate(count);
        let weights: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let digits = cells.iter().zip(&weights).map(|(&(i, j), &w)| Digit { i, j, p: w / total }).collect();
        if let Ok(c) = Carpet::new(CarpetSpec::new(n, m, digits)) {
            return c;
        }
    }
}
