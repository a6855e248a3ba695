//! Exhaustive search over a lattice of candidate centres.

use rayon::prelude::*;

use crate::carpet::PlanePoint;
use crate::error::{Error, Result};

use super::cloud::WeightedCloud;
use super::lloyd::Cost;

/// Largest cloud for which `k >= 2` is searched exactly.
pub const MAX_EXACT_ATOMS: usize = 16;
/// Largest cloud accepted for `k = 1`.
pub const MAX_SINGLE_ATOMS: usize = 10_000;

/// Candidate centres `(a / res, b / res)`, `0 <= a, b <= res`.
pub fn candidate_grid(grid_res: usize) -> Vec<PlanePoint> {
    let g = grid_res as f64;
    (0..=grid_res).flat_map(|b| (0..=grid_res).map(move |a| PlanePoint::new(a as f64 / g, b as f64 / g))).collect()
}

/// Best error over all codebooks of at most `k` lattice points.
///
/// For `k >= 2` the search uses that an optimal codebook partitions the
/// atoms into at most `k` groups, each served by its best single candidate:
/// the best cost of every atom subset is tabulated, then combined over
/// partitions. This is exact and avoids enumerating candidate `k`-subsets.
pub fn brute_force_error(cloud: &WeightedCloud, k: usize, r: f64, grid_res: usize) -> Result<f64> {
    let cost = Cost::new(r, cloud)?;
    Ok(cost.to_error(brute_force_objective(cloud, k, cost, grid_res)?))
}

fn brute_force_objective(cloud: &WeightedCloud, k: usize, cost: Cost, grid_res: usize) -> Result<f64> {
    if grid_res == 0 {
        return Err(Error::GridTooCoarse("grid_res must be at least 1".into()));
    }
    let candidates = candidate_grid(grid_res);
    if k > candidates.len() {
        return Err(Error::GridTooCoarse(format!("{k} centres but only {} candidates", candidates.len())));
    }
    if k == 0 {
        return Err(Error::InvalidK { k, atoms: cloud.len() });
    }
    let n = cloud.len();
    let group_cost = |c: &PlanePoint| -> f64 { (0..n).map(|a| cloud.weights[a] * cost.atom(cloud, a, c)).sum() };
    if k == 1 {
        if n > MAX_SINGLE_ATOMS {
            return Err(Error::CloudTooLarge(format!("{n} atoms exceed {MAX_SINGLE_ATOMS}")));
        }
        return Ok(candidates.par_iter().map(group_cost).reduce(|| f64::INFINITY, f64::min));
    }
    if n > MAX_EXACT_ATOMS {
        return Err(Error::CloudTooLarge(format!(
            "exact search for k >= 2 supports at most {MAX_EXACT_ATOMS} atoms, got {n}"
        )));
    }
    if k >= n {
        // One centre per atom; only the lattice rounding remains.
        return Ok((0..n)
            .map(|a| candidates.iter().map(|c| cloud.weights[a] * cost.atom(cloud, a, c)).fold(f64::INFINITY, f64::min))
            .sum());
    }

    let full = 1usize << n;
    let best = candidates
        .par_iter()
        .fold(
            || vec![f64::INFINITY; full],
            |mut best, c| {
                let per_atom: Vec<f64> = (0..n).map(|a| cloud.weights[a] * cost.atom(cloud, a, c)).collect();
                let mut sums = vec![0.0; full];
                for s in 1..full {
                    let low = s.trailing_zeros() as usize;
                    sums[s] = sums[s & (s - 1)] + per_atom[low];
                    if sums[s] < best[s] {
                        best[s] = sums[s];
                    }
                }
                best
            },
        )
        .reduce(
            || vec![f64::INFINITY; full],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.min(y);
                }
                a
            },
        );

    // g[s]: best cost of serving atom set s with the groups allowed so far.
    let mut g = best.clone();
    g[0] = 0.0;
    for _ in 2..=k {
        let mut next = g.clone();
        for s in 1..full {
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            // Enumerate groups t = low | sub for every sub of rest.
            let mut sub = rest;
            loop {
                let t = low | sub;
                let v = best[t] + g[s ^ t];
                if v < next[s] {
                    next[s] = v;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        g = next;
    }
    Ok(g[full - 1])
}
