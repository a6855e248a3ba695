//! Alternating (Lloyd-type) codebook optimization for weighted clouds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::carpet::PlanePoint;
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

use super::cloud::WeightedCloud;
use super::kdtree::KdTree;
use super::logcell::{mean_log_distance, mean_log_distance_grad};

/// Smallest distance used inside a logarithm.
pub const LOG_FLOOR: f64 = 1e-300;

/// Above this many centres assignment goes through a 2-d tree.
const TREE_THRESHOLD: usize = 16;
/// Candidate centres examined per atom for the geometric-mean objective.
const LOG_CANDIDATES: usize = 4;
const PARALLEL_ATOMS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydParams {
    pub seed: u64,
    pub restarts: usize,
    /// Gradient-norm tolerance of the centre step.
    pub tol: f64,
    /// Cap on full assignment/update iterations.
    pub max_iter: usize,
    /// Cap on descent steps per centre update.
    pub inner_iter: usize,
}

impl Default for LloydParams {
    fn default() -> Self {
        LloydParams { seed: 0, restarts: 8, tol: 1e-10, max_iter: 200, inner_iter: 50 }
    }
}

/// Outcome of a Lloyd run.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydResult {
    pub codebook: Vec<PlanePoint>,
    /// `sum w d^r`, or `sum w log d` for `r = 0`.
    pub objective: f64,
    /// `objective^{1/r}`, or `exp(objective)` for `r = 0`.
    pub error: f64,
    /// Relative objective decrease of the last iteration.
    pub residual: f64,
    pub iterations: usize,
    /// Index of the winning restart.
    pub restart: usize,
    pub restarts: usize,
}

impl LloydResult {
    /// `log error`; for `r = 0` the objective itself.
    pub fn log_error(&self) -> f64 {
        self.error.ln()
    }
}

#[derive(Clone, Copy)]
pub(crate) enum Cost {
    Power(f64),
    Log,
}

impl Cost {
    pub(crate) fn new(r: f64, cloud: &WeightedCloud) -> Result<Cost> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParam(format!("r = {r} must be non-negative")));
        }
        if r == 0.0 {
            if !cloud.separated {
                return Err(Error::SeparationRequired);
            }
            Ok(Cost::Log)
        } else {
            Ok(Cost::Power(r))
        }
    }

    #[inline]
    pub(crate) fn atom(&self, cloud: &WeightedCloud, a: usize, c: &PlanePoint) -> f64 {
        let p = &cloud.points[a];
        let (dx, dy) = (p.x - c.x, p.y - c.y);
        match *self {
            Cost::Power(r) => {
                let d2 = dx * dx + dy * dy;
                if r == 2.0 {
                    d2
                } else {
                    d2.sqrt().powf(r)
                }
            }
            Cost::Log => {
                let (hx, hy) = cloud.extents[a];
                if hx == 0.0 && hy == 0.0 {
                    dx.hypot(dy).max(LOG_FLOOR).ln()
                } else {
                    mean_log_distance(dx, dy, hx, hy)
                }
            }
        }
    }

    /// Gradient in `c` of the atom cost.
    #[inline]
    fn grad(&self, cloud: &WeightedCloud, a: usize, c: &PlanePoint) -> (f64, f64) {
        let p = &cloud.points[a];
        let (dx, dy) = (p.x - c.x, p.y - c.y);
        match *self {
            Cost::Power(r) => {
                let d = dx.hypot(dy);
                if d < LOG_FLOOR {
                    return (0.0, 0.0);
                }
                let f = -r * d.powf(r - 2.0);
                (f * dx, f * dy)
            }
            Cost::Log => {
                let (hx, hy) = cloud.extents[a];
                mean_log_distance_grad(dx, dy, hx, hy)
            }
        }
    }

    pub(crate) fn to_error(self, objective: f64) -> f64 {
        match self {
            Cost::Power(r) => objective.max(0.0).powf(1.0 / r),
            Cost::Log => objective.exp(),
        }
    }
}

/// Total objective of a codebook under a given assignment.
fn total(cloud: &WeightedCloud, cost: Cost, codebook: &[PlanePoint], assign: &[usize]) -> f64 {
    let mut s = CompensatedSum::new();
    for (a, &c) in assign.iter().enumerate() {
        s.add(cloud.weights[a] * cost.atom(cloud, a, &codebook[c]));
    }
    s.value()
}

/// Optimal objective of a codebook (each atom at its best centre).
pub fn codebook_objective(cloud: &WeightedCloud, r: f64, codebook: &[PlanePoint]) -> Result<f64> {
    let cost = Cost::new(r, cloud)?;
    if codebook.is_empty() {
        return Err(Error::InvalidK { k: 0, atoms: cloud.len() });
    }
    let mut assign = vec![0; cloud.len()];
    assign_atoms(cloud, cost, codebook, &mut assign, false);
    Ok(total(cloud, cost, codebook, &assign))
}

/// Error (`objective^{1/r}`, or `exp` of the log objective) of a fixed codebook.
pub fn codebook_error(cloud: &WeightedCloud, r: f64, codebook: &[PlanePoint]) -> Result<f64> {
    let cost = Cost::new(r, cloud)?;
    Ok(cost.to_error(codebook_objective(cloud, r, codebook)?))
}

fn best_of(
    cloud: &WeightedCloud,
    cost: Cost,
    codebook: &[PlanePoint],
    a: usize,
    candidates: impl Iterator<Item = usize>,
) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for c in candidates {
        let v = cost.atom(cloud, a, &codebook[c]);
        if v < best.0 || (v == best.0 && c < best.1) {
            best = (v, c);
        }
    }
    best.1
}

/// Reassigns every atom to a centre no worse than its current one
/// (`keep_current`) or to its best centre among the candidates.
fn assign_atoms(cloud: &WeightedCloud, cost: Cost, codebook: &[PlanePoint], assign: &mut [usize], keep_current: bool) {
    let k = codebook.len();
    let tree = (k > TREE_THRESHOLD).then(|| KdTree::new(codebook));
    let pick = |a: usize, current: usize, scratch: &mut Vec<(f64, usize)>| -> usize {
        match &tree {
            None => best_of(cloud, cost, codebook, a, 0..k),
            Some(tree) => {
                let count = if matches!(cost, Cost::Log) { LOG_CANDIDATES } else { 1 };
                tree.nearest(&cloud.points[a], count, scratch);
                let extra = keep_current.then_some(current);
                best_of(cloud, cost, codebook, a, scratch.iter().map(|e| e.1).chain(extra))
            }
        }
    };
    if cloud.len() >= PARALLEL_ATOMS {
        assign.par_iter_mut().enumerate().for_each_init(Vec::new, |scratch, (a, slot)| *slot = pick(a, *slot, scratch));
    } else {
        let mut scratch = Vec::new();
        for (a, slot) in assign.iter_mut().enumerate() {
            *slot = pick(a, *slot, &mut scratch);
        }
    }
}

/// Moves one centre to lower the summed cost of its member atoms.
fn update_center(
    cloud: &WeightedCloud,
    cost: Cost,
    members: &[usize],
    start: PlanePoint,
    params: &LloydParams,
) -> PlanePoint {
    let weight: f64 = members.iter().map(|&a| cloud.weights[a]).sum();
    if members.is_empty() || weight <= 0.0 {
        return start;
    }
    let f = |c: &PlanePoint| {
        let mut s = CompensatedSum::new();
        for &a in members {
            s.add(cloud.weights[a] * cost.atom(cloud, a, c));
        }
        s.value()
    };
    if let Cost::Power(r) = cost {
        if r == 2.0 {
            let mut sx = CompensatedSum::new();
            let mut sy = CompensatedSum::new();
            for &a in members {
                sx.add(cloud.weights[a] * cloud.points[a].x);
                sy.add(cloud.weights[a] * cloud.points[a].y);
            }
            let mean = PlanePoint::new(sx.value() / weight, sy.value() / weight);
            // The mean is the exact minimizer; keep the start on rounding ties.
            return if f(&mean) <= f(&start) { mean } else { start };
        }
    }
    let mut c = start;
    let mut fc = f(&c);
    let spread = members
        .iter()
        .map(|&a| {
            cloud.weights[a] * {
                let p = &cloud.points[a];
                (p.x - c.x).powi(2) + (p.y - c.y).powi(2)
            }
        })
        .sum::<f64>()
        / weight;
    let mut step = 0.5 * spread.sqrt().max(1e-12);
    for _ in 0..params.inner_iter {
        let (mut gx, mut gy) = (0.0, 0.0);
        for &a in members {
            let (x, y) = cost.grad(cloud, a, &c);
            gx += cloud.weights[a] * x;
            gy += cloud.weights[a] * y;
        }
        let norm = gx.hypot(gy);
        if norm < params.tol || !norm.is_finite() {
            break;
        }
        let mut moved = false;
        while step > 1e-15 {
            let trial = PlanePoint::new(c.x - step * gx / norm, c.y - step * gy / norm);
            let ft = f(&trial);
            if ft < fc {
                c = trial;
                fc = ft;
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    c
}

fn check_k(cloud: &WeightedCloud, k: usize) -> Result<()> {
    if k == 0 || k > cloud.len() {
        return Err(Error::InvalidK { k, atoms: cloud.len() });
    }
    Ok(())
}

/// Weighted D^2 seeding from a `(seed, restart)` stream.
fn seed_codebook(cloud: &WeightedCloud, k: usize, seed: u64, restart: usize) -> Vec<PlanePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let n = cloud.len();
    let mut chosen = vec![false; n];
    let mut dist2 = vec![f64::INFINITY; n];
    let mut codebook = Vec::with_capacity(k);
    let pick_weighted = |rng: &mut ChaCha8Rng, scores: &[f64]| -> Option<usize> {
        let sum: f64 = scores.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return None;
        }
        let target = rng.random::<f64>() * sum;
        let mut acc = 0.0;
        let mut last = None;
        for (i, &s) in scores.iter().enumerate() {
            if s > 0.0 {
                acc += s;
                last = Some(i);
                if acc > target {
                    return Some(i);
                }
            }
        }
        last
    };
    for _ in 0..k {
        let scores: Vec<f64> = if codebook.is_empty() {
            cloud.weights.clone()
        } else {
            (0..n).map(|a| if chosen[a] { 0.0 } else { cloud.weights[a] * dist2[a] }).collect()
        };
        let a = pick_weighted(&mut rng, &scores).unwrap_or_else(|| (0..n).find(|&a| !chosen[a]).expect("k <= atoms"));
        chosen[a] = true;
        let c = cloud.points[a];
        codebook.push(c);
        for (b, d) in dist2.iter_mut().enumerate() {
            let p = &cloud.points[b];
            *d = d.min((p.x - c.x).powi(2) + (p.y - c.y).powi(2));
        }
    }
    codebook
}

/// Runs alternating optimization from `codebook`.
fn run(
    cloud: &WeightedCloud,
    cost: Cost,
    mut codebook: Vec<PlanePoint>,
    params: &LloydParams,
    restart: usize,
) -> Result<LloydResult> {
    let k = codebook.len();
    let mut assign = vec![0usize; cloud.len()];
    assign_atoms(cloud, cost, &codebook, &mut assign, false);
    let mut prev = total(cloud, cost, &codebook, &assign);
    let mut residual = f64::NAN;
    let mut iterations = 0;
    for it in 1..=params.max_iter {
        iterations = it;
        // Centre step.
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (a, &c) in assign.iter().enumerate() {
            members[c].push(a);
        }
        let updated: Vec<PlanePoint> = if k > 64 {
            members
                .par_iter()
                .zip(codebook.par_iter())
                .map(|(m, &c)| update_center(cloud, cost, m, c, params))
                .collect()
        } else {
            members.iter().zip(&codebook).map(|(m, &c)| update_center(cloud, cost, m, c, params)).collect()
        };
        codebook = updated;
        repair_empty(cloud, cost, &mut codebook, &mut assign, &members);
        assign_atoms(cloud, cost, &codebook, &mut assign, true);
        let now = total(cloud, cost, &codebook, &assign);
        if now > prev + 1e-12 * prev.abs() + 1e-300 {
            return Err(Error::NonDecreaseDetected { before: prev, after: now });
        }
        residual = (prev - now) / prev.abs().max(1e-300);
        prev = now;
        if residual <= 1e-13 {
            break;
        }
    }
    Ok(LloydResult {
        codebook,
        objective: prev,
        error: cost.to_error(prev),
        residual,
        iterations,
        restart,
        restarts: 1,
    })
}

/// Moves each empty centre onto the extreme atom of the heaviest cell when
/// that lowers the atom's cost.
fn repair_empty(
    cloud: &WeightedCloud,
    cost: Cost,
    codebook: &mut [PlanePoint],
    assign: &mut [usize],
    members: &[Vec<usize>],
) {
    let empty: Vec<usize> = (0..codebook.len()).filter(|&c| members[c].is_empty()).collect();
    if empty.is_empty() {
        return;
    }
    let mut cell_weight: Vec<f64> = vec![0.0; codebook.len()];
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); codebook.len()];
    for (a, &c) in assign.iter().enumerate() {
        cell_weight[c] += cloud.weights[a];
        cells[c].push(a);
    }
    for e in empty {
        let heaviest = (0..codebook.len())
            .filter(|&c| cells[c].len() >= 2)
            .max_by(|&a, &b| cell_weight[a].total_cmp(&cell_weight[b]).then(b.cmp(&a)));
        let Some(h) = heaviest else { return };
        let centre = codebook[h];
        let far = cells[h]
            .iter()
            .copied()
            .max_by(|&a, &b| {
                let da = (cloud.points[a].x - centre.x).hypot(cloud.points[a].y - centre.y);
                let db = (cloud.points[b].x - centre.x).hypot(cloud.points[b].y - centre.y);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("cell has atoms");
        let before = cost.atom(cloud, far, &centre);
        let after = cost.atom(cloud, far, &cloud.points[far]);
        if after < before {
            codebook[e] = cloud.points[far];
            assign[far] = e;
            cells[h].retain(|&a| a != far);
            cell_weight[h] -= cloud.weights[far];
            cells[e].push(far);
            cell_weight[e] += cloud.weights[far];
        }
    }
}

/// Best of `params.restarts` seeded runs with `k` centres for order `r`
/// (`r = 0` is the geometric-mean objective).
pub fn lloyd(cloud: &WeightedCloud, k: usize, r: f64, params: &LloydParams) -> Result<LloydResult> {
    let cost = Cost::new(r, cloud)?;
    check_k(cloud, k)?;
    let restarts = params.restarts.max(1);
    let runs: Vec<Result<LloydResult>> = (0..restarts)
        .into_par_iter()
        .map(|i| run(cloud, cost, seed_codebook(cloud, k, params.seed, i), params, i))
        .collect();
    let mut best: Option<LloydResult> = None;
    for res in runs {
        let res = res?;
        if best.as_ref().is_none_or(|b| res.objective < b.objective) {
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one restart");
    best.restarts = restarts;
    Ok(best)
}

/// A single run started from the given codebook.
pub fn lloyd_from(
    cloud: &WeightedCloud,
    codebook: Vec<PlanePoint>,
    r: f64,
    params: &LloydParams,
) -> Result<LloydResult> {
    let cost = Cost::new(r, cloud)?;
    check_k(cloud, codebook.len())?;
    run(cloud, cost, codebook, params, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::cloud::discretize;
    use crate::reference::{balanced_rows_example, two_map};

    #[test]
    fn one_centre_squared_error_is_the_centroid() {
        let cloud = discretize(&balanced_rows_example(), 4).unwrap();
        let res = lloyd(&cloud, 1, 2.0, &LloydParams::default()).unwrap();
        let mx: f64 = cloud.points.iter().zip(&cloud.weights).map(|(p, w)| w * p.x).sum();
        let my: f64 = cloud.points.iter().zip(&cloud.weights).map(|(p, w)| w * p.y).sum();
        let m2: f64 =
            cloud.points.iter().zip(&cloud.weights).map(|(p, w)| w * ((p.x - mx).powi(2) + (p.y - my).powi(2))).sum();
        assert!((res.codebook[0].x - mx).abs() < 1e-12 && (res.codebook[0].y - my).abs() < 1e-12);
        assert!((res.error - m2.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn one_centre_per_atom_is_exact() {
        let cloud = discretize(&two_map(), 3).unwrap();
        for r in [0.5, 1.0, 2.0, 3.0] {
            assert_eq!(lloyd(&cloud, 8, r, &LloydParams::default()).unwrap().error, 0.0);
        }
        assert!(matches!(lloyd(&cloud, 9, 1.0, &LloydParams::default()), Err(Error::InvalidK { k: 9, atoms: 8 })));
    }

    #[test]
    fn deterministic_and_monotone_in_k() {
        let cloud = discretize(&balanced_rows_example(), 5).unwrap();
        let params = LloydParams { restarts: 4, seed: 9, ..LloydParams::default() };
        for r in [0.0, 1.0, 1.5] {
            let a = lloyd(&cloud, 6, r, &params).unwrap();
            let b = lloyd(&cloud, 6, r, &params).unwrap();
            assert_eq!(a, b);
            let c = lloyd(&cloud, 12, r, &params).unwrap();
            assert!(c.objective <= a.objective + 1e-9, "r = {r}");
        }
    }

    #[test]
    fn tree_assignment_matches_scan() {
        let cloud = discretize(&balanced_rows_example(), 6).unwrap();
        let codebook = seed_codebook(&cloud, 40, 3, 0);
        for r in [1.0, 0.0] {
            let cost = Cost::new(r, &cloud).unwrap();
            let mut scan = vec![0; cloud.len()];
            for (a, slot) in scan.iter_mut().enumerate() {
                *slot = best_of(&cloud, cost, &codebook, a, 0..codebook.len());
            }
            let mut tree = vec![0; cloud.len()];
            assign_atoms(&cloud, cost, &codebook, &mut tree, false);
            let t1 = total(&cloud, cost, &codebook, &scan);
            let t2 = total(&cloud, cost, &codebook, &tree);
            assert!((t1 - t2).abs() <= 1e-12 * t1.abs());
        }
    }
}
