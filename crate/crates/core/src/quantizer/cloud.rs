//! Finitely supported approximations of the self-affine measure.

use crate::carpet::{Carpet, PlanePoint};
use crate::error::{Error, Result};
use crate::sum::csum;
use crate::symbolic::tree::{depth_bound, traverse, NodeView, Visitor};
use crate::symbolic::word::depth_scale;
use crate::symbolic::{AntichainKind, DEFAULT_NODE_BUDGET};

/// Where the atoms of a cloud come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Centres of the approximate squares of `Omega_depth`.
    Level { depth: usize },
    /// Members of an antichain, each refined `levels` further.
    Antichain { kind: AntichainKind, levels: usize },
    /// Chaos-game samples.
    Samples { seed: u64, count: usize },
}

/// Atoms with positive weights summing to one. Atoms built from approximate
/// squares also remember the half-extents of their square, which the
/// geometric-mean objective uses to spread the atom's mass uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCloud {
    pub points: Vec<PlanePoint>,
    pub weights: Vec<f64>,
    /// Half-width and half-height of each atom's square; zero for samples.
    pub extents: Vec<(f64, f64)>,
    pub provenance: Provenance,
    /// The separation flag of the generating carpet.
    pub separated: bool,
}

impl WeightedCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        csum(self.weights.iter().copied())
    }

    /// Largest atom-square diagonal.
    pub fn max_cell_diameter(&self) -> f64 {
        self.extents.iter().map(|&(hx, hy)| 2.0 * hx.hypot(hy)).fold(0.0, f64::max)
    }

    /// Uniformly weighted chaos-game samples.
    pub fn from_samples(carpet: &Carpet, seed: u64, count: usize, burn_in: usize) -> Result<Self> {
        let points = carpet.chaos_sample(seed, count, burn_in)?;
        let w = 1.0 / count as f64;
        Ok(WeightedCloud {
            weights: vec![w; count],
            extents: vec![(0.0, 0.0); count],
            points,
            provenance: Provenance::Samples { seed, count },
            separated: carpet.derived().separated,
        })
    }
}

/// Collects the rectangles of emitted nodes directly from digit indices.
struct CellVisitor<'a> {
    carpet: &'a Carpet,
    depth: usize,
    levels: usize,
    points: Vec<PlanePoint>,
    weights: Vec<f64>,
    extents: Vec<(f64, f64)>,
}

impl CellVisitor<'_> {
    fn push(&mut self, node: &NodeView<'_>) {
        let n = self.carpet.n() as f64;
        let m = self.carpet.m() as f64;
        let digits = self.carpet.digits();
        let gy = &self.carpet.derived().gy;
        let x0 = node.xs.iter().rev().fold(0.0, |acc, &d| (acc + digits[d as usize].i as f64) / n);
        let y0 = node.ys.iter().rev().fold(0.0, |acc, &pos| (acc + gy[pos as usize] as f64) / m);
        let hx = 0.5 * n.powi(-(node.xs.len() as i32));
        let hy = 0.5 * m.powi(-(node.ys.len() as i32));
        self.points.push(PlanePoint::new(x0 + hx, y0 + hy));
        self.weights.push(node.weight);
        self.extents.push((hx, hy));
    }
}

impl Visitor for CellVisitor<'_> {
    fn fork(&self) -> Self {
        CellVisitor {
            carpet: self.carpet,
            depth: self.depth,
            levels: self.levels,
            points: Vec::new(),
            weights: Vec::new(),
            extents: Vec::new(),
        }
    }

    fn visit(&mut self, node: &NodeView<'_>) -> bool {
        if node.depth == self.depth {
            self.push(node);
            return false;
        }
        true
    }

    fn absorb(&mut self, other: Self) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
        self.extents.extend(other.extents);
    }
}

/// Emits members of an antichain refined by a fixed number of levels.
///
/// Values decrease along every path, so a node lies exactly `levels`
/// generations below a member iff its ancestor `levels` generations up is
/// the first one below the threshold. The test is stateless, which keeps it
/// valid under any traversal order.
struct RefineVisitor<'a> {
    inner: CellVisitor<'a>,
    threshold: f64,
    r: f64,
}

impl RefineVisitor<'_> {
    /// `mu m^{-d r}` of the depth-`d` prefix, multiplied in the same order as
    /// the traversal so that threshold ties resolve identically.
    fn prefix_value(&self, node: &NodeView<'_>, d: usize) -> f64 {
        let c = self.inner.carpet;
        let l = c.ell(d);
        let digits = c.digits();
        let qj = &c.derived().qj;
        let pprod = node.xs[..l].iter().fold(1.0, |acc, &i| acc * digits[i as usize].p);
        let tprod = node.ys[l..d].iter().fold(1.0, |acc, &pos| acc * qj[pos as usize]);
        pprod * tprod * depth_scale(c.m(), self.r, d)
    }
}

impl Visitor for RefineVisitor<'_> {
    fn fork(&self) -> Self {
        RefineVisitor { inner: self.inner.fork(), threshold: self.threshold, r: self.r }
    }

    fn visit(&mut self, node: &NodeView<'_>) -> bool {
        let levels = self.inner.levels;
        let emit = if node.depth <= levels {
            false
        } else if levels == 0 {
            node.value < self.threshold
        } else {
            self.prefix_value(node, node.depth - levels) < self.threshold
        };
        if emit {
            self.inner.push(node);
        }
        !emit
    }

    fn absorb(&mut self, other: Self) {
        self.inner.absorb(other.inner);
    }
}

fn finish(
    points: Vec<PlanePoint>,
    weights: Vec<f64>,
    extents: Vec<(f64, f64)>,
    provenance: Provenance,
    separated: bool,
) -> Result<WeightedCloud> {
    let cloud = WeightedCloud { points, weights, extents, provenance, separated };
    let total = cloud.total_weight();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParam(format!("cloud mass {total} differs from one")));
    }
    Ok(cloud)
}

/// One atom per word of `Omega_depth`, at the centre of its square.
pub fn discretize(carpet: &Carpet, depth: usize) -> Result<WeightedCloud> {
    discretize_with_budget(carpet, depth, DEFAULT_NODE_BUDGET)
}

pub fn discretize_with_budget(carpet: &Carpet, depth: usize, budget: u64) -> Result<WeightedCloud> {
    if depth == 0 {
        return Err(Error::InvalidParam("depth must be at least 1".into()));
    }
    let v = CellVisitor { carpet, depth, levels: 0, points: Vec::new(), weights: Vec::new(), extents: Vec::new() };
    let (v, _) = traverse(carpet, 0.0, depth, budget, v)?;
    finish(v.points, v.weights, v.extents, Provenance::Level { depth }, carpet.derived().separated)
}

/// Atoms at the centres of the squares obtained by refining every member of
/// the antichain `kind` by `levels` generations.
pub fn antichain_cloud(carpet: &Carpet, kind: AntichainKind, levels: usize, budget: u64) -> Result<WeightedCloud> {
    let threshold = kind.threshold(carpet)?;
    let r = kind.r();
    let inner = CellVisitor { carpet, depth: 0, levels, points: Vec::new(), weights: Vec::new(), extents: Vec::new() };
    let v = RefineVisitor { inner, threshold, r };
    let max_depth = depth_bound(carpet, r, threshold) + levels;
    let (v, _) = traverse(carpet, r, max_depth, budget, v)?;
    let inner = v.inner;
    finish(
        inner.points,
        inner.weights,
        inner.extents,
        Provenance::Antichain { kind, levels },
        carpet.derived().separated,
    )
}
