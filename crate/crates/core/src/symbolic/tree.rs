//! Depth-first traversal of the approximate-square refinement tree.
//!
//! The tree is rooted at the depth-one words (one per occupied row). A
//! [`Visitor`] sees every generated node and decides whether to descend.
//! The first few levels are expanded breadth-first; the resulting frontier
//! is split into subtrees that are walked independently (in parallel when
//! threads are available) and whose visitors are merged back in frontier
//! order, so results do not depend on scheduling.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::symbolic::word::{depth_scale, Word};

/// Default cap on the number of generated nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

const FRONTIER_TARGET: usize = 64;

/// A node as seen by a visitor. Column digits are digit indices into
/// [`Carpet::digits`]; row digits are positions in `gy`.
pub(crate) struct NodeView<'a> {
    pub depth: usize,
    pub xs: &'a [u16],
    pub ys: &'a [u16],
    pub weight: f64,
    pub value: f64,
    pub parent_value: f64,
}

impl NodeView<'_> {
    pub fn to_word(&self, carpet: &Carpet) -> Word {
        let xs = self.xs.iter().map(|&d| carpet.digits()[d as usize].i).collect();
        let ys = self.ys.iter().map(|&pos| carpet.derived().gy[pos as usize]).collect();
        Word::from_digits(carpet, xs, ys)
    }
}

pub(crate) trait Visitor: Send + Sync + Sized {
    /// An empty visitor with the same configuration.
    fn fork(&self) -> Self;
    /// Returns whether to descend below `node`.
    fn visit(&mut self, node: &NodeView<'_>) -> bool;
    /// Appends the state of a visitor forked from `self`.
    fn absorb(&mut self, other: Self);
}

struct Tables {
    q: Vec<f64>,
    rows: Vec<Vec<(u16, f64)>>,
    ell: Vec<usize>,
    scale: Vec<f64>,
}

impl Tables {
    fn new(carpet: &Carpet, r: f64, max_depth: usize) -> Self {
        let d = carpet.derived();
        let rows = (0..d.gy.len())
            .map(|pos| carpet.row_digits(pos).iter().map(|&idx| (idx as u16, carpet.digits()[idx].p)).collect())
            .collect();
        Tables {
            q: d.qj.clone(),
            rows,
            ell: (0..=max_depth + 1).map(|k| carpet.ell(k)).collect(),
            scale: (0..=max_depth + 1).map(|k| depth_scale(carpet.m(), r, k)).collect(),
        }
    }
}

#[derive(Clone)]
struct State {
    xs: Vec<u16>,
    ys: Vec<u16>,
    pprod: f64,
    tprod: f64,
    value: f64,
}

struct Budget<'a> {
    used: &'a AtomicU64,
    limit: u64,
    blown: &'a AtomicBool,
}

impl Budget<'_> {
    #[inline]
    fn tick(&self) -> Result<()> {
        let used = self.used.fetch_add(1, Ordering::Relaxed) + 1;
        if used > self.limit || self.blown.load(Ordering::Relaxed) {
            self.blown.store(true, Ordering::Relaxed);
            return Err(Error::BudgetExceeded { budget: self.limit });
        }
        Ok(())
    }
}

/// Walks the tree for weights scaled by `m^{-|sigma| r}`.
///
/// `max_depth` bounds the depth of any generated node; descending past it
/// is an error. Returns the merged visitor and the number of generated nodes.
pub(crate) fn traverse<V: Visitor>(
    carpet: &Carpet,
    r: f64,
    max_depth: usize,
    budget: u64,
    mut visitor: V,
) -> Result<(V, u64)> {
    let tables = Tables::new(carpet, r, max_depth);
    let used = AtomicU64::new(0);
    let blown = AtomicBool::new(false);
    let budget = Budget { used: &used, limit: budget, blown: &blown };

    let mut frontier = Vec::new();
    for (pos, &q) in tables.q.iter().enumerate() {
        budget.tick()?;
        let st = State { xs: vec![], ys: vec![pos as u16], pprod: 1.0, tprod: q, value: q * tables.scale[1] };
        let view =
            NodeView { depth: 1, xs: &st.xs, ys: &st.ys, weight: q, value: st.value, parent_value: tables.scale[0] };
        if visitor.visit(&view) {
            frontier.push(st);
        }
    }

    while !frontier.is_empty() && frontier.len() < FRONTIER_TARGET {
        let mut next = Vec::new();
        for st in &frontier {
            for child in expand(&tables, st, max_depth)? {
                budget.tick()?;
                let view = NodeView {
                    depth: child.ys.len(),
                    xs: &child.xs,
                    ys: &child.ys,
                    weight: child.pprod * child.tprod,
                    value: child.value,
                    parent_value: st.value,
                };
                if visitor.visit(&view) {
                    next.push(child);
                }
            }
        }
        frontier = next;
    }

    let parts: Vec<Result<V>> = frontier
        .par_iter()
        .map(|st| {
            let mut v = visitor.fork();
            let mut walker =
                Walker { tables: &tables, budget: &budget, max_depth, xs: st.xs.clone(), ys: st.ys.clone() };
            walker.dfs(st.ys.len(), st.pprod, st.tprod, st.value, &mut v)?;
            Ok(v)
        })
        .collect();
    for part in parts {
        visitor.absorb(part?);
    }
    Ok((visitor, used.load(Ordering::Relaxed)))
}

fn expand(t: &Tables, st: &State, max_depth: usize) -> Result<Vec<State>> {
    let k = st.ys.len();
    if k + 1 > max_depth {
        return Err(depth_error(max_depth));
    }
    let l = t.ell[k];
    let mut out = Vec::new();
    if t.ell[k + 1] == l {
        for (pos, &q) in t.q.iter().enumerate() {
            let mut ys = st.ys.clone();
            ys.push(pos as u16);
            let tprod = st.tprod * q;
            let value = st.pprod * tprod * t.scale[k + 1];
            out.push(State { xs: st.xs.clone(), ys, pprod: st.pprod, tprod, value });
        }
    } else {
        let head = st.ys[l] as usize;
        let tbase = st.ys[l + 1..].iter().fold(1.0, |acc, &pos| acc * t.q[pos as usize]);
        for &(d, p) in &t.rows[head] {
            let pprod = st.pprod * p;
            for (pos, &q) in t.q.iter().enumerate() {
                let mut xs = st.xs.clone();
                xs.push(d);
                let mut ys = st.ys.clone();
                ys.push(pos as u16);
                let tprod = tbase * q;
                let value = pprod * tprod * t.scale[k + 1];
                out.push(State { xs, ys, pprod, tprod, value });
            }
        }
    }
    Ok(out)
}

fn depth_error(max_depth: usize) -> Error {
    Error::InvalidParam(format!("refinement would exceed depth {max_depth}"))
}

struct Walker<'a> {
    tables: &'a Tables,
    budget: &'a Budget<'a>,
    max_depth: usize,
    xs: Vec<u16>,
    ys: Vec<u16>,
}

impl Walker<'_> {
    fn dfs<V: Visitor>(&mut self, k: usize, pprod: f64, tprod: f64, value: f64, v: &mut V) -> Result<()> {
        if k + 1 > self.max_depth {
            return Err(depth_error(self.max_depth));
        }
        let t = self.tables;
        let l = t.ell[k];
        let scale = t.scale[k + 1];
        if t.ell[k + 1] == l {
            for (pos, &q) in t.q.iter().enumerate() {
                let tp = tprod * q;
                let w = pprod * tp;
                let val = w * scale;
                self.ys.push(pos as u16);
                self.budget.tick()?;
                let view =
                    NodeView { depth: k + 1, xs: &self.xs, ys: &self.ys, weight: w, value: val, parent_value: value };
                if v.visit(&view) {
                    self.dfs(k + 1, pprod, tp, val, v)?;
                }
                self.ys.pop();
            }
        } else {
            let head = self.ys[l] as usize;
            let tbase = self.ys[l + 1..].iter().fold(1.0, |acc, &pos| acc * t.q[pos as usize]);
            for &(d, p) in &t.rows[head] {
                let pp = pprod * p;
                self.xs.push(d);
                for (pos, &q) in t.q.iter().enumerate() {
                    let tp = tbase * q;
                    let w = pp * tp;
                    let val = w * scale;
                    self.ys.push(pos as u16);
                    self.budget.tick()?;
                    let view = NodeView {
                        depth: k + 1,
                        xs: &self.xs,
                        ys: &self.ys,
                        weight: w,
                        value: val,
                        parent_value: value,
                    };
                    if v.visit(&view) {
                        self.dfs(k + 1, pp, tp, val, v)?;
                    }
                    self.ys.pop();
                }
                self.xs.pop();
            }
        }
        Ok(())
    }
}

/// Depth bound for a traversal that stops below `threshold`: every step
/// multiplies `mu m^{-|.|r}` by at most `qmax m^{-r}`.
pub(crate) fn depth_bound(carpet: &Carpet, r: f64, threshold: f64) -> usize {
    let step = carpet.derived().qmax * depth_scale(carpet.m(), r, 1);
    let levels = (threshold.ln() / step.ln()).ceil();
    if levels.is_finite() && levels > 0.0 {
        levels as usize + 2
    } else {
        2
    }
}

/// Collects every word of a fixed depth.
pub(crate) struct LevelVisitor {
    pub depth: usize,
    pub nodes: Vec<(Vec<u16>, Vec<u16>, f64)>,
}

impl Visitor for LevelVisitor {
    fn fork(&self) -> Self {
        LevelVisitor { depth: self.depth, nodes: Vec::new() }
    }

    fn visit(&mut self, node: &NodeView<'_>) -> bool {
        if node.depth == self.depth {
            self.nodes.push((node.xs.to_vec(), node.ys.to_vec(), node.weight));
            false
        } else {
            true
        }
    }

    fn absorb(&mut self, other: Self) {
        self.nodes.extend(other.nodes);
    }
}

/// All words of depth `depth` (the set `Omega_depth`), in tree order.
pub fn level_words(carpet: &Carpet, depth: usize, budget: u64) -> Result<Vec<Word>> {
    if depth == 0 {
        return Err(Error::InvalidParam("depth must be at least 1".into()));
    }
    let (v, _) = traverse(carpet, 0.0, depth, budget, LevelVisitor { depth, nodes: Vec::new() })?;
    Ok(v.nodes
        .into_iter()
        .map(|(xs, ys, weight)| {
            NodeView { depth, xs: &xs, ys: &ys, weight, value: weight, parent_value: 1.0 }.to_word(carpet)
        })
        .collect())
}

/// `card(Omega_k) = N^{ell(k)} card(G_y)^{k - ell(k)}`, saturating.
pub fn level_size(carpet: &Carpet, depth: usize) -> u64 {
    let l = carpet.ell(depth) as u32;
    let n = carpet.len() as u64;
    let g = carpet.derived().gy.len() as u64;
    n.saturating_pow(l).saturating_mul(g.saturating_pow(depth as u32 - l))
}
