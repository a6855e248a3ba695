//! Finite maximal antichains of approximate squares and their statistics.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::sum::CompensatedSum;
use crate::symbolic::tree::{depth_bound, traverse, NodeView, Visitor, DEFAULT_NODE_BUDGET};
use crate::symbolic::word::{depth_scale, parent_flat, Word};

/// Which antichain to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AntichainKind {
    /// `Gamma_{j,r}`: stop once `mu m^{-|.|r}` drops below `eta_r / j`.
    GammaJR { j: f64, r: f64 },
    /// `Lambda_j`: stop once `mu` drops below `eta_0 / j`.
    Lambda0J { j: f64 },
    /// `~Lambda_{k,r}`: stop once `mu m^{-|.|r}` drops below `exp(-k lambda_1)`.
    LambdaTildeKR { k: usize, r: f64 },
}

impl AntichainKind {
    /// Exponent `r` of the depth scaling (zero for `Lambda_j`).
    pub fn r(&self) -> f64 {
        match *self {
            AntichainKind::GammaJR { r, .. } | AntichainKind::LambdaTildeKR { r, .. } => r,
            AntichainKind::Lambda0J { .. } => 0.0,
        }
    }

    /// Short name used in CLI output.
    pub fn name(&self) -> &'static str {
        match self {
            AntichainKind::GammaJR { .. } => "gamma",
            AntichainKind::Lambda0J { .. } => "lambda0",
            AntichainKind::LambdaTildeKR { .. } => "lambda-tilde",
        }
    }

    /// Membership threshold on `mu m^{-|.|r}`.
    pub fn threshold(&self, carpet: &Carpet) -> Result<f64> {
        let d = carpet.derived();
        match *self {
            AntichainKind::GammaJR { j, r } => {
                check_j(j)?;
                check_r(r)?;
                Ok(d.eta_lower(r) / j)
            }
            AntichainKind::Lambda0J { j } => {
                check_j(j)?;
                if !d.separated {
                    return Err(Error::SeparationRequired);
                }
                Ok(d.eta0 / j)
            }
            AntichainKind::LambdaTildeKR { k, r } => {
                check_r(r)?;
                if k == 0 {
                    return Err(Error::InvalidParam("k must be at least 1".into()));
                }
                Ok((-(k as f64) * d.lambda1(r)).exp())
            }
        }
    }
}

impl fmt::Display for AntichainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AntichainKind::GammaJR { j, r } => write!(f, "gamma(j={j}, r={r})"),
            AntichainKind::Lambda0J { j } => write!(f, "lambda0(j={j})"),
            AntichainKind::LambdaTildeKR { k, r } => write!(f, "lambda-tilde(k={k}, r={r})"),
        }
    }
}

fn check_j(j: f64) -> Result<()> {
    if j.is_finite() && j >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("j = {j} must be at least 1")))
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("r = {r} must be positive")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Cap on generated tree nodes.
    pub budget: u64,
    /// Keep the member words (otherwise only statistics are retained).
    pub collect_words: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { budget: DEFAULT_NODE_BUDGET, collect_words: false }
    }
}

/// Streaming statistics of an antichain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AntichainStats {
    pub cardinality: u64,
    pub min_depth: usize,
    pub max_depth: usize,
    /// `sum mu`.
    pub sum_weight: f64,
    /// `sum mu m^{-|.|r}`.
    pub sum_value: f64,
    /// `sum mu log mu`.
    pub sum_weight_log_weight: f64,
    /// `sum mu log m^{-|.|}`.
    pub sum_weight_log_scale: f64,
    /// Tree nodes generated while building.
    pub nodes_visited: u64,
}

#[derive(Default)]
struct Acc {
    count: u64,
    min_depth: usize,
    max_depth: usize,
    weight: CompensatedSum,
    value: CompensatedSum,
    wlogw: CompensatedSum,
    wlogs: CompensatedSum,
}

impl Acc {
    fn merge(&mut self, o: &Acc) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            self.min_depth = o.min_depth;
            self.max_depth = o.max_depth;
        } else {
            self.min_depth = self.min_depth.min(o.min_depth);
            self.max_depth = self.max_depth.max(o.max_depth);
        }
        self.count += o.count;
        self.weight.merge(&o.weight);
        self.value.merge(&o.value);
        self.wlogw.merge(&o.wlogw);
        self.wlogs.merge(&o.wlogs);
    }
}

struct AntichainVisitor {
    threshold: f64,
    neg_log_m: f64,
    keep_values: bool,
    keep_words: bool,
    acc: Acc,
    values: Vec<f64>,
    words: Vec<(Vec<u16>, Vec<u16>)>,
}

impl Visitor for AntichainVisitor {
    fn fork(&self) -> Self {
        AntichainVisitor {
            threshold: self.threshold,
            neg_log_m: self.neg_log_m,
            keep_values: self.keep_values,
            keep_words: self.keep_words,
            acc: Acc::default(),
            values: Vec::new(),
            words: Vec::new(),
        }
    }

    fn visit(&mut self, node: &NodeView<'_>) -> bool {
        if node.value >= self.threshold {
            return true;
        }
        let a = &mut self.acc;
        if a.count == 0 {
            a.min_depth = node.depth;
            a.max_depth = node.depth;
        } else {
            a.min_depth = a.min_depth.min(node.depth);
            a.max_depth = a.max_depth.max(node.depth);
        }
        a.count += 1;
        a.weight.add(node.weight);
        a.value.add(node.value);
        a.wlogw.add(node.weight * node.weight.ln());
        a.wlogs.add(node.weight * node.depth as f64 * self.neg_log_m);
        if self.keep_values {
            self.values.push(node.value);
        }
        if self.keep_words {
            self.words.push((node.xs.to_vec(), node.ys.to_vec()));
        }
        false
    }

    fn absorb(&mut self, other: Self) {
        self.acc.merge(&other.acc);
        self.values.extend(other.values);
        self.words.extend(other.words);
    }
}

/// A finite maximal antichain.
#[derive(Debug, Clone)]
pub struct Antichain {
    pub kind: AntichainKind,
    /// Membership threshold on `mu m^{-|.|r}`.
    pub threshold: f64,
    pub stats: AntichainStats,
    /// Distinct member values `mu m^{-|.|r}` with multiplicities, ascending.
    /// Empty for `Lambda_j`.
    pub value_histogram: Vec<(f64, u64)>,
    /// Members in tree order, when requested.
    pub words: Option<Vec<Word>>,
}

impl Antichain {
    pub fn r(&self) -> f64 {
        self.kind.r()
    }

    pub fn cardinality(&self) -> u64 {
        self.stats.cardinality
    }
}

/// Builds the antichain by refining from the depth-one words until the
/// membership predicate fires. Equality with the threshold keeps refining.
pub fn build_antichain(carpet: &Carpet, kind: AntichainKind, opts: BuildOptions) -> Result<Antichain> {
    let threshold = kind.threshold(carpet)?;
    let r = kind.r();
    let keep_values = !matches!(kind, AntichainKind::Lambda0J { .. });
    let visitor = AntichainVisitor {
        threshold,
        neg_log_m: -(carpet.m() as f64).ln(),
        keep_values,
        keep_words: opts.collect_words,
        acc: Acc::default(),
        values: Vec::new(),
        words: Vec::new(),
    };
    let max_depth = depth_bound(carpet, r, threshold);
    let (v, nodes) = traverse(carpet, r, max_depth, opts.budget, visitor)?;

    let mut values = v.values;
    values.sort_by(f64::total_cmp);
    let mut value_histogram: Vec<(f64, u64)> = Vec::new();
    for x in values {
        match value_histogram.last_mut() {
            Some((last, count)) if *last == x => *count += 1,
            _ => value_histogram.push((x, 1)),
        }
    }

    let words = opts.collect_words.then(|| {
        v.words
            .iter()
            .map(|(xs, ys)| {
                NodeView { depth: ys.len(), xs, ys, weight: 0.0, value: 0.0, parent_value: 0.0 }.to_word(carpet)
            })
            .collect()
    });
    let a = v.acc;
    Ok(Antichain {
        kind,
        threshold,
        stats: AntichainStats {
            cardinality: a.count,
            min_depth: a.min_depth,
            max_depth: a.max_depth,
            sum_weight: a.weight.value(),
            sum_value: a.value.value(),
            sum_weight_log_weight: a.wlogw.value(),
            sum_weight_log_scale: a.wlogs.value(),
            nodes_visited: nodes,
        },
        value_histogram,
        words,
    })
}

/// Result of [`antichain_exponent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    /// `t` with `sum (mu m^{-|.|r})^{t/(t+r)} = 1`.
    pub t: f64,
    /// `u = t / (t + r)`.
    pub u: f64,
    /// `sum v^u - 1` at the returned `u`.
    pub residual: f64,
}

/// `sum count * exp(u ln v)` over the histogram.
fn power_sum(logs: &[(f64, f64)], u: f64) -> f64 {
    let mut s = CompensatedSum::new();
    for &(lv, c) in logs {
        s.add(c * (u * lv).exp());
    }
    s.value()
}

/// The exponent `t_{j,r}` of a `Gamma_{j,r}` (or `~Lambda_{k,r}`) antichain.
pub fn antichain_exponent(antichain: &Antichain) -> Result<Exponent> {
    let r = antichain.r();
    if matches!(antichain.kind, AntichainKind::Lambda0J { .. }) {
        return Err(Error::InvalidParam("exponent needs an antichain with r > 0".into()));
    }
    if antichain.stats.cardinality < 2 {
        return Err(Error::NoBracket(format!("antichain of {} word(s) has no exponent", antichain.stats.cardinality)));
    }
    let logs: Vec<(f64, f64)> = antichain.value_histogram.iter().map(|&(v, c)| (v.ln(), c as f64)).collect();
    exponent_from_logs(&logs, r)
}

fn exponent_from_logs(logs: &[(f64, f64)], r: f64) -> Result<Exponent> {
    let f = |u: f64| power_sum(logs, u) - 1.0;
    if f(0.0) <= 0.0 || f(1.0) >= 0.0 {
        return Err(Error::NoBracket(format!("power sum minus one: {} at u=0, {} at u=1", f(0.0), f(1.0))));
    }
    let root = bisect(f, 0.0, 1.0, 1e-14)?;
    Ok(Exponent { t: r * root.x / (1.0 - root.x), u: root.x, residual: root.fx })
}

/// Exponent of an explicit list of member words.
pub fn words_exponent(carpet: &Carpet, words: &[Word], r: f64) -> Result<Exponent> {
    check_r(r)?;
    if words.len() < 2 {
        return Err(Error::NoBracket(format!("antichain of {} word(s) has no exponent", words.len())));
    }
    let logs: Vec<(f64, f64)> = words.iter().map(|w| (w.value(carpet, r).ln(), 1.0)).collect();
    exponent_from_logs(&logs, r)
}

/// `t_j = sum mu log mu / sum mu log m^{-|.|}` of a `Lambda_j` antichain.
pub fn antichain_entropy_ratio(antichain: &Antichain) -> Result<f64> {
    if !matches!(antichain.kind, AntichainKind::Lambda0J { .. }) {
        return Err(Error::InvalidParam("entropy ratio needs a Lambda_j antichain".into()));
    }
    Ok(antichain.stats.sum_weight_log_weight / antichain.stats.sum_weight_log_scale)
}

/// Checks the two-sided membership predicate for every collected word:
/// `value(parent) >= threshold > value(word)`, with the depth-one parent
/// taken as value one.
pub fn check_membership(carpet: &Carpet, antichain: &Antichain) -> Result<()> {
    let words = collected(antichain)?;
    let r = antichain.r();
    for w in words {
        let v = w.weight() * depth_scale(carpet.m(), r, w.depth());
        let parent = match parent_flat(carpet, w) {
            Ok(p) => p.weight() * depth_scale(carpet.m(), r, p.depth()),
            Err(_) => 1.0,
        };
        if !(parent >= antichain.threshold && antichain.threshold > v) {
            return Err(Error::InvalidWord(format!(
                "{w:?} violates membership: parent {parent}, value {v}, threshold {}",
                antichain.threshold
            )));
        }
    }
    Ok(())
}

/// Checks that no member refines another: no proper prefix of a member
/// is itself a member.
pub fn check_incomparable(carpet: &Carpet, antichain: &Antichain) -> Result<()> {
    let words = collected(antichain)?;
    let members: HashSet<(&[u32], &[u32])> = words.iter().map(|w| (w.xs(), w.ys())).collect();
    if members.len() != words.len() {
        return Err(Error::InvalidWord("duplicate member".into()));
    }
    for w in words {
        for k in 1..w.depth() {
            let l = carpet.ell(k);
            if members.contains(&(&w.xs()[..l], &w.ys()[..k])) {
                return Err(Error::InvalidWord(format!("{w:?} refines another member")));
            }
        }
    }
    Ok(())
}

fn collected(antichain: &Antichain) -> Result<&[Word]> {
    antichain.words.as_deref().ok_or_else(|| Error::InvalidParam("antichain was built without collecting words".into()))
}

/// Writes the antichain as CSV rows `depth,pairs,tail,weight,value`.
pub fn write_antichain_csv<W: Write>(carpet: &Carpet, antichain: &Antichain, out: &mut W) -> Result<()> {
    let words = collected(antichain)?;
    let r = antichain.r();
    writeln!(out, "depth,pairs,tail,weight,value")?;
    for w in words {
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e}",
            w.depth(),
            w.pairs_string(),
            w.tail_string(),
            w.weight(),
            w.value(carpet, r)
        )?;
    }
    Ok(())
}
