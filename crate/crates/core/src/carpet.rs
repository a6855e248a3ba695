//! Carpet specifications, validation and the scalar quantities derived from them.
//!
//! A carpet is given by two bases `n > m`, a digit set `G` of grid cells
//! `(i, j)` with `0 <= i < n`, `0 <= j < m`, and a probability `p_ij` per
//! digit. Validation produces a [`Carpet`], which is immutable and carries
//! every derived scalar used by the symbolic, dimension and quantizer code.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|sum p - 1|` before renormalization.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Depth up to which `ell(k)` is tabulated at construction.
const ELL_TABLE_LEN: usize = 2048;

/// One digit of the carpet together with its probability weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Digit {
    pub i: u32,
    pub j: u32,
    pub p: f64,
}

/// Raw, unvalidated carpet specification.
#[derive(Debug, Clone, PartialEq)]
pub struct CarpetSpec {
    pub n: u32,
    pub m: u32,
    pub digits: Vec<Digit>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n: u32,
    m: u32,
    digits: Vec<ConfigDigit>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ConfigDigit {
    i: u32,
    j: u32,
    p: String,
}

impl CarpetSpec {
    pub fn new(n: u32, m: u32, digits: Vec<Digit>) -> Self {
        Self { n, m, digits }
    }

    /// Builds a spec from `(i, j, p)` triples.
    pub fn from_triples(n: u32, m: u32, triples: &[(u32, u32, f64)]) -> Self {
        let digits = triples.iter().map(|&(i, j, p)| Digit { i, j, p }).collect();
        Self { n, m, digits }
    }

    /// Parses the JSON config format:
    /// `{"n": int, "m": int, "digits": [{"i": int, "j": int, "p": "decimal"}, ...]}`.
    ///
    /// Unknown keys are rejected. Probabilities are decimal strings.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: ConfigFile = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {} column {}: {}", e.line(), e.column(), e)))?;
        let mut digits = Vec::with_capacity(raw.digits.len());
        for (idx, d) in raw.digits.iter().enumerate() {
            let p = parse_decimal(&d.p)
                .map_err(|msg| Error::BadProbabilities(format!("digits[{idx}].p = {:?}: {msg}", d.p)))?;
            digits.push(Digit { i: d.i, j: d.j, p });
        }
        Ok(Self { n: raw.n, m: raw.m, digits })
    }

    /// Serializes to the JSON config format. Probabilities are written with
    /// enough digits to round-trip.
    pub fn to_json_string(&self) -> String {
        let raw = ConfigFile {
            n: self.n,
            m: self.m,
            digits: self.digits.iter().map(|d| ConfigDigit { i: d.i, j: d.j, p: format!("{:?}", d.p) }).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("config serializes")
    }
}

fn parse_decimal(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let ok = !t.is_empty() && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    if !ok {
        return Err("not a decimal number".into());
    }
    let v: f64 = t.parse().map_err(|e| format!("{e}"))?;
    if !v.is_finite() {
        return Err("not finite".into());
    }
    Ok(v)
}

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &PlanePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Scalars derived from a validated carpet.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedQuantities {
    /// `log m / log n`.
    pub theta: f64,
    /// Distinct column digits, ascending.
    pub gx: Vec<u32>,
    /// Distinct row digits, ascending.
    pub gy: Vec<u32>,
    /// Column digits of each row, in `gy` order.
    pub gxj: Vec<Vec<u32>>,
    /// Row marginals `q_j`, in `gy` order.
    pub qj: Vec<f64>,
    pub qmin: f64,
    pub qmax: f64,
    pub pmin: f64,
    pub pmax: f64,
    /// `sqrt(n^2 + 1)`, the diameter constant of approximate squares.
    pub delta: f64,
    /// Weight threshold of the geometric-mean antichains.
    pub eta0: f64,
    /// Whether both digit projections have pairwise gaps of at least one.
    pub separated: bool,
    m: f64,
    ratio_max_pq: f64,
}

impl DerivedQuantities {
    fn m_pow(&self, r: f64) -> f64 {
        self.m.powf(-r)
    }

    /// `min_{(i,j), k} p_ij q_k m^{-r}`.
    pub fn r1(&self, r: f64) -> f64 {
        self.pmin * self.qmin * self.m_pow(r)
    }

    /// `max_{(i,j)} p_ij / q_j m^{-r}`.
    pub fn r2(&self, r: f64) -> f64 {
        self.ratio_max_pq * self.m_pow(r)
    }

    /// Lower one-step ratio bound for `mu m^{-|.|r}`.
    pub fn eta_lower(&self, r: f64) -> f64 {
        self.r1(r).min(self.qmin * self.m_pow(r))
    }

    /// Upper one-step ratio bound for `mu m^{-|.|r}`.
    pub fn eta_upper(&self, r: f64) -> f64 {
        self.r2(r).max(self.qmax * self.m_pow(r))
    }

    pub fn lambda1(&self, r: f64) -> f64 {
        -self.eta_lower(r).ln()
    }

    pub fn lambda2(&self, r: f64) -> f64 {
        -self.eta_upper(r).ln()
    }
}

/// A validated carpet together with its self-affine measure.
#[derive(Debug, Clone)]
pub struct Carpet {
    n: u32,
    m: u32,
    digits: Vec<Digit>,
    derived: DerivedQuantities,
    index: HashMap<(u32, u32), usize>,
    /// Row position in `gy` for each `j < m`.
    row_pos: Vec<Option<usize>>,
    /// Per row (in `gy` order): digit indices of that row.
    row_digits: Vec<Vec<usize>>,
    ell_table: Vec<usize>,
}

impl Carpet {
    /// Validates a raw spec. Probabilities are checked to sum to one within
    /// [`PROBABILITY_SUM_TOL`] and then renormalized.
    pub fn new(raw: CarpetSpec) -> Result<Self> {
        validate_spec(raw)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::new(CarpetSpec::from_json_str(text)?)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Digits in configuration order, with renormalized probabilities.
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn derived(&self) -> &DerivedQuantities {
        &self.derived
    }

    pub fn theta(&self) -> f64 {
        self.derived.theta
    }

    pub fn spec(&self) -> CarpetSpec {
        CarpetSpec { n: self.n, m: self.m, digits: self.digits.clone() }
    }

    /// Number of digits `N`.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit_index(&self, i: u32, j: u32) -> Option<usize> {
        self.index.get(&(i, j)).copied()
    }

    pub fn p(&self, i: u32, j: u32) -> Option<f64> {
        self.digit_index(i, j).map(|d| self.digits[d].p)
    }

    /// Position of row `j` in `gy`, if the row is occupied.
    pub fn row_position(&self, j: u32) -> Option<usize> {
        self.row_pos.get(j as usize).copied().flatten()
    }

    /// Row marginal `q_j`; zero for unoccupied rows.
    pub fn q(&self, j: u32) -> f64 {
        self.row_position(j).map_or(0.0, |pos| self.derived.qj[pos])
    }

    /// Digit indices of the row at position `pos` in `gy`.
    pub fn row_digits(&self, pos: usize) -> &[usize] {
        &self.row_digits[pos]
    }

    /// `ell(k) = floor(k theta)`, the number of column digits of a depth-`k` word.
    ///
    /// Computed exactly: near-integer values of `k theta` are settled by
    /// comparing `n^l` with `m^k` in integer arithmetic.
    pub fn ell(&self, k: usize) -> usize {
        match self.ell_table.get(k) {
            Some(&l) => l,
            None => exact_ell(k, self.n, self.m, self.derived.theta),
        }
    }

    /// Applies `f_ij(x, y) = ((x + i)/n, (y + j)/m)`.
    pub fn apply_map(&self, i: u32, j: u32, pt: PlanePoint) -> Result<PlanePoint> {
        if self.digit_index(i, j).is_none() {
            return Err(Error::UnknownDigit { i, j });
        }
        Ok(PlanePoint { x: (pt.x + i as f64) / self.n as f64, y: (pt.y + j as f64) / self.m as f64 })
    }

    /// Random-iteration samples of the self-affine measure.
    ///
    /// Starts at the centre of the unit square, discards `burn_in` points and
    /// returns the next `count`. Deterministic in `seed`.
    pub fn chaos_sample(&self, seed: u64, count: usize, burn_in: usize) -> Result<Vec<PlanePoint>> {
        if count == 0 {
            return Err(Error::InvalidCount(count));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist =
            WeightedIndex::new(self.digits.iter().map(|d| d.p)).map_err(|e| Error::BadProbabilities(e.to_string()))?;
        let (nf, mf) = (self.n as f64, self.m as f64);
        let mut pt = PlanePoint::new(0.5, 0.5);
        let mut out = Vec::with_capacity(count);
        for step in 0..burn_in + count {
            let d = self.digits[dist.sample(&mut rng)];
            pt = PlanePoint { x: (pt.x + d.i as f64) / nf, y: (pt.y + d.j as f64) / mf };
            if step >= burn_in {
                out.push(pt);
            }
        }
        Ok(out)
    }
}

fn exact_ell(k: usize, n: u32, m: u32, theta: f64) -> usize {
    let approx = k as f64 * theta;
    let near = approx.round();
    if (approx - near).abs() > 1e-9 * approx.max(1.0) {
        return approx.floor() as usize;
    }
    // l = near is admissible iff n^l <= m^k.
    let l = near as u32;
    let lhs = BigUint::from(n).pow(l);
    let rhs = BigUint::from(m).pow(k as u32);
    if lhs <= rhs {
        l as usize
    } else {
        (l - 1) as usize
    }
}

/// Checks every invariant of a raw spec and computes the derived quantities.
pub fn validate_spec(raw: CarpetSpec) -> Result<Carpet> {
    let CarpetSpec { n, m, mut digits } = raw;
    if m < 2 || m >= n {
        return Err(Error::DegenerateCarpet(format!("need 2 <= m < n, got n = {n}, m = {m}")));
    }
    let mut index = HashMap::new();
    for (idx, d) in digits.iter().enumerate() {
        if d.i >= n || d.j >= m {
            return Err(Error::OutOfRangeDigit { i: d.i, j: d.j, n, m });
        }
        if index.insert((d.i, d.j), idx).is_some() {
            return Err(Error::DuplicateDigit { i: d.i, j: d.j });
        }
    }
    if digits.len() < 2 {
        return Err(Error::DegenerateCarpet(format!("need at least 2 digits, got {}", digits.len())));
    }
    for d in &digits {
        if !(d.p.is_finite() && d.p > 0.0) {
            return Err(Error::BadProbabilities(format!("p({}, {}) = {} is not positive", d.i, d.j, d.p)));
        }
    }
    let sum: f64 = digits.iter().map(|d| d.p).sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::BadProbabilities(format!("probabilities sum to {sum}, not 1")));
    }
    renormalize(&mut digits, sum);

    let gx: Vec<u32> = digits.iter().map(|d| d.i).collect::<BTreeSet<_>>().into_iter().collect();
    let gy: Vec<u32> = digits.iter().map(|d| d.j).collect::<BTreeSet<_>>().into_iter().collect();
    if gx.len() < 2 || gy.len() < 2 {
        return Err(Error::DegenerateCarpet(format!(
            "projections need at least 2 digits each, got card(Gx) = {}, card(Gy) = {}",
            gx.len(),
            gy.len()
        )));
    }

    let mut row_pos = vec![None; m as usize];
    for (pos, &j) in gy.iter().enumerate() {
        row_pos[j as usize] = Some(pos);
    }
    let mut row_digits: Vec<Vec<usize>> = vec![Vec::new(); gy.len()];
    for (idx, d) in digits.iter().enumerate() {
        row_digits[row_pos[d.j as usize].unwrap()].push(idx);
    }
    for row in &mut row_digits {
        row.sort_by_key(|&idx| digits[idx].i);
    }
    let gxj: Vec<Vec<u32>> = row_digits.iter().map(|row| row.iter().map(|&idx| digits[idx].i).collect()).collect();
    let qj: Vec<f64> = row_digits.iter().map(|row| row.iter().map(|&idx| digits[idx].p).sum()).collect();

    let qmin = qj.iter().copied().fold(f64::INFINITY, f64::min);
    let qmax = qj.iter().copied().fold(0.0, f64::max);
    let pmin = digits.iter().map(|d| d.p).fold(f64::INFINITY, f64::min);
    let pmax = digits.iter().map(|d| d.p).fold(0.0, f64::max);
    let ratio_max_pq = digits.iter().map(|d| d.p / qj[row_pos[d.j as usize].unwrap()]).fold(0.0, f64::max);
    let theta = (m as f64).ln() / (n as f64).ln();
    let separated = min_gap(&gx) >= 1 && min_gap(&gy) >= 1;

    let derived = DerivedQuantities {
        theta,
        gx,
        gy,
        gxj,
        qj,
        qmin,
        qmax,
        pmin,
        pmax,
        delta: ((n as f64).powi(2) + 1.0).sqrt(),
        eta0: (pmin * qmin).min(qmin),
        separated,
        m: m as f64,
        ratio_max_pq,
    };
    let ell_table = (0..ELL_TABLE_LEN).map(|k| exact_ell(k, n, m, theta)).collect();
    Ok(Carpet { n, m, digits, derived, index, row_pos, row_digits, ell_table })
}

fn min_gap(sorted: &[u32]) -> u32 {
    sorted.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(u32::MAX)
}

/// Divides by the sum, then nudges the last probability so that the
/// left-to-right sum is exactly one.
fn renormalize(digits: &mut [Digit], sum: f64) {
    for d in digits.iter_mut() {
        d.p /= sum;
    }
    let last = digits.len() - 1;
    let head: f64 = digits[..last].iter().map(|d| d.p).sum();
    digits[last].p = 1.0 - head;
    for _ in 0..8 {
        let total = head + digits[last].p;
        if total == 1.0 {
            break;
        }
        digits[last].p = if total > 1.0 { digits[last].p.next_down() } else { digits[last].p.next_up() };
    }
}
