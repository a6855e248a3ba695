use std::fmt;

use crate::carpet::Carpet;
use crate::error::{Error, Result};

/// Address of an approximate square.
///
/// A depth-`k` word carries `ell(k)` column digits and `k` row digits. Its
/// first `ell(k)` row digits pair with the column digits (the digit pairs);
/// the remaining `k - ell(k)` row digits form the tail.
#[derive(Clone, PartialEq)]
pub struct Word {
    xs: Vec<u32>,
    ys: Vec<u32>,
    weight: f64,
    log_weight: f64,
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({} | {})", self.pairs_string(), self.tail_string())
    }
}

impl Word {
    /// Builds a word from its digit pairs and tail, checking that every pair
    /// is a digit, every tail symbol an occupied row, and that the number of
    /// pairs matches `ell(depth)`.
    pub fn new(carpet: &Carpet, pairs: &[(u32, u32)], tail: &[u32]) -> Result<Word> {
        let depth = pairs.len() + tail.len();
        if depth == 0 {
            return Err(Error::InvalidWord("empty word".into()));
        }
        if pairs.len() != carpet.ell(depth) {
            return Err(Error::InvalidWord(format!(
                "depth {depth} needs {} pairs, got {}",
                carpet.ell(depth),
                pairs.len()
            )));
        }
        for &(i, j) in pairs {
            if carpet.digit_index(i, j).is_none() {
                return Err(Error::UnknownDigit { i, j });
            }
        }
        for &j in tail {
            if carpet.row_position(j).is_none() {
                return Err(Error::InvalidWord(format!("row {j} is not occupied")));
            }
        }
        let xs = pairs.iter().map(|p| p.0).collect();
        let ys = pairs.iter().map(|p| p.1).chain(tail.iter().copied()).collect();
        Ok(Self::from_digits(carpet, xs, ys))
    }

    /// Depth-one word `(j)`.
    pub fn root(carpet: &Carpet, j: u32) -> Result<Word> {
        Word::new(carpet, &[], &[j])
    }

    /// All words of depth one, in row order.
    pub fn roots(carpet: &Carpet) -> Vec<Word> {
        carpet.derived().gy.iter().map(|&j| Word::root(carpet, j).expect("occupied row")).collect()
    }

    /// Assumes `xs`/`ys` already form a valid word.
    pub(crate) fn from_digits(carpet: &Carpet, xs: Vec<u32>, ys: Vec<u32>) -> Word {
        let (weight, log_weight) = product_weight(carpet, &xs, &ys);
        Word { xs, ys, weight, log_weight }
    }

    pub fn depth(&self) -> usize {
        self.ys.len()
    }

    /// Column digits `i_1 .. i_ell`.
    pub fn xs(&self) -> &[u32] {
        &self.xs
    }

    /// All row digits `j_1 .. j_k`.
    pub fn ys(&self) -> &[u32] {
        &self.ys
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn tail(&self) -> &[u32] {
        &self.ys[self.xs.len()..]
    }

    /// `mu(F_sigma)`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn log_weight(&self) -> f64 {
        self.log_weight
    }

    /// `mu(F_sigma) m^{-|sigma| r}`.
    pub fn value(&self, carpet: &Carpet, r: f64) -> f64 {
        self.weight * depth_scale(carpet.m(), r, self.depth())
    }

    /// Recomputes the weight from the digits.
    pub fn recompute_weight(&self, carpet: &Carpet) -> f64 {
        product_weight(carpet, &self.xs, &self.ys).0
    }

    /// `self` is refined by `other`: `F_other` is contained in `F_self`.
    pub fn is_refined_by(&self, other: &Word) -> bool {
        self.depth() <= other.depth() && other.ys.starts_with(&self.ys) && other.xs.starts_with(&self.xs)
    }

    /// Neither word refines the other.
    pub fn incomparable(&self, other: &Word) -> bool {
        !self.is_refined_by(other) && !other.is_refined_by(self)
    }

    pub(crate) fn pairs_string(&self) -> String {
        self.pairs().map(|(i, j)| format!("{i}:{j}")).collect::<Vec<_>>().join(";")
    }

    pub(crate) fn tail_string(&self) -> String {
        self.tail().iter().map(|j| j.to_string()).collect::<Vec<_>>().join(";")
    }
}

/// `m^{-k r}`, shared by every code path that scales weights by depth.
#[inline]
pub(crate) fn depth_scale(m: u32, r: f64, k: usize) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        (m as f64).powf(-r * k as f64)
    }
}

/// Left-to-right products `prod p` and `prod q`, multiplied at the end.
fn product_weight(carpet: &Carpet, xs: &[u32], ys: &[u32]) -> (f64, f64) {
    let mut pprod = 1.0;
    let mut log_w = 0.0;
    for (&i, &j) in xs.iter().zip(ys) {
        let p = carpet.p(i, j).expect("digit");
        pprod *= p;
        log_w += p.ln();
    }
    let mut tprod = 1.0;
    for &j in &ys[xs.len()..] {
        let q = carpet.q(j);
        tprod *= q;
        log_w += q.ln();
    }
    (pprod * tprod, log_w)
}

/// Children of `word` one level down, each with its weight ratio.
///
/// Without a new column digit the ratio is `q_j`; otherwise the tail head
/// `j*` is promoted into a pair `(i, j*)` and the ratio is `p_{i j*} q_j / q_{j*}`.
pub fn children(carpet: &Carpet, word: &Word) -> Vec<(Word, f64)> {
    let k = word.depth();
    let l = carpet.ell(k);
    let gy = &carpet.derived().gy;
    let mut out = Vec::new();
    if carpet.ell(k + 1) == l {
        for &j in gy {
            let mut ys = word.ys.clone();
            ys.push(j);
            out.push((Word::from_digits(carpet, word.xs.clone(), ys), carpet.q(j)));
        }
    } else {
        let head = word.ys[l];
        let q_head = carpet.q(head);
        let pos = carpet.row_position(head).expect("occupied row");
        for &d in carpet.row_digits(pos) {
            let digit = carpet.digits()[d];
            for &j in gy {
                let mut xs = word.xs.clone();
                xs.push(digit.i);
                let mut ys = word.ys.clone();
                ys.push(j);
                let ratio = digit.p * carpet.q(j) / q_head;
                out.push((Word::from_digits(carpet, xs, ys), ratio));
            }
        }
    }
    out
}

/// The unique word one level coarser whose square contains `word`'s square.
pub fn parent_flat(carpet: &Carpet, word: &Word) -> Result<Word> {
    let k = word.depth();
    if k < 2 {
        return Err(Error::RootHasNoParent);
    }
    let mut xs = word.xs.clone();
    let mut ys = word.ys.clone();
    ys.pop();
    if carpet.ell(k - 1) < carpet.ell(k) {
        xs.pop();
    }
    Ok(Word::from_digits(carpet, xs, ys))
}

/// The rectangle `F_sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareGeometry {
    /// `[x0, x0 + width]`.
    pub x0: f64,
    pub width: f64,
    /// `[y0, y0 + height]`.
    pub y0: f64,
    pub height: f64,
    /// Integer offset `p` with `x0 = p / n^ell`, when it fits in 128 bits.
    pub p: Option<u128>,
    /// Integer offset `q` with `y0 = q / m^k`, when it fits in 128 bits.
    pub q: Option<u128>,
}

impl SquareGeometry {
    pub fn x_interval(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.width)
    }

    pub fn y_interval(&self) -> (f64, f64) {
        (self.y0, self.y0 + self.height)
    }

    pub fn diameter(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x0 + 0.5 * self.width, self.y0 + 0.5 * self.height)
    }

    pub fn contains(&self, other: &SquareGeometry) -> bool {
        let eps = 1e-12;
        other.x0 >= self.x0 - eps
            && other.x0 + other.width <= self.x0 + self.width + eps
            && other.y0 >= self.y0 - eps
            && other.y0 + other.height <= self.y0 + self.height + eps
    }
}

/// Geometry of the approximate square addressed by `word`.
pub fn square_geometry(carpet: &Carpet, word: &Word) -> SquareGeometry {
    let (x0, width) = adic_interval(&word.xs, carpet.n());
    let (y0, height) = adic_interval(&word.ys, carpet.m());
    SquareGeometry {
        x0,
        width,
        y0,
        height,
        p: adic_integer(&word.xs, carpet.n()),
        q: adic_integer(&word.ys, carpet.m()),
    }
}

pub(crate) fn adic_interval(digits: &[u32], base: u32) -> (f64, f64) {
    let b = base as f64;
    let start = digits.iter().rev().fold(0.0, |acc, &d| (acc + d as f64) / b);
    (start, b.powi(-(digits.len() as i32)))
}

fn adic_integer(digits: &[u32], base: u32) -> Option<u128> {
    digits.iter().try_fold(0u128, |acc, &d| acc.checked_mul(base as u128)?.checked_add(d as u128))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{balanced_rows_example, two_map};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_word(carpet: &Carpet, depth: usize, rng: &mut ChaCha8Rng) -> Word {
        let mut w = Word::roots(carpet).swap_remove(rng.random_range(0..carpet.derived().gy.len()));
        while w.depth() < depth {
            let mut kids = children(carpet, &w);
            w = kids.swap_remove(rng.random_range(0..kids.len())).0;
        }
        w
    }

    #[test]
    fn two_map_root_children_split_evenly() {
        let c = two_map();
        let root = Word::root(&c, 0).unwrap();
        let kids = children(&c, &root);
        assert_eq!(kids.len(), 2);
        for (kid, ratio) in &kids {
            assert_eq!(*ratio, 0.5);
            assert_eq!(kid.xs(), &[0]);
            assert_eq!(parent_flat(&c, kid).unwrap(), root);
        }
    }

    #[test]
    fn ratios_sum_to_one_and_stay_in_range() {
        let c = balanced_rows_example();
        let d = c.derived();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let depth = rng.random_range(1..14);
            let w = random_word(&c, depth, &mut rng);
            let kids = children(&c, &w);
            let total: f64 = kids.iter().map(|k| k.1).sum();
            assert!((total - 1.0).abs() < 1e-14);
            for (kid, ratio) in &kids {
                assert!((kid.weight() - w.weight() * ratio).abs() <= 1e-14 * kid.weight());
                assert_eq!(&parent_flat(&c, kid).unwrap(), &w);
                let r = kid.weight() / w.weight();
                assert!(r >= d.pmin * d.qmin / d.qmax * (1.0 - 1e-12) && r <= d.qmax * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn without_new_column_the_ratios_are_the_row_marginals() {
        let c = balanced_rows_example();
        let w = Word::new(&c, &[(1, 0)], &[2]).unwrap();
        assert_eq!(c.ell(3), c.ell(2));
        let ratios: Vec<f64> = children(&c, &w).iter().map(|k| k.1).collect();
        assert_eq!(ratios, c.derived().qj);
    }

    #[test]
    fn roots_have_no_parent() {
        let c = two_map();
        assert_eq!(parent_flat(&c, &Word::root(&c, 1).unwrap()), Err(Error::RootHasNoParent));
    }

    #[test]
    fn telescoped_weight_matches_product() {
        let c = balanced_rows_example();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut w = Word::root(&c, 0).unwrap();
        let mut telescoped = w.weight();
        for _ in 0..30 {
            let mut kids = children(&c, &w);
            let (kid, ratio) = kids.swap_remove(rng.random_range(0..kids.len()));
            telescoped *= ratio;
            w = kid;
            assert!((telescoped - w.recompute_weight(&c)).abs() <= 1e-13 * telescoped);
            assert!((w.log_weight() - w.weight().ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn geometry_nests_and_respects_diameter_bounds() {
        let c = balanced_rows_example();
        let delta = c.derived().delta;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let w = random_word(&c, rng.random_range(2..12), &mut rng);
            let g = square_geometry(&c, &w);
            let scale = (c.m() as f64).powi(-(w.depth() as i32));
            assert!(g.diameter() >= scale * (1.0 - 1e-12) && g.diameter() <= delta * scale * (1.0 + 1e-12));
            let parent = parent_flat(&c, &w).unwrap();
            assert!(square_geometry(&c, &parent).contains(&g));
            assert!(parent.is_refined_by(&w) && !w.is_refined_by(&parent));
        }
        let g = square_geometry(&c, &Word::root(&c, 2).unwrap());
        assert_eq!((g.x_interval(), g.y_interval()), ((0.0, 1.0), (2.0 / 3.0, 1.0)));
        assert_eq!((g.p, g.q), (Some(0), Some(2)));
    }

    #[test]
    fn rejects_malformed_words() {
        let c = two_map();
        assert!(Word::new(&c, &[], &[0, 1]).is_err());
        assert!(Word::new(&c, &[(1, 0)], &[0]).is_err());
        assert!(Word::new(&c, &[], &[]).is_err());
        assert!(Word::new(&c, &[(0, 0)], &[1]).is_ok());
    }
}
