//! Order statistics, concomitants, ranks and the empirical measures built
//! from them — the shared substrate for every statistic in this crate.
//!
//! Notation: `Y_(1) ≥ … ≥ Y_(n)` are the decreasing order statistics of the
//! `Y` sample, `X_i*` is the concomitant of `Y_(i)` (the `X` paired with it),
//! and `R_i = #{ l ≤ k : X_l* ≤ X_i* }` is the rank of `X_i*` among the first
//! k concomitants, ties receiving their maximal rank.

use crate::{BivariateSample, Error, Result};

/// Tie handling for equal `Y` values when building a [`ConcomitantView`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    /// Ties in `Y` are broken by original input index, ascending.
    ///
    /// This makes the view a deterministic function of the input. Note that
    /// heavy tying in `Y` violates the continuity assumption behind the
    /// convergence theory; the statistics remain well defined but their
    /// limits are no longer guaranteed.
    StableByInputIndex,
}

/// `Y` sorted descending with the attached `X` concomitants.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcomitantView {
    y_desc: Vec<f64>,
    x_star: Vec<f64>,
    pub tie_policy: TiePolicy,
}

impl ConcomitantView {
    pub fn n(&self) -> usize {
        self.y_desc.len()
    }

    /// Decreasing order statistics of `Y`.
    pub fn y_desc(&self) -> &[f64] {
        &self.y_desc
    }

    /// Concomitants: `x_star()[i]` is the `X` paired with `y_desc()[i]`.
    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }
}

/// Ranks `R_1 … R_k` of the first k concomitants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector {
    ranks: Vec<usize>,
}

impl RankVector {
    /// Wrap a precomputed rank sequence, validating `1 ≤ R_i ≤ k`.
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let k = ranks.len();
        if k == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(&r) = ranks.iter().find(|&&r| r < 1 || r > k) {
            return Err(Error::invalid(format!("rank {r} outside 1..={k}")));
        }
        Ok(Self { ranks })
    }

    pub fn k(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }
}

/// Sort `Y` descending and carry the `X` concomitants along.
///
/// Ties in `Y` are broken by original input index (ascending), so the view
/// is a deterministic function of the sample.
pub fn build_view(sample: &BivariateSample) -> ConcomitantView {
    let n = sample.n();
    let ys = sample.ys();
    let xs = sample.xs();
    let mut order: Vec<usize> = (0..n).collect();
    // descending by y, input index breaks ties; the index makes the
    // comparator a total order, so unstable sort is deterministic
    order.sort_unstable_by(|&a, &b| {
        ys[b]
            .partial_cmp(&ys[a])
            .expect("finite by construction")
            .then(a.cmp(&b))
    });
    let y_desc = order.iter().map(|&i| ys[i]).collect();
    let x_star = order.iter().map(|&i| xs[i]).collect();
    ConcomitantView {
        y_desc,
        x_star,
        tie_policy: TiePolicy::StableByInputIndex,
    }
}

/// Fenwick (binary indexed) tree over counts, used for rank computation and
/// concordant-pair counting.
pub(crate) struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    pub(crate) fn new(len: usize) -> Self {
        Self {
            tree: vec![0; len + 1],
        }
    }

    /// Add `delta` at 0-based position `i`.
    pub(crate) fn add(&mut self, i: usize, delta: u64) {
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    /// Sum of positions `0..=i` (0-based, inclusive).
    pub(crate) fn prefix_sum(&self, i: usize) -> u64 {
        let mut j = (i + 1).min(self.tree.len() - 1);
        let mut s = 0;
        while j > 0 {
            s += self.tree[j];
            j &= j - 1;
        }
        s
    }
}

/// Ranks with ≤-count (maximal rank on ties) for an arbitrary value slice.
pub(crate) fn ranks_leq_values(xs: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<f64> = xs.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite by construction"));
    sorted.dedup();
    let compress = |x: f64| -> usize {
        sorted
            .binary_search_by(|v| v.partial_cmp(&x).expect("finite by construction"))
            .expect("value present by construction")
    };
    let mut fen = Fenwick::new(sorted.len());
    for &x in xs {
        fen.add(compress(x), 1);
    }
    xs.iter()
        .map(|&x| fen.prefix_sum(compress(x)) as usize)
        .collect()
}

/// Ranks of the first k concomitants, `R_i = #{ l ≤ k : X_l* ≤ X_i* }`.
///
/// O(k log k): the concomitant values are compressed to their sorted-unique
/// index and accumulated in a Fenwick tree; each rank is then a prefix sum.
/// Exact value comparison throughout — no epsilon fuzzing.
pub fn ranks_topk(view: &ConcomitantView, k: usize) -> Result<RankVector> {
    if k < 1 || k > view.n() {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: view.n(),
        });
    }
    let ranks = ranks_leq_values(&view.x_star()[..k]);
    Ok(RankVector { ranks })
}

/// O(k²) direct-count reference for [`ranks_topk`], kept as a testing oracle.
pub fn ranks_topk_reference(view: &ConcomitantView, k: usize) -> Result<RankVector> {
    if k < 1 || k > view.n() {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: view.n(),
        });
    }
    let xs = &view.x_star()[..k];
    let ranks = xs
        .iter()
        .map(|&xi| xs.iter().filter(|&&xl| xl <= xi).count())
        .collect();
    Ok(RankVector { ranks })
}

/// Empirical measure of `(R_i/k, (k+1)/i)` on the set `[0,x] × (y, ∞]`:
/// `(1/k) · #{ i ≤ k : R_i/k ≤ x and (k+1)/i > y }`.
pub fn empirical_l(ranks: &RankVector, x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("x = {x} outside [0, 1]")));
    }
    if y.is_nan() || y < 1.0 {
        return Err(Error::invalid(format!("y = {y} below 1")));
    }
    let k = ranks.k() as f64;
    let count = ranks
        .ranks()
        .iter()
        .enumerate()
        .filter(|&(i0, &r)| {
            let i = (i0 + 1) as f64;
            r as f64 / k <= x && (k + 1.0) / i > y
        })
        .count();
    Ok(count as f64 / k)
}

/// Empirical copula of `(R_i/k, i/k)`:
/// `(1/k) · #{ i ≤ k : R_i/k ≤ x and i/k ≤ y }`.
pub fn empirical_copula(ranks: &RankVector, x: f64, y: f64) -> Result<f64> {
    for (name, v) in [("x", x), ("y", y)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let k = ranks.k() as f64;
    let count = ranks
        .ranks()
        .iter()
        .enumerate()
        .filter(|&(i0, &r)| {
            let i = (i0 + 1) as f64;
            r as f64 / k <= x && i / k <= y
        })
        .count();
    Ok(count as f64 / k)
}
