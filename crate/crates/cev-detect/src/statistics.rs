//! The three detection statistics and their evaluation over k-grids.
//!
//! All logarithms are natural. Summations run in fixed index order so
//! repeated evaluation is bit-identical.

use crate::rank::{self, ConcomitantView, Fenwick, RankVector};
use crate::{BivariateSample, Error, Result};

/// Hillish statistic `(1/k) Σ_{j=1..k} log(k/R_j) · log(k/j)`.
///
/// Both log factors are nonnegative (`R_j ≤ k`, `j ≤ k`), so the value is
/// always ≥ 0. For k = 1 the single term is zero.
pub fn hillish(ranks: &RankVector) -> f64 {
    let k = ranks.k() as f64;
    let mut sum = 0.0;
    for (j0, &r) in ranks.ranks().iter().enumerate() {
        let j = (j0 + 1) as f64;
        sum += (k / r as f64).ln() * (k / j).ln();
    }
    sum / k
}

/// Hillish on `(X, Y)` and on `(-X, Y)`.
///
/// The second value is computed by negating the first k concomitants and
/// re-ranking; for distinct concomitants this equals using ranks
/// `k + 1 - R_i`. Both values must converge to 1 for the standardized limit
/// measure to be a product.
pub fn hillish_pair(view: &ConcomitantView, k: usize) -> Result<(f64, f64)> {
    let ranks = rank::ranks_topk(view, k)?;
    let neg: Vec<f64> = view.x_star()[..k].iter().map(|&x| -x).collect();
    let neg_ranks = RankVector::new(rank::ranks_leq_values(&neg))?;
    Ok((hillish(&ranks), hillish(&neg_ranks)))
}

/// Pickandsish statistic for probe level `p ∈ (0, 1)`:
///
/// ```text
/// (X*_{pk:k} - X*_{pk/2:k/2}) / (X*_{pk:k} - X*_{pk/2:k})
/// ```
///
/// where `X*_{s:t}` is the ⌈s⌉-th smallest among the first ⌈t⌉ concomitants
/// (the concomitants of the ⌈t⌉ largest Y values). Returns `None` when the
/// denominator is exactly zero, which can happen with tied concomitants;
/// trace builders keep that as a gap.
pub fn pickandsish(view: &ConcomitantView, k: usize, p: f64) -> Result<Option<f64>> {
    if k < 4 || k > view.n() {
        return Err(Error::KOutOfRange {
            k,
            min: 4,
            max: view.n(),
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("p = {p} outside (0, 1)")));
    }
    let idx_pk = (p * k as f64).ceil() as usize;
    let idx_half = (p * k as f64 / 2.0).ceil() as usize;
    let k_half = k.div_ceil(2);

    let mut top_k: Vec<f64> = view.x_star()[..k].to_vec();
    top_k.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite by construction"));
    let mut top_half: Vec<f64> = view.x_star()[..k_half].to_vec();
    top_half.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite by construction"));

    let a = top_k[idx_pk - 1];
    let b = top_half[idx_half - 1];
    let c = top_k[idx_half - 1];
    let denom = a - c;
    if denom == 0.0 {
        return Ok(None);
    }
    Ok(Some((a - b) / denom))
}

/// Number of concordant pairs `#{ i < j : R_i < R_j }`, counted exactly in
/// O(k log k) with a Fenwick tree over rank values.
pub fn concordant_pairs(ranks: &RankVector) -> u64 {
    let k = ranks.k();
    let mut fen = Fenwick::new(k);
    let mut count = 0u64;
    for &r in ranks.ranks() {
        if r >= 2 {
            count += fen.prefix_sum(r - 2);
        }
        fen.add(r - 1, 1);
    }
    count
}

/// O(k²) transcription of the concordant-pair count, kept as a testing oracle.
pub fn concordant_pairs_bruteforce(ranks: &RankVector) -> u64 {
    let r = ranks.ranks();
    let mut count = 0u64;
    for i in 0..r.len() {
        for j in (i + 1)..r.len() {
            if r[i] < r[j] {
                count += 1;
            }
        }
    }
    count
}

fn tau_from_count(count: u64, k: usize) -> f64 {
    // 4·conc/(k(k-1)) - 1, evaluated as a single division of exact
    // integers so that reversing all ranks negates the value bit-for-bit
    let total = (k as i128 * (k as i128 - 1)) / 2;
    let numerator = 2 * count as i128 - total;
    numerator as f64 / total as f64
}

/// Kendall's tau between the concomitant ranks and the tail ordering:
/// `4/(k(k-1)) · #{ i < j : R_i < R_j } - 1`, in `[-1, 1]`.
pub fn kendall_tau(ranks: &RankVector) -> Result<f64> {
    let k = ranks.k();
    if k < 2 {
        return Err(Error::KOutOfRange {
            k,
            min: 2,
            max: usize::MAX,
        });
    }
    Ok(tau_from_count(concordant_pairs(ranks), k))
}

/// Kendall's tau via the O(k²) double loop; identical value to
/// [`kendall_tau`] (the integer pair counts are equal, hence the final
/// division is too).
pub fn kendall_tau_bruteforce(ranks: &RankVector) -> Result<f64> {
    let k = ranks.k();
    if k < 2 {
        return Err(Error::KOutOfRange {
            k,
            min: 2,
            max: usize::MAX,
        });
    }
    Ok(tau_from_count(concordant_pairs_bruteforce(ranks), k))
}

/// Decomposition of the rank integral `I_n = (1/k) Σ log(k/R_i)·log((k+1)/i)`
/// into the Hillish statistic plus a vanishing correction.
///
/// Returns `(I_n, correction)` with
/// `correction = log((k+1)/k) · (1/k) Σ log(k/R_i)`; the identity
/// `I_n = hillish + correction` holds to accumulated rounding and is used as
/// an exact-identity test.
pub fn hillish_integral_identity(ranks: &RankVector) -> (f64, f64) {
    let k = ranks.k() as f64;
    let mut integral = 0.0;
    let mut log_rank_mean = 0.0;
    for (i0, &r) in ranks.ranks().iter().enumerate() {
        let i = (i0 + 1) as f64;
        let lr = (k / r as f64).ln();
        integral += lr * ((k + 1.0) / i).ln();
        log_rank_mean += lr;
    }
    integral /= k;
    log_rank_mean /= k;
    let correction = ((k + 1.0) / k).ln() * log_rank_mean;
    (integral, correction)
}

/// Strictly increasing grid of k values, each ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGrid {
    values: Vec<usize>,
}

impl KGrid {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values[0] < 2 {
            return Err(Error::invalid("k-grid values must be >= 2"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("k-grid must be strictly increasing"));
        }
        Ok(Self { values })
    }

    /// `count` log-spaced values in `[kmin, kmax]`, deduplicated after
    /// rounding.
    pub fn log_spaced(kmin: usize, kmax: usize, count: usize) -> Result<Self> {
        if kmin < 2 || kmax < kmin || count == 0 {
            return Err(Error::invalid(format!(
                "invalid log grid: kmin={kmin}, kmax={kmax}, count={count}"
            )));
        }
        let (a, b) = ((kmin as f64).ln(), (kmax as f64).ln());
        let mut values: Vec<usize> = (0..count)
            .map(|i| {
                let t = if count == 1 {
                    0.0
                } else {
                    i as f64 / (count - 1) as f64
                };
                (a + t * (b - a)).exp().round() as usize
            })
            .collect();
        values.sort_unstable();
        values.dedup();
        Self::new(values)
    }

    /// `count` linearly spaced values in `[kmin, kmax]`, deduplicated after
    /// rounding.
    pub fn linear_spaced(kmin: usize, kmax: usize, count: usize) -> Result<Self> {
        if kmin < 2 || kmax < kmin || count == 0 {
            return Err(Error::invalid(format!(
                "invalid linear grid: kmin={kmin}, kmax={kmax}, count={count}"
            )));
        }
        let mut values: Vec<usize> = (0..count)
            .map(|i| {
                let t = if count == 1 {
                    0.0
                } else {
                    i as f64 / (count - 1) as f64
                };
                (kmin as f64 + t * (kmax - kmin) as f64).round() as usize
            })
            .collect();
        values.sort_unstable();
        values.dedup();
        Self::new(values)
    }

    /// Default grid for a sample of size n: 50 log-spaced values in
    /// `[10, n/10]`, respecting the k/n → 0 usage regime.
    pub fn default_for(n: usize) -> Result<Self> {
        let kmax = n / 10;
        if kmax < 2 {
            return Err(Error::invalid(format!(
                "n = {n} too small for the default k-grid"
            )));
        }
        let kmin = 10.min(kmax).max(2);
        Self::log_spaced(kmin, kmax, 50)
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> usize {
        *self.values.last().expect("nonempty by construction")
    }
}

/// Every statistic evaluated over a k-grid. Pickandsish entries may be
/// `None` (undefined marker); the gap is preserved, never dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceBundle {
    pub kgrid: KGrid,
    pub hillish: Vec<f64>,
    pub hillish_neg: Vec<f64>,
    /// One trace per probe level, keyed by p in ascending order.
    pub pickandsish: Vec<(f64, Vec<Option<f64>>)>,
    pub kendall: Vec<f64>,
    pub p_values: Vec<f64>,
}

impl TraceBundle {
    pub fn pick_trace(&self, p: f64) -> Option<&[Option<f64>]> {
        self.pickandsish
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, t)| t.as_slice())
    }
}

/// Evaluate all statistics over a k-grid.
///
/// The concomitant view is built once; ranks are recomputed on the top-k
/// prefix for every grid value (`R_i^k` changes with k, and the
/// O(Σ k log k) total keeps the code auditable at desk scale). Pickandsish
/// needs k ≥ 4, so smaller grid entries get an undefined marker there.
pub fn compute_traces(
    sample: &BivariateSample,
    kgrid: &KGrid,
    p_values: &[f64],
) -> Result<TraceBundle> {
    if kgrid.max() > sample.n() {
        return Err(Error::KOutOfRange {
            k: kgrid.max(),
            min: 2,
            max: sample.n(),
        });
    }
    let mut ps: Vec<f64> = p_values.to_vec();
    for &p in &ps {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("p = {p} outside (0, 1)")));
        }
    }
    ps.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite p"));
    ps.dedup();

    let view = rank::build_view(sample);
    let g = kgrid.len();
    let mut hill = Vec::with_capacity(g);
    let mut hill_neg = Vec::with_capacity(g);
    let mut kend = Vec::with_capacity(g);
    let mut picks: Vec<(f64, Vec<Option<f64>>)> =
        ps.iter().map(|&p| (p, Vec::with_capacity(g))).collect();

    for &k in kgrid.values() {
        let (h, hn) = hillish_pair(&view, k)?;
        hill.push(h);
        hill_neg.push(hn);
        let ranks = rank::ranks_topk(&view, k)?;
        kend.push(kendall_tau(&ranks)?);
        for (p, trace) in picks.iter_mut() {
            let v = if k >= 4 {
                pickandsish(&view, k, *p)?
            } else {
                None
            };
            trace.push(v);
        }
    }

    Ok(TraceBundle {
        kgrid: kgrid.clone(),
        hillish: hill,
        hillish_neg: hill_neg,
        pickandsish: picks,
        kendall: kend,
        p_values: ps,
    })
}
