//! Turns statistic traces into a structured verdict.
//!
//! The convergence theory says each statistic stabilizes as k grows with
//! k/n → 0; "stabilizes" is made operational here as a sliding-window rule:
//! within the admissible region `k ∈ [lo·n, hi·n] ∩ grid`, the window of
//! configured width with the smallest interquartile range is selected, its
//! median is the reported level, and the trace counts as stable when that
//! IQR is at or below the per-statistic dispersion threshold (and at most
//! 20% of the window is undefined).
//!
//! Verdict logic: the limit measure is declared a product when Hillish on
//! both `(X,Y)` and `(-X,Y)` is stable with level within `eps_hillish` of 1
//! and Pickandsish at both probe levels is stable within `eps_pickandsish`
//! of 0. A non-product CEV verdict additionally demands that every probed
//! statistic is stable and that at least one product condition fails
//! decisively (by more than the local window dispersion) — borderline
//! misses stay INCONCLUSIVE rather than flipping the label. Kendall's tau
//! is advisory: its instability blocks a non-product claim, but a tau near
//! zero never establishes product form on its own.

use serde::Serialize;

use crate::statistics::{KGrid, TraceBundle};
use crate::{Error, Result};

/// Identifies the trace a stability report describes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatisticId {
    Hillish,
    HillishNeg,
    Pickandsish { p: f64 },
    Kendall,
}

impl std::fmt::Display for StatisticId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StatisticId::Hillish => write!(f, "hillish"),
            StatisticId::HillishNeg => write!(f, "hillish_neg"),
            StatisticId::Pickandsish { p } => write!(f, "pickandsish_p{p}"),
            StatisticId::Kendall => write!(f, "kendall"),
        }
    }
}

impl Serialize for StatisticId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Thresholds and window geometry for stability assessment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionConfig {
    /// Admissible window: k ≥ window_lo_frac · n.
    pub window_lo_frac: f64,
    /// Admissible window: k ≤ window_hi_frac · n.
    pub window_hi_frac: f64,
    /// Sliding-window width as a fraction of the admissible grid points.
    pub window_width_frac: f64,
    /// IQR threshold for the rank statistics (Hillish, Kendall).
    pub rank_dispersion_threshold: f64,
    /// IQR threshold for Pickandsish, whose traces are erratic at desk-scale
    /// n; this mainly guards against outright divergence.
    pub pickandsish_dispersion_threshold: f64,
    /// Product box around 1 for the two Hillish levels.
    pub eps_hillish: f64,
    /// Product box around 0 for the Pickandsish levels.
    pub eps_pickandsish: f64,
    /// Stability is denied when more than this fraction of the chosen
    /// window is undefined.
    pub max_undefined_frac: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            window_lo_frac: 0.05,
            window_hi_frac: 0.30,
            window_width_frac: 0.5,
            rank_dispersion_threshold: 0.15,
            pickandsish_dispersion_threshold: 5.0,
            eps_hillish: 0.30,
            eps_pickandsish: 0.60,
            max_undefined_frac: 0.2,
        }
    }
}

impl DetectionConfig {
    fn dispersion_threshold(&self, statistic: StatisticId) -> f64 {
        match statistic {
            StatisticId::Pickandsish { .. } => self.pickandsish_dispersion_threshold,
            _ => self.rank_dispersion_threshold,
        }
    }
}

/// Stability assessment of one trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub statistic: StatisticId,
    /// Selected window as (k_lo, k_hi), inclusive.
    pub window: (usize, usize),
    /// Median of the defined entries in the window; None when the window
    /// holds fewer than two defined entries.
    pub level: Option<f64>,
    /// Interquartile range of the defined entries in the window.
    pub dispersion: Option<f64>,
    /// Fraction of window entries carrying the undefined marker.
    pub undefined_frac: f64,
    pub stable: bool,
}

/// Final verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "NOT_CEV")]
    NotCev,
    #[serde(rename = "CEV_PRODUCT")]
    CevProduct,
    #[serde(rename = "CEV_NONPRODUCT")]
    CevNonproduct,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::NotCev => "NOT_CEV",
            Verdict::CevProduct => "CEV_PRODUCT",
            Verdict::CevNonproduct => "CEV_NONPRODUCT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

/// Verdict plus the evidence and thresholds that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionVerdict {
    pub verdict: Verdict,
    pub evidence: Vec<StabilityReport>,
    pub thresholds: DetectionConfig,
}

/// Linear-interpolation quantile of a sorted slice (R-7 convention).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= n {
        sorted[n - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Assess stabilization of one trace over its k-grid.
///
/// `n` is the sample size behind the trace; it anchors the admissible
/// window `[window_lo_frac·n, window_hi_frac·n]`. Errors when fewer than
/// two grid points fall inside that region.
pub fn assess_stability(
    trace: &[Option<f64>],
    kgrid: &KGrid,
    n: usize,
    statistic: StatisticId,
    config: &DetectionConfig,
) -> Result<StabilityReport> {
    if trace.len() != kgrid.len() {
        return Err(Error::invalid(format!(
            "trace length {} does not match grid length {}",
            trace.len(),
            kgrid.len()
        )));
    }
    let lo = config.window_lo_frac * n as f64;
    let hi = config.window_hi_frac * n as f64;
    let admissible: Vec<usize> = kgrid
        .values()
        .iter()
        .enumerate()
        .filter(|&(_, &k)| k as f64 >= lo && k as f64 <= hi)
        .map(|(i, _)| i)
        .collect();
    if admissible.len() < 2 {
        return Err(Error::WindowTooWide {
            window: admissible.len(),
            need: 2,
        });
    }
    let width = ((config.window_width_frac * admissible.len() as f64).round() as usize)
        .clamp(2, admissible.len());
    let threshold = config.dispersion_threshold(statistic);

    let mut best: Option<(f64, usize)> = None; // (iqr, start)
    for start in 0..=(admissible.len() - width) {
        let mut defined: Vec<f64> = admissible[start..start + width]
            .iter()
            .filter_map(|&i| trace[i])
            .collect();
        if defined.len() < 2 {
            continue;
        }
        defined.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite trace entries"));
        let iqr = quantile_sorted(&defined, 0.75) - quantile_sorted(&defined, 0.25);
        if best.is_none_or(|(b, _)| iqr < b) {
            best = Some((iqr, start));
        }
    }

    match best {
        Some((iqr, start)) => {
            let idx = &admissible[start..start + width];
            let mut defined: Vec<f64> = idx.iter().filter_map(|&i| trace[i]).collect();
            defined.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite trace entries"));
            let undefined_frac = 1.0 - defined.len() as f64 / width as f64;
            let level = quantile_sorted(&defined, 0.5);
            let stable = iqr <= threshold && undefined_frac <= config.max_undefined_frac;
            Ok(StabilityReport {
                statistic,
                window: (kgrid.values()[idx[0]], kgrid.values()[idx[width - 1]]),
                level: Some(level),
                dispersion: Some(iqr),
                undefined_frac,
                stable,
            })
        }
        None => Ok(StabilityReport {
            // no window had two defined entries: report the whole region
            statistic,
            window: (
                kgrid.values()[admissible[0]],
                kgrid.values()[*admissible.last().expect("len >= 2")],
            ),
            level: None,
            dispersion: None,
            undefined_frac: 1.0,
            stable: false,
        }),
    }
}

fn within(report: &StabilityReport, target: f64, eps: f64) -> bool {
    report.stable && report.level.is_some_and(|l| (l - target).abs() <= eps)
}

fn decisively_outside(report: &StabilityReport, target: f64, eps: f64) -> bool {
    report.stable
        && match (report.level, report.dispersion) {
            (Some(l), Some(d)) => (l - target).abs() > eps + d,
            _ => false,
        }
}

/// Assess every trace in a bundle and combine into a verdict.
///
/// Needs at least two Pickandsish probe levels (the product
/// characterization requires two). `n` is the sample size behind the
/// bundle.
pub fn product_verdict(
    bundle: &TraceBundle,
    n: usize,
    config: &DetectionConfig,
) -> Result<DetectionVerdict> {
    if bundle.p_values.len() < 2 {
        return Err(Error::NotEnoughProbes(bundle.p_values.len()));
    }
    let as_opt = |v: &[f64]| -> Vec<Option<f64>> { v.iter().map(|&x| Some(x)).collect() };

    let kgrid = &bundle.kgrid;
    let mut evidence = Vec::new();
    evidence.push(assess_stability(
        &as_opt(&bundle.hillish),
        kgrid,
        n,
        StatisticId::Hillish,
        config,
    )?);
    evidence.push(assess_stability(
        &as_opt(&bundle.hillish_neg),
        kgrid,
        n,
        StatisticId::HillishNeg,
        config,
    )?);
    for (p, trace) in &bundle.pickandsish {
        evidence.push(assess_stability(
            trace,
            kgrid,
            n,
            StatisticId::Pickandsish { p: *p },
            config,
        )?);
    }
    evidence.push(assess_stability(
        &as_opt(&bundle.kendall),
        kgrid,
        n,
        StatisticId::Kendall,
        config,
    )?);

    // product-side conditions: both Hillish levels near 1, every probed
    // Pickandsish level near 0; Kendall is deliberately absent here
    let product_conditions: Vec<(&StabilityReport, f64, f64)> = evidence
        .iter()
        .filter_map(|r| match r.statistic {
            StatisticId::Hillish | StatisticId::HillishNeg => Some((r, 1.0, config.eps_hillish)),
            StatisticId::Pickandsish { .. } => Some((r, 0.0, config.eps_pickandsish)),
            StatisticId::Kendall => None,
        })
        .collect();

    let product_ok = product_conditions.iter().all(|(r, t, e)| within(r, *t, *e));
    let all_stable = evidence.iter().all(|r| r.stable);
    let none_stable = evidence.iter().all(|r| !r.stable);

    let verdict = if product_ok {
        Verdict::CevProduct
    } else if all_stable
        && product_conditions
            .iter()
            .any(|(r, t, e)| decisively_outside(r, *t, *e))
    {
        Verdict::CevNonproduct
    } else if none_stable {
        Verdict::NotCev
    } else {
        Verdict::Inconclusive
    };

    Ok(DetectionVerdict {
        verdict,
        evidence,
        thresholds: *config,
    })
}
