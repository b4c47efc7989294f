//! Univariate extreme-value-index diagnostics.
//!
//! These decide which variable qualifies as the conditioning variable: the
//! Hill estimator targets 1/α of a heavy tail, the Pickands and moment
//! (Dekkers–Einmahl–de Haan) estimators target the extreme value index γ of
//! any sign, and the exponential QQ points support a linearity check for
//! heavy tails. All estimators depend on the data only through its
//! descending order statistics `Z_(1) ≥ Z_(2) ≥ …`.

use crate::statistics::KGrid;
use crate::{Error, Result};

/// Which marginal estimator a trace carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvEstimator {
    Hill,
    Pickands,
    Moment,
}

impl EvEstimator {
    pub fn name(self) -> &'static str {
        match self {
            EvEstimator::Hill => "hill",
            EvEstimator::Pickands => "pickands",
            EvEstimator::Moment => "moment",
        }
    }
}

/// A marginal estimator evaluated over a k-grid; `None` entries are
/// undefined markers (degenerate windows), preserved rather than dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct EvEstimateTrace {
    pub kgrid: KGrid,
    pub estimator: EvEstimator,
    pub values: Vec<Option<f64>>,
}

fn sorted_desc(z: &[f64]) -> Result<Vec<f64>> {
    if z.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = z.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    let mut s = z.to_vec();
    s.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite by construction"));
    Ok(s)
}

fn hill_on_sorted(zs: &[f64], k: usize) -> Result<f64> {
    if k < 1 || k + 1 > zs.len() {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: zs.len().saturating_sub(1),
        });
    }
    let pivot = zs[k];
    if pivot <= 0.0 {
        return Err(Error::NonPositiveTail { value: pivot });
    }
    let mut sum = 0.0;
    for &z in &zs[..k] {
        sum += (z / pivot).ln();
    }
    Ok(sum / k as f64)
}

/// Hill estimator `(1/k) Σ_{i=1..k} log(Z_(i)/Z_(k+1))`, a nonnegative
/// estimate of 1/α for a heavy tail. Requires positive data in the tail
/// window.
pub fn hill_estimator(z: &[f64], k: usize) -> Result<f64> {
    hill_on_sorted(&sorted_desc(z)?, k)
}

fn pickands_on_sorted(zs: &[f64], k: usize) -> Result<Option<f64>> {
    if k < 1 || 4 * k > zs.len() {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: zs.len() / 4,
        });
    }
    let num = zs[k - 1] - zs[2 * k - 1];
    let den = zs[2 * k - 1] - zs[4 * k - 1];
    if den == 0.0 {
        return Ok(None);
    }
    let v = (num / den).ln() / std::f64::consts::LN_2;
    // a degenerate upper spacing (num = 0) would give -inf
    Ok(v.is_finite().then_some(v))
}

/// Pickands estimator `(1/log 2) · log[(Z_(k) - Z_(2k)) / (Z_(2k) - Z_(4k))]`
/// of the extreme value index γ; needs `4k ≤ n`. A zero denominator yields
/// the undefined marker.
pub fn pickands_estimator(z: &[f64], k: usize) -> Result<Option<f64>> {
    pickands_on_sorted(&sorted_desc(z)?, k)
}

fn moment_on_sorted(zs: &[f64], k: usize) -> Result<Option<f64>> {
    if k < 1 || k + 1 > zs.len() {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: zs.len().saturating_sub(1),
        });
    }
    let pivot = zs[k];
    if pivot <= 0.0 {
        return Err(Error::NonPositiveTail { value: pivot });
    }
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for &z in &zs[..k] {
        let l = (z / pivot).ln();
        m1 += l;
        m2 += l * l;
    }
    m1 /= k as f64;
    m2 /= k as f64;
    if m2 == 0.0 {
        return Ok(None);
    }
    let ratio = m1 * m1 / m2;
    if ratio == 1.0 {
        return Ok(None);
    }
    Ok(Some(m1 + 1.0 - 0.5 / (1.0 - ratio)))
}

/// Moment (Dekkers–Einmahl–de Haan) estimator
/// `M1 + 1 - ½(1 - M1²/M2)⁻¹` with `Mj = (1/k) Σ (log Z_(i) - log Z_(k+1))^j`.
/// Degenerate moments (all tail logs equal) yield the undefined marker.
pub fn moment_estimator(z: &[f64], k: usize) -> Result<Option<f64>> {
    moment_on_sorted(&sorted_desc(z)?, k)
}

/// Exponential QQ points `(-log(i/(k+1)), log Z_(i))` for `i = k..1`
/// (ascending in the theoretical quantile). Exactly Pareto-α data lies on a
/// line of slope 1/α; linearity in the high values indicates a heavy tail.
pub fn qq_exponential(z: &[f64], k: usize) -> Result<Vec<(f64, f64)>> {
    let zs = sorted_desc(z)?;
    if k < 1 || k > zs.len() {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: zs.len(),
        });
    }
    if zs[k - 1] <= 0.0 {
        return Err(Error::NonPositiveTail { value: zs[k - 1] });
    }
    Ok((1..=k)
        .rev()
        .map(|i| (-((i as f64) / (k as f64 + 1.0)).ln(), zs[i - 1].ln()))
        .collect())
}

/// Evaluate one estimator over a k-grid. Per-k failures (window out of
/// range, nonpositive tail, degenerate moments) become undefined markers so
/// a single bad window does not abort the whole trace.
pub fn marginal_trace(z: &[f64], kgrid: &KGrid, estimator: EvEstimator) -> Result<EvEstimateTrace> {
    let zs = sorted_desc(z)?;
    let values = kgrid
        .values()
        .iter()
        .map(|&k| match estimator {
            EvEstimator::Hill => hill_on_sorted(&zs, k).ok(),
            EvEstimator::Pickands => pickands_on_sorted(&zs, k).ok().flatten(),
            EvEstimator::Moment => moment_on_sorted(&zs, k).ok().flatten(),
        })
        .collect();
    Ok(EvEstimateTrace {
        kgrid: kgrid.clone(),
        estimator,
        values,
    })
}

/// Default marginal grid: 50 log-spaced values in `[2, n/4]` (the Pickands
/// estimator needs 4k ≤ n).
pub fn default_marginal_grid(n: usize) -> Result<KGrid> {
    let kmax = n / 4;
    if kmax < 2 {
        return Err(Error::invalid(format!(
            "n = {n} too small for the default marginal k-grid"
        )));
    }
    KGrid::log_spaced(2, kmax, 50)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hill_hand_value() {
        let z = vec![3f64.exp(), 1f64.exp(), 2f64.exp()];
        let v = hill_estimator(&z, 2).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
    }

    #[test]
    fn hill_constant_data_is_zero() {
        let z = vec![4.0; 6];
        assert_eq!(hill_estimator(&z, 3).unwrap(), 0.0);
    }

    #[test]
    fn hill_rejects_nonpositive_tail() {
        let z = vec![5.0, 2.0, -1.0];
        assert!(matches!(
            hill_estimator(&z, 2),
            Err(Error::NonPositiveTail { .. })
        ));
    }

    #[test]
    fn pickands_hand_value() {
        // Z_(1)=7, Z_(2)=3, Z_(4)=1: (1/ln2)·ln(4/2) = 1
        let z = vec![7.0, 3.0, 2.0, 1.0];
        let v = pickands_estimator(&z, 1).unwrap().unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pickands_equal_spacings_give_zero() {
        // Z_(1)-Z_(2) = Z_(2)-Z_(4) = 2: ratio 1
        let z = vec![5.0, 3.0, 2.5, 1.0];
        let v = pickands_estimator(&z, 1).unwrap().unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn pickands_window_and_denominator() {
        let z = vec![7.0, 3.0, 1.0];
        assert!(matches!(
            pickands_estimator(&z, 1),
            Err(Error::KOutOfRange { .. })
        ));
        let z = vec![7.0, 3.0, 3.0, 3.0];
        assert_eq!(pickands_estimator(&z, 1).unwrap(), None);
    }

    #[test]
    fn moment_hand_value() {
        let z = vec![3f64.exp(), 2f64.exp(), 1f64.exp()];
        let v = moment_estimator(&z, 2).unwrap().unwrap();
        assert!((v - (-2.5)).abs() < 1e-12);
    }

    #[test]
    fn moment_degenerate_is_undefined() {
        let z = vec![4.0, 4.0, 2.0];
        assert_eq!(moment_estimator(&z, 2).unwrap(), None);
    }

    #[test]
    fn qq_exact_pareto_is_linear() {
        let alpha = 2.0;
        let k = 40;
        let z: Vec<f64> = (1..=k)
            .map(|i| ((i as f64) / (k as f64 + 1.0)).powf(-1.0 / alpha))
            .collect();
        let pts = qq_exponential(&z, k).unwrap();
        assert_eq!(pts.len(), k);
        for (x, y) in pts {
            assert!((y - x / alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn qq_single_point() {
        let pts = qq_exponential(&[9.0], 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].0 - (-(0.5f64).ln())).abs() < 1e-15);
        assert!((pts[0].1 - 9f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn estimators_ignore_input_order() {
        let z = vec![5.0, 40.0, 3.0, 11.0, 2.0, 60.0, 21.0, 9.0, 1.5, 7.0];
        let mut shuffled = z.clone();
        shuffled.reverse();
        shuffled.swap(0, 4);
        assert_eq!(
            hill_estimator(&z, 4).unwrap(),
            hill_estimator(&shuffled, 4).unwrap()
        );
        assert_eq!(
            pickands_estimator(&z, 2).unwrap(),
            pickands_estimator(&shuffled, 2).unwrap()
        );
        assert_eq!(
            moment_estimator(&z, 4).unwrap(),
            moment_estimator(&shuffled, 4).unwrap()
        );
    }

    #[test]
    fn scale_and_location_invariance() {
        let z = vec![55.0, 34.0, 21.0, 13.0, 8.0, 5.0, 3.0, 2.0];
        // power-of-two scaling is exact in binary floating point
        let scaled: Vec<f64> = z.iter().map(|&v| v * 4.0).collect();
        assert_eq!(
            hill_estimator(&z, 3).unwrap(),
            hill_estimator(&scaled, 3).unwrap()
        );
        let shifted: Vec<f64> = z.iter().map(|&v| v + 16.0).collect();
        assert_eq!(
            pickands_estimator(&z, 2).unwrap(),
            pickands_estimator(&shifted, 2).unwrap()
        );
    }

    #[test]
    fn trace_preserves_gaps() {
        // negative value sits below the top once k is large enough: hill errors -> gap
        let z = vec![8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, -1.0, -2.0];
        let grid = KGrid::new(vec![2, 4, 8, 9]).unwrap();
        let t = marginal_trace(&z, &grid, EvEstimator::Hill).unwrap();
        assert_eq!(t.values.len(), 4);
        assert!(t.values[0].is_some());
        assert!(t.values[2].is_none()); // Z_(9) = -1
        assert!(t.values[3].is_none());
    }
}
