//! Threshold crossings and distance-scaling extrapolation.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::rates::{RateObservable, RatePoint};
use crate::builder::Family;
use crate::error::{Error, Result};

pub const TERAQUOP_TARGET: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    ThresholdCrossing,
    DistanceScaling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    pub family: Family,
    pub observable: RateObservable,
    /// Crossing points per distance pair, or intercept/slope of the fit.
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_th: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_th_interval: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<f64>,
    /// Unrounded distance reaching the target.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_fit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_star: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub footprint: Option<usize>,
}

fn common_series(points: &[RatePoint]) -> Result<(Family, RateObservable)> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidArgument("no rate points".into()))?;
    if points
        .iter()
        .any(|q| q.family != first.family || q.observable != first.observable)
    {
        return Err(Error::InvalidArgument(
            "points mix families or observables".into(),
        ));
    }
    Ok((first.family, first.observable))
}

/// Curves keyed by distance: (ln p, ln rate) sorted by p, zero rates dropped.
fn log_curves(points: &[RatePoint], rates: &[f64]) -> BTreeMap<usize, Vec<(f64, f64)>> {
    let mut curves: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for (q, &r) in points.iter().zip(rates) {
        if r > 0.0 && q.p > 0.0 {
            curves.entry(q.d).or_default().push((q.p.ln(), r.ln()));
        }
    }
    for c in curves.values_mut() {
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    curves
}

/// Lowest ln p where the larger-distance curve `b` rises above `a`, by
/// linear interpolation at their shared p values.
fn crossing(a: &[(f64, f64)], b: &[(f64, f64)]) -> Option<f64> {
    let mut diffs = Vec::new();
    for &(x, ya) in a {
        if let Some(&(_, yb)) = b.iter().find(|(xb, _)| (xb - x).abs() < 1e-12) {
            diffs.push((x, yb - ya));
        }
    }
    for w in diffs.windows(2) {
        let ((x0, f0), (x1, f1)) = (w[0], w[1]);
        if f0 < 0.0 && f1 >= 0.0 {
            return Some(x0 + (x1 - x0) * f0 / (f0 - f1));
        }
    }
    None
}

fn crossings(points: &[RatePoint], rates: &[f64]) -> Vec<((usize, usize), f64)> {
    let curves = log_curves(points, rates);
    let ds: Vec<usize> = curves.keys().copied().collect();
    ds.windows(2)
        .filter_map(|w| crossing(&curves[&w[0]], &curves[&w[1]]).map(|x| ((w[0], w[1]), x.exp())))
        .collect()
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Threshold from the crossings of consecutive-distance rate curves with
/// a 1000-sample parametric bootstrap interval.
pub fn threshold_estimate(points: &[RatePoint]) -> Result<FitResult> {
    threshold_estimate_with(points, 1000, 0)
}

pub fn threshold_estimate_with(
    points: &[RatePoint],
    resamples: usize,
    seed: u64,
) -> Result<FitResult> {
    let (family, observable) = common_series(points)?;
    let mut ds: Vec<usize> = points.iter().map(|q| q.d).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 2 {
        return Err(Error::InvalidArgument(
            "threshold needs at least two distances".into(),
        ));
    }
    let rates: Vec<f64> = points.iter().map(|q| q.rate).collect();
    let found = crossings(points, &rates);
    if found.is_empty() {
        return Err(Error::NoCrossing);
    }
    let p_th = mean(found.iter().map(|&(_, x)| x));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boot = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let resampled: Vec<f64> = points
            .iter()
            .map(|q| {
                if q.shots == 0 {
                    return 0.0;
                }
                // Sum points carry rates of two experiments; resample each half.
                let (n, parts) = match q.observable {
                    RateObservable::Sum => (q.shots, 2.0),
                    _ => (q.shots, 1.0),
                };
                let per = (q.rate / parts).clamp(0.0, 1.0);
                let bin = Binomial::new(n, per).expect("valid binomial");
                let mut k = 0;
                for _ in 0..parts as usize {
                    k += bin.sample(&mut rng);
                }
                k as f64 / n as f64
            })
            .collect();
        let c = crossings(points, &resampled);
        if !c.is_empty() {
            boot.push(mean(c.iter().map(|&(_, x)| x)));
        }
    }
    let p_th_interval = (!boot.is_empty()).then(|| {
        boot.sort_by(f64::total_cmp);
        let at = |q: f64| boot[((boot.len() - 1) as f64 * q).round() as usize];
        (at(0.025).min(p_th), at(0.975).max(p_th))
    });

    let parameters = found
        .iter()
        .map(|&((a, b), x)| (format!("crossing_d{a}_d{b}"), x))
        .collect();
    Ok(FitResult {
        kind: FitKind::ThresholdCrossing,
        family,
        observable,
        parameters,
        p_th: Some(p_th),
        p_th_interval,
        p: None,
        target: None,
        d_fit: None,
        d_star: None,
        footprint: None,
    })
}

/// Smallest even integer not below `x`.
pub fn round_up_even(x: f64) -> usize {
    let n = x.ceil().max(0.0) as usize;
    n + n % 2
}

/// Weighted least-squares fit of ln(rate) against d, extrapolated to the
/// distance reaching `target`.
///
/// Weights are inverse variances of ln(rate) taken from the points'
/// intervals. The returned `d_star` is rounded up to an even distance and the
/// footprint is the family's qubits per d² times `d_star²`.
pub fn teraquop_footprint(points: &[RatePoint], family: Family, target: f64) -> Result<FitResult> {
    let (fam, observable) = common_series(points)?;
    if fam != family {
        return Err(Error::InvalidArgument(format!(
            "points are for the {fam} family"
        )));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target {target} outside (0, 1)"
        )));
    }
    let p = points[0].p;
    if points.iter().any(|q| q.p != p) {
        return Err(Error::InvalidArgument("points must share one p".into()));
    }
    let mut ds: Vec<usize> = points.iter().map(|q| q.d).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 3 {
        return Err(Error::InvalidArgument(
            "extrapolation needs at least three distances".into(),
        ));
    }
    let mut rows = Vec::with_capacity(points.len());
    for q in points {
        if q.rate <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "no failures observed at d={}",
                q.d
            )));
        }
        let sigma_ln = (q.sigma() / q.rate).max(1e-12);
        rows.push((q.d as f64, q.rate.ln(), 1.0 / (sigma_ln * sigma_ln)));
    }
    let sw: f64 = rows.iter().map(|r| r.2).sum();
    let mx = rows.iter().map(|r| r.2 * r.0).sum::<f64>() / sw;
    let my = rows.iter().map(|r| r.2 * r.1).sum::<f64>() / sw;
    let sxx: f64 = rows.iter().map(|r| r.2 * (r.0 - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| r.2 * (r.0 - mx) * (r.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    if !(slope < 0.0) {
        return Err(Error::AboveThreshold);
    }
    let d_fit = (target.ln() - intercept) / slope;
    let d_star = round_up_even(d_fit);
    let footprint = family.footprint_factor() * d_star * d_star;
    let parameters = BTreeMap::from([
        ("intercept".to_string(), intercept),
        ("slope".to_string(), slope),
        ("lambda".to_string(), (-2.0 * slope).exp()),
    ]);
    Ok(FitResult {
        kind: FitKind::DistanceScaling,
        family,
        observable,
        parameters,
        p_th: None,
        p_th_interval: None,
        p: Some(p),
        target: Some(target),
        d_fit: Some(d_fit),
        d_star: Some(d_star),
        footprint: Some(footprint),
    })
}

/// Fit of ln(rate) against ln(p) at fixed distance; returns the slope.
pub fn p_exponent(points: &[RatePoint]) -> Result<f64> {
    let rows: Vec<(f64, f64)> = points
        .iter()
        .filter(|q| q.rate > 0.0)
        .map(|q| (q.p.ln(), q.rate.ln()))
        .collect();
    if rows.len() < 2 {
        return Err(Error::InvalidArgument(
            "slope needs two nonzero rates".into(),
        ));
    }
    let n = rows.len() as f64;
    let mx = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let my = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let sxx: f64 = rows.iter().map(|r| (r.0 - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| (r.0 - mx) * (r.1 - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(family: Family, d: usize, p: f64, rate: f64) -> RatePoint {
        let shots = 1_000_000_000u64;
        let mut q = RatePoint::new(
            family,
            d,
            p,
            RateObservable::Sum,
            shots,
            (rate * shots as f64) as u64,
        );
        q.rate = rate;
        q
    }

    #[test]
    fn round_up_even_values() {
        assert_eq!(round_up_even(27.0), 28);
        assert_eq!(round_up_even(26.0), 26);
        assert_eq!(round_up_even(26.1), 28);
        assert_eq!(round_up_even(0.0), 0);
    }

    #[test]
    fn crossing_of_two_lines() {
        let a = [(0.0, 0.0), (1.0, 1.0)];
        let b = [(0.0, -1.0), (1.0, 2.0)];
        assert!((crossing(&a, &b).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(crossing(&b, &a), None);
    }

    #[test]
    fn exact_exponential_gives_analytic_distance() {
        // rate = 0.1 * 0.5^d reaches 1e-12 at d = ln(1e-11)/ln(0.5).
        let pts: Vec<RatePoint> = [4, 6, 8, 10]
            .iter()
            .map(|&d| exact(Family::Dynamic, d, 1e-3, 0.1 * 0.5f64.powi(d as i32)))
            .collect();
        let fit = teraquop_footprint(&pts, Family::Dynamic, TERAQUOP_TARGET).unwrap();
        let want = (1e-11f64).ln() / 0.5f64.ln();
        assert!((fit.d_fit.unwrap() - want).abs() < 1e-6);
        assert_eq!(fit.d_star, Some(round_up_even(want)));
        assert_eq!(fit.footprint, Some(6 * 38 * 38));
    }

    #[test]
    fn rising_rates_are_above_threshold() {
        let pts: Vec<RatePoint> = [4, 6, 8]
            .iter()
            .map(|&d| exact(Family::Standard, d, 1e-2, 0.01 * d as f64))
            .collect();
        assert!(matches!(
            teraquop_footprint(&pts, Family::Standard, TERAQUOP_TARGET),
            Err(Error::AboveThreshold)
        ));
    }

    #[test]
    fn parallel_curves_do_not_cross() {
        let mut pts = Vec::new();
        for d in [4, 6] {
            for p in [1e-3, 2e-3, 4e-3] {
                pts.push(exact(Family::Dynamic, d, p, p / d as f64));
            }
        }
        assert!(matches!(threshold_estimate(&pts), Err(Error::NoCrossing)));
    }

    #[test]
    fn mixed_series_rejected() {
        let pts = vec![
            exact(Family::Dynamic, 4, 1e-3, 1e-3),
            exact(Family::Standard, 6, 1e-3, 1e-3),
        ];
        assert!(threshold_estimate(&pts).is_err());
    }
}
