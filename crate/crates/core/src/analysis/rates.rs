//! Logical error rates of memory experiments.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::builder::Family;
use crate::circuit::Circuit;
use crate::decoder::MatchingDecoder;
use crate::dem::extract_dem;
use crate::error::{Error, Result};
use crate::lattice::build_lattice;
use crate::logical::{logical_schedule, Observable};
use crate::noise::{apply_noise, NoiseModel};
use crate::sim::{verify_determinism, FrameSampler};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RateObservable {
    H,
    V,
    #[serde(rename = "sum")]
    Sum,
}

impl RateObservable {
    pub fn name(self) -> &'static str {
        match self {
            RateObservable::H => "H",
            RateObservable::V => "V",
            RateObservable::Sum => "sum",
        }
    }
}

impl fmt::Display for RateObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RateObservable {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "H" | "h" => Ok(RateObservable::H),
            "V" | "v" => Ok(RateObservable::V),
            "sum" | "SUM" | "Sum" => Ok(RateObservable::Sum),
            _ => Err(format!("unknown observable {s:?} (expected H, V or sum)")),
        }
    }
}

impl From<Observable> for RateObservable {
    fn from(o: Observable) -> Self {
        match o {
            Observable::H => RateObservable::H,
            Observable::V => RateObservable::V,
        }
    }
}

/// One measured logical error rate with its 95% interval.
///
/// For `Sum` the failures of the H and V experiments are added (each ran
/// `shots` shots), so `rate` is the sum of the two rates and the interval is
/// the sum of the two Wilson intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub family: Family,
    pub d: usize,
    pub p: f64,
    pub observable: RateObservable,
    pub shots: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RatePoint {
    pub fn new(
        family: Family,
        d: usize,
        p: f64,
        observable: RateObservable,
        shots: u64,
        failures: u64,
    ) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, shots, Z95);
        RatePoint {
            family,
            d,
            p,
            observable,
            shots,
            failures,
            rate: if shots == 0 {
                0.0
            } else {
                failures as f64 / shots as f64
            },
            ci_low,
            ci_high,
        }
    }

    pub fn sum(h: &RatePoint, v: &RatePoint) -> Result<RatePoint> {
        if (h.family, h.d, h.shots) != (v.family, v.d, v.shots) || h.p != v.p {
            return Err(Error::InvalidArgument(
                "summed points must share family, d, p and shots".into(),
            ));
        }
        Ok(RatePoint {
            observable: RateObservable::Sum,
            failures: h.failures + v.failures,
            rate: h.rate + v.rate,
            ci_low: h.ci_low + v.ci_low,
            ci_high: h.ci_high + v.ci_high,
            ..*h
        })
    }

    /// Standard error implied by the interval.
    pub fn sigma(&self) -> f64 {
        (self.ci_high - self.ci_low) / (2.0 * Z95)
    }
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let r = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (r + z2 / (2.0 * n_f)) / denom;
    let half = z * (r * (1.0 - r) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if k == 0 {
        0.0
    } else {
        (centre - half).max(0.0).min(r)
    };
    let hi = if k == n {
        1.0
    } else {
        (centre + half).min(1.0).max(r)
    };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Gauge cycles; defaults to the family's memory length for `d`.
    pub cycles: Option<usize>,
    pub workers: Option<usize>,
    pub idle_during_meas: bool,
    /// Shots sampled and decoded per chunk.
    pub chunk: usize,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            cycles: None,
            workers: None,
            idle_during_meas: false,
            chunk: 1 << 16,
        }
    }
}

/// A noisy memory experiment ready for repeated sampling and decoding.
pub struct MemoryExperiment {
    pub family: Family,
    pub d: usize,
    pub p: f64,
    pub observable: Observable,
    pub circuit: Circuit,
    sampler: FrameSampler,
    decoder: MatchingDecoder,
}

impl MemoryExperiment {
    pub fn new(
        family: Family,
        d: usize,
        p: f64,
        observable: Observable,
        opts: &RateOptions,
    ) -> Result<Self> {
        let (l1, l2) = family.dims(d);
        let lat = build_lattice(l1, l2)?;
        let schedule = logical_schedule(&lat)?;
        let cycles = opts.cycles.unwrap_or_else(|| family.memory_cycles(d));
        let clean = family.build(&lat, cycles, observable, &schedule)?;
        let report = verify_determinism(&clean);
        if !report.is_ok() {
            return Err(Error::NondeterministicDetector {
                detectors: report.detectors,
                observables: report.observables,
            });
        }
        let model = NoiseModel::new(p)?.with_idle_during_meas(opts.idle_during_meas);
        let circuit = apply_noise(&clean, &model)?;
        let decoder = MatchingDecoder::from_dem(&extract_dem(&circuit))?;
        let sampler = FrameSampler::compile(&circuit);
        Ok(MemoryExperiment {
            family,
            d,
            p,
            observable,
            circuit,
            sampler,
            decoder,
        })
    }

    /// Sample and decode `shots` shots; returns the number of shots whose
    /// predicted observable differs from the actual one.
    pub fn count_failures(&self, shots: u64, seed: u64, opts: &RateOptions) -> Result<u64> {
        let chunk = opts.chunk.max(1) as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = 0;
        let mut done = 0;
        while done < shots {
            let n = chunk.min(shots - done) as usize;
            let block = self.sampler.sample(n, rng.gen(), opts.workers)?;
            failures += self.decoder.count_logical_errors(&block, opts.workers)? as u64;
            done += n as u64;
        }
        Ok(failures)
    }

    pub fn rate_point(&self, shots: u64, seed: u64, opts: &RateOptions) -> Result<RatePoint> {
        let failures = self.count_failures(shots, seed, opts)?;
        Ok(RatePoint::new(
            self.family,
            self.d,
            self.p,
            self.observable.into(),
            shots,
            failures,
        ))
    }
}

fn observable_seed(seed: u64, obs: Observable) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(obs as u64 + 1);
    rng.gen()
}

/// H, V and summed logical error rates of the memory experiments at
/// distance `d` (points in that order).
pub fn logical_error_rate(
    family: Family,
    d: usize,
    p: f64,
    shots: u64,
    seed: u64,
) -> Result<[RatePoint; 3]> {
    logical_error_rate_with(family, d, p, shots, seed, &RateOptions::default())
}

pub fn logical_error_rate_with(
    family: Family,
    d: usize,
    p: f64,
    shots: u64,
    seed: u64,
    opts: &RateOptions,
) -> Result<[RatePoint; 3]> {
    let mut pts = Vec::with_capacity(2);
    for obs in [Observable::H, Observable::V] {
        let exp = MemoryExperiment::new(family, d, p, obs, opts)?;
        pts.push(exp.rate_point(shots, observable_seed(seed, obs), opts)?);
    }
    let sum = RatePoint::sum(&pts[0], &pts[1])?;
    Ok([pts[0], pts[1], sum])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_edges() {
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_995).abs() < 1e-5);
        let (lo, hi) = wilson_interval(100, 100, Z95);
        assert!((lo - (1.0 - 0.036_995)).abs() < 1e-5);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn wilson_reference_value() {
        // 10 of 50 at 95%: (0.1124, 0.3304).
        let (lo, hi) = wilson_interval(10, 50, Z95);
        assert!((lo - 0.112_4).abs() < 1e-4, "{lo}");
        assert!((hi - 0.330_4).abs() < 1e-4, "{hi}");
    }

    #[test]
    fn sum_adds_rates_and_intervals() {
        let h = RatePoint::new(Family::Dynamic, 2, 0.01, RateObservable::H, 1000, 10);
        let v = RatePoint::new(Family::Dynamic, 2, 0.01, RateObservable::V, 1000, 30);
        let s = RatePoint::sum(&h, &v).unwrap();
        assert_eq!(s.failures, 40);
        assert!((s.rate - 0.04).abs() < 1e-12);
        assert!(s.ci_low <= s.rate && s.rate <= s.ci_high);
        let w = RatePoint::new(Family::Standard, 2, 0.01, RateObservable::V, 1000, 30);
        assert!(RatePoint::sum(&h, &w).is_err());
    }

    #[test]
    fn observable_names_round_trip() {
        for o in [RateObservable::H, RateObservable::V, RateObservable::Sum] {
            assert_eq!(o.name().parse::<RateObservable>().unwrap(), o);
        }
    }
}
