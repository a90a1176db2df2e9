use std::collections::HashMap;

use floquet::builder::Family;
use floquet::circuit::Circuit;
use floquet::decoder::MatchingDecoder;
use floquet::dem::{build_decoding_graph, extract_dem};
use floquet::lattice::build_lattice;
use floquet::logical::{logical_schedule, Observable};
use floquet::noise::{apply_noise, NoiseModel};
use floquet::sim::{sample_shots, ShotBlock};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::Oracle;

fn circuit(family: Family, d: usize, obs: Observable, p: f64) -> Circuit {
    let (l1, l2) = family.dims(d);
    let lat = build_lattice(l1, l2).unwrap();
    let s = logical_schedule(&lat).unwrap();
    let c = family
        .build(&lat, family.memory_cycles(d), obs, &s)
        .unwrap();
    apply_noise(&c, &NoiseModel::new(p).unwrap()).unwrap()
}

/// Each mechanism alone is decoded to its own observable mask whenever its
/// own explanation is strictly lighter than every explanation with the other
/// mask. At distance 2 some mechanisms are necessarily ambiguous.
#[test]
fn single_mechanisms_are_corrected() {
    for (family, d) in [(Family::Dynamic, 2), (Family::Dynamic, 3)] {
        for obs in [Observable::H, Observable::V] {
            let dem = extract_dem(&circuit(family, d, obs, 1e-3));
            let g = build_decoding_graph(&dem).unwrap();
            let dec = MatchingDecoder::new(&g).unwrap();
            let oracle = Oracle::new(&g);
            let mut weights: HashMap<(u32, Option<u32>, u64), f64> = HashMap::new();
            for e in &g.edges {
                weights.insert((e.a, e.b, e.observables), e.weight);
            }
            let mut ambiguous = 0;
            for m in &dem.mechanisms {
                let parts = if m.decomposition.is_empty() {
                    std::slice::from_ref(&m.symptom)
                } else {
                    &m.decomposition[..]
                };
                let own: f64 = parts
                    .iter()
                    .map(|p| weights[&(p.detectors[0], p.detectors.get(1).copied(), p.observables)])
                    .sum();
                let syndrome: Vec<usize> =
                    m.symptom.detectors.iter().map(|&d| d as usize).collect();
                let other =
                    oracle.best_by_mask(&syndrome)[(m.symptom.observables as usize & 1) ^ 1];
                if other <= own + 1e-9 {
                    ambiguous += 1;
                    continue;
                }
                assert_eq!(
                    dec.decode(&syndrome).unwrap(),
                    m.symptom.observables,
                    "{family} d={d} {obs:?}: {m:?}"
                );
            }
            if d >= 3 {
                assert_eq!(ambiguous, 0, "{family} d={d} {obs:?}");
            }
        }
    }
}

#[test]
fn matching_weight_equals_exhaustive_minimum() {
    let dem = extract_dem(&circuit(Family::Dynamic, 2, Observable::H, 1e-3));
    let g = build_decoding_graph(&dem).unwrap();
    let dec = MatchingDecoder::new(&g).unwrap();
    let oracle = Oracle::new(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let all: Vec<usize> = (0..g.num_detectors).collect();
    for trial in 0..400 {
        let k = if trial < 100 { 8 } else { 1 + trial % 10 };
        let defects: Vec<usize> = all.choose_multiple(&mut rng, k).copied().collect();
        let (_, w) = dec.decode_with_weight(&defects).unwrap();
        let (bw, _) = oracle.best(&defects);
        assert!(
            (w - bw).abs() < 1e-6 * (1.0 + bw),
            "{defects:?}: {w} vs {bw}"
        );
    }
}

#[test]
fn all_zero_shots_decode_to_zero() {
    let dem = extract_dem(&circuit(Family::Dynamic, 2, Observable::H, 1e-3));
    let dec = MatchingDecoder::from_dem(&dem).unwrap();
    let shots = ShotBlock::new(50, dem.num_detectors, dem.num_observables);
    let pred = dec.decode_batch(&shots, None).unwrap();
    assert!((0..50).all(|s| pred.observable_mask(s) == 0));
}

#[test]
fn failure_rate_agrees_with_oracle_decoder() {
    let c = circuit(Family::Dynamic, 2, Observable::H, 0.01);
    let dem = extract_dem(&c);
    let g = build_decoding_graph(&dem).unwrap();
    let dec = MatchingDecoder::new(&g).unwrap();
    let oracle = Oracle::new(&g);
    let n = 10_000;
    let shots = sample_shots(&c, n, 99).unwrap();
    let pred = dec.decode_batch(&shots, None).unwrap();
    let mut fail = 0usize;
    let mut fail_oracle = 0usize;
    let mut decoded = 0usize;
    for s in 0..n {
        let fired = shots.fired(s);
        if fired.len() > 18 {
            continue;
        }
        decoded += 1;
        let actual = shots.observable_mask(s);
        fail += (pred.observable_mask(s) != actual) as usize;
        fail_oracle += (oracle.best(&fired).1 != actual) as usize;
    }
    assert!(decoded > n * 99 / 100);
    let (a, b) = (
        fail as f64 / decoded as f64,
        fail_oracle as f64 / decoded as f64,
    );
    let sigma = ((a * (1.0 - a) + b * (1.0 - b)) / decoded as f64)
        .sqrt()
        .max(1.0 / decoded as f64);
    assert!((a - b).abs() <= 4.0 * sigma, "{a} vs {b}");
}

#[test]
fn decoding_is_deterministic() {
    let c = circuit(Family::Standard, 3, Observable::H, 0.01);
    let dem = extract_dem(&c);
    let dec = MatchingDecoder::from_dem(&dem).unwrap();
    let shots = sample_shots(&c, 500, 3).unwrap();
    let a = dec.decode_batch(&shots, Some(1)).unwrap();
    let b = dec.decode_batch(&shots, Some(3)).unwrap();
    assert_eq!(a, b);
}
