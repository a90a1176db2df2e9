use floquet::builder::Family;
use floquet::circuit::Circuit;
use floquet::dem::extract_dem;
use floquet::error::Error;
use floquet::lattice::build_lattice;
use floquet::logical::{logical_schedule, Observable};
use floquet::noise::{apply_noise, NoiseModel};
use floquet::sim::{reference_simulate, sample_shots, sample_shots_with, ShotBlock};
use proptest::prelude::*;

fn noisy(family: Family, l1: usize, l2: usize, cycles: usize, obs: Observable, p: f64) -> Circuit {
    let lat = build_lattice(l1, l2).unwrap();
    let s = logical_schedule(&lat).unwrap();
    let c = family.build(&lat, cycles, obs, &s).unwrap();
    apply_noise(&c, &NoiseModel::new(p).unwrap()).unwrap()
}

fn is_silent(b: &ShotBlock) -> bool {
    (0..b.shots()).all(|s| b.fired(s).is_empty() && b.observable_mask(s) == 0)
}

#[test]
fn nondeterministic_detectors_are_rejected() {
    let c = Circuit::parse("RX 0\nM 0\nDETECTOR rec[-1]\n").unwrap();
    assert!(matches!(sample_shots(&c, 10, 0), Err(Error::NondeterministicDetector { .. })));
}

#[test]
fn certain_flip_fires_its_detector() {
    let c = Circuit::parse("R 0 1\nX_ERROR(1) 0\nM 0 1\nDETECTOR rec[-2]\nDETECTOR rec[-1]\nOBSERVABLE_INCLUDE(0) rec[-2]\n").unwrap();
    for b in [sample_shots(&c, 50, 1).unwrap(), reference_simulate(&c, 50, 1).unwrap()] {
        for s in 0..50 {
            assert_eq!(b.fired(s), vec![0]);
            assert_eq!(b.observable_mask(s), 1);
        }
    }
}

/// Each detector fires with probability (1 - prod(1 - 2 p_i)) / 2 over the
/// mechanisms that flip it.
#[test]
fn detector_marginals_match_the_error_model() {
    let c = noisy(Family::Dynamic, 4, 6, 2, Observable::H, 0.02);
    let dem = extract_dem(&c);
    let mut keep = vec![1.0f64; dem.num_detectors];
    for m in &dem.mechanisms {
        for &d in &m.symptom.detectors {
            keep[d as usize] *= 1.0 - 2.0 * m.probability;
        }
    }
    let n = 40_000;
    let b = sample_shots(&c, n, 3).unwrap();
    for (d, k) in keep.iter().enumerate() {
        let want = (1.0 - k) / 2.0;
        let got = (0..n).filter(|&s| b.detector(s, d)).count() as f64 / n as f64;
        let sigma = (want * (1.0 - want) / n as f64).sqrt();
        assert!((got - want).abs() <= 5.0 * sigma, "detector {d}: {got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn noiseless_shots_are_silent(
        family in prop_oneof![Just(Family::Dynamic), Just(Family::Standard)],
        (l1, l2) in prop_oneof![Just((4, 6)), Just((3, 6)), Just((2, 6))],
        cycles in 1usize..=3,
        seed in any::<u64>(),
    ) {
        for obs in [Observable::H, Observable::V] {
            let c = noisy(family, l1, l2, cycles, obs, 0.0);
            prop_assert!(is_silent(&sample_shots(&c, 300, seed).unwrap()));
            prop_assert!(is_silent(&reference_simulate(&c, 20, seed).unwrap()));
        }
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), workers in 1usize..=3) {
        let c = noisy(Family::Dynamic, 4, 6, 2, Observable::V, 0.03);
        let a = sample_shots(&c, 700, seed).unwrap();
        prop_assert_eq!(&a, &sample_shots_with(&c, 700, seed, Some(workers)).unwrap());
        prop_assert_eq!(a.shots(), 700);
        prop_assert_eq!(a.num_detectors(), c.num_detectors());
    }

    #[test]
    fn shot_files_round_trip(
        shots in 0usize..40,
        dets in 0usize..150,
        obs in 0usize..3,
        bits in proptest::collection::vec(any::<bool>(), 40 * 153),
    ) {
        let mut b = ShotBlock::new(shots, dets, obs);
        for s in 0..shots {
            for d in 0..dets {
                b.set_detector(s, d, bits[s * 153 + d]);
            }
            for k in 0..obs {
                b.set_observable(s, k, bits[s * 153 + 150 + k]);
            }
        }
        let mut bin = Vec::new();
        b.write_binary(&mut bin).unwrap();
        prop_assert_eq!(&ShotBlock::read_binary(&bin[..]).unwrap(), &b);
        if shots > 0 {
            let mut text = Vec::new();
            b.write_text(&mut text).unwrap();
            prop_assert_eq!(&ShotBlock::read_text(&text[..]).unwrap(), &b);
        }
    }
}
