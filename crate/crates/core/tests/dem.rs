use floquet::builder::Family;
use floquet::circuit::Circuit;
use floquet::dem::{
    build_decoding_graph, depolarize1_component, depolarize2_component, extract_dem, xor_probability,
    DetectorErrorModel,
};
use floquet::lattice::build_lattice;
use floquet::logical::{logical_schedule, Observable};
use floquet::noise::{apply_noise, NoiseModel};
use proptest::prelude::*;

fn noisy(family: Family, l1: usize, l2: usize, cycles: usize, obs: Observable, p: f64) -> Circuit {
    let lat = build_lattice(l1, l2).unwrap();
    let s = logical_schedule(&lat).unwrap();
    let c = family.build(&lat, cycles, obs, &s).unwrap();
    apply_noise(&c, &NoiseModel::new(p).unwrap()).unwrap()
}

/// Probability that `k` independent components, each firing with
/// probability `q`, multiply to the Pauli with index `target` (bit pattern
/// in the group Z2^(2n)), by enumerating every subset.
fn net_probability(n_bits: u32, q: f64, target: usize) -> f64 {
    let elems: Vec<usize> = (1..1usize << n_bits).collect();
    let k = elems.len();
    let mut total = 0.0;
    for subset in 0u64..1 << k {
        let net = (0..k).filter(|&i| subset >> i & 1 == 1).fold(0, |a, i| a ^ elems[i]);
        if net == target {
            let on = subset.count_ones() as i32;
            total += q.powi(on) * (1.0 - q).powi(k as i32 - on);
        }
    }
    total
}

#[test]
fn single_mechanism_symptoms() {
    let c = Circuit::parse("R 0 1\nX_ERROR(0.1) 0\nM 0 1\nDETECTOR rec[-2]\nDETECTOR rec[-1]\nOBSERVABLE_INCLUDE(0) rec[-2]\n").unwrap();
    let dem = extract_dem(&c);
    assert_eq!(dem.mechanisms.len(), 1);
    let m = &dem.mechanisms[0];
    assert!((m.probability - 0.1).abs() < 1e-12);
    assert_eq!(m.symptom.detectors, vec![0]);
    assert_eq!(m.symptom.observables, 1);
}

#[test]
fn depolarizing_components_reproduce_the_channel() {
    for p in [1e-3, 0.01, 0.1, 0.3] {
        let q1 = depolarize1_component(p);
        for t in 1..4 {
            assert!((net_probability(2, q1, t) - p / 3.0).abs() < 1e-12, "p={p}");
        }
        let q2 = depolarize2_component(p);
        for t in [1, 6, 15] {
            assert!((net_probability(4, q2, t) - p / 15.0).abs() < 1e-12, "p={p}");
        }
    }
}

#[test]
fn every_memory_mechanism_has_a_graph_edge_decomposition() {
    for (family, l1, l2) in [(Family::Dynamic, 4, 6), (Family::Dynamic, 6, 9), (Family::Standard, 6, 12)] {
        for obs in [Observable::H, Observable::V] {
            let dem = extract_dem(&noisy(family, l1, l2, 3, obs, 1e-3));
            let g = build_decoding_graph(&dem).unwrap();
            assert_eq!(g.num_detectors, dem.num_detectors);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn xor_probability_is_symmetric_and_bounded(a in 0.0f64..=0.5, b in 0.0f64..=0.5) {
        let x = xor_probability(a, b);
        prop_assert!((x - xor_probability(b, a)).abs() < 1e-15);
        prop_assert!(x >= a.max(b) - 1e-15 && x <= 0.5 + 1e-15);
        prop_assert!((xor_probability(a, 0.0) - a).abs() < 1e-15);
    }

    #[test]
    fn mechanisms_are_well_formed(
        family in prop_oneof![Just(Family::Dynamic), Just(Family::Standard)],
        (l1, l2) in prop_oneof![Just((4, 6)), Just((3, 6))],
        cycles in 1usize..=3,
        obs in prop_oneof![Just(Observable::H), Just(Observable::V)],
        p in 1e-4f64..0.05,
    ) {
        let c = noisy(family, l1, l2, cycles, obs, p);
        let dem = extract_dem(&c);
        prop_assert_eq!(dem.num_detectors, c.num_detectors());
        prop_assert_eq!(dem.num_observables, c.num_observables());
        let mut seen = std::collections::HashSet::new();
        for m in &dem.mechanisms {
            prop_assert!(m.probability > 0.0 && m.probability <= 0.5);
            prop_assert!(!m.symptom.is_empty());
            prop_assert!(m.symptom.detectors.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(m.symptom.detectors.iter().all(|&d| (d as usize) < dem.num_detectors));
            prop_assert!(seen.insert(m.symptom.clone()), "duplicate symptom");
            if !m.decomposition.is_empty() {
                let x = m.decomposition.iter().fold(Default::default(), |a: floquet::dem::Symptom, s| a.xor(s));
                prop_assert_eq!(&x, &m.symptom);
            }
        }
        let back = DetectorErrorModel::parse(&dem.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), dem.to_text());
        prop_assert_eq!(back.mechanisms.len(), dem.mechanisms.len());
    }
}
