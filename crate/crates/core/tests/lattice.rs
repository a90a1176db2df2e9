use floquet::lattice::{build_lattice, Color};
use floquet::pauli::PauliString;
use proptest::prelude::*;

fn valid_dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        (2usize..=10, prop_oneof![Just(6usize), Just(12)]),
        ((1usize..=5).prop_map(|a| 2 * a), (1usize..=4).prop_map(|b| 3 * b)),
    ]
}

#[test]
fn sizes_without_a_coloring_are_rejected() {
    for l1 in 1..=12 {
        for l2 in 1..=12 {
            if (l1 * l2) % 6 != 0 {
                assert!(build_lattice(l1, l2).is_err(), "({l1},{l2})");
            }
        }
    }
}

#[test]
fn small_lattice_counts() {
    let lat = build_lattice(4, 6).unwrap();
    assert_eq!(lat.num_qubits(), 24);
    assert_eq!(lat.bonds().len(), 36);
    assert_eq!(lat.plaquettes().len(), 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counts_and_incidence((l1, l2) in valid_dims()) {
        let lat = build_lattice(l1, l2).unwrap();
        let n = l1 * l2;
        prop_assert_eq!(lat.num_qubits(), n);
        prop_assert_eq!(lat.bonds().len(), 3 * n / 2);
        prop_assert_eq!(lat.plaquettes().len(), n / 2);
        let mut degree = vec![[0usize; 3]; n];
        for b in lat.bonds() {
            prop_assert_ne!(b.qubits[0], b.qubits[1]);
            for &q in &b.qubits {
                degree[q][b.color.index()] += 1;
            }
        }
        prop_assert!(degree.iter().all(|d| *d == [1, 1, 1]));
        for c in 0..3 {
            prop_assert_eq!(lat.plaquettes_of_color(Color::from_index(c)).count(), n / 6);
        }
    }

    #[test]
    fn plaquettes_are_colored_hexagons((l1, l2) in valid_dims()) {
        let lat = build_lattice(l1, l2).unwrap();
        for p in lat.plaquettes() {
            let mut qs = p.qubits.to_vec();
            qs.sort();
            qs.dedup();
            prop_assert_eq!(qs.len(), 6);
            for i in 0..6 {
                let b = &lat.bonds()[p.bonds[i]];
                let ends = [p.qubits[i], p.qubits[(i + 1) % 6]];
                prop_assert!(b.qubits == ends || b.qubits == [ends[1], ends[0]]);
                prop_assert_ne!(b.color, p.color);
            }
        }
        for q in 0..lat.num_qubits() {
            let cs: Vec<Color> = (0..3).map(|c| lat.plaquettes()[lat.plaquette_at(q, Color::from_index(c))].color).collect();
            prop_assert_eq!(cs, vec![Color::from_index(0), Color::from_index(1), Color::from_index(2)]);
        }
    }

    #[test]
    fn stabilizers_commute_with_every_gauge((l1, l2) in valid_dims()) {
        let lat = build_lattice(l1, l2).unwrap();
        let gauges: Vec<PauliString> = (0..lat.bonds().len()).map(|b| lat.gauge_operator(b).unwrap()).collect();
        for (b, g) in gauges.iter().enumerate() {
            prop_assert_eq!(g.weight(), 2);
            let c = lat.bonds()[b].color;
            prop_assert!(g.iter().all(|(_, p)| p == c.pauli()));
        }
        for p in 0..lat.plaquettes().len() {
            let s = lat.stabilizer_support(p).unwrap();
            prop_assert_eq!(s.weight(), 6);
            prop_assert!(gauges.iter().all(|g| g.commutes_with(&s)));
        }
    }
}
