//! Which plaquettes a single fault can flip together.

use std::collections::{BTreeSet, VecDeque};

use crate::circuit::Circuit;
use crate::dem::extract_dem;
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;

/// All-pairs hop distances in the plaquette adjacency graph (plaquettes are
/// adjacent when they share a bond).
pub fn plaquette_distances(lat: &TorusLattice) -> Vec<Vec<usize>> {
    let ps = lat.plaquettes();
    let n = ps.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| b != a && ps[a].bonds.iter().any(|x| ps[b].bonds.contains(x)))
                .collect()
        })
        .collect();
    (0..n)
        .map(|src| {
            let mut dist = vec![usize::MAX; n];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            dist
        })
        .collect()
}

/// Plaquettes whose detectors each error mechanism of `circuit` flips, read
/// from the detector coordinates. `circuit` must carry noise.
pub fn mechanism_plaquettes(circuit: &Circuit, lat: &TorusLattice) -> Result<Vec<Vec<usize>>> {
    let centers: Vec<(f64, f64)> = lat.plaquettes().iter().map(|p| p.center).collect();
    let owner = circuit
        .detector_coords()
        .iter()
        .enumerate()
        .map(|(d, c)| {
            let (x, y) = match c[..] {
                [x, y, ..] => (x, y),
                _ => {
                    return Err(Error::InvalidCircuit(format!(
                        "detector {d} has no coordinates"
                    )))
                }
            };
            centers
                .iter()
                .position(|&(cx, cy)| (cx - x).abs() < 1e-9 && (cy - y).abs() < 1e-9)
                .ok_or_else(|| {
                    Error::InvalidCircuit(format!("detector {d} is not at a plaquette center"))
                })
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(extract_dem(circuit)
        .mechanisms
        .iter()
        .map(|m| {
            let mut ps: Vec<usize> = m
                .symptom
                .detectors
                .iter()
                .map(|&d| owner[d as usize])
                .collect();
            ps.sort_unstable();
            ps.dedup();
            ps
        })
        .collect())
}

/// Plaquette pairs at distance `dist` that some single mechanism flips
/// without flipping any other plaquette.
pub fn flipped_pairs_at(
    circuit: &Circuit,
    lat: &TorusLattice,
    dist: usize,
) -> Result<BTreeSet<(usize, usize)>> {
    let dm = plaquette_distances(lat);
    Ok(mechanism_plaquettes(circuit, lat)?
        .into_iter()
        .filter_map(|ps| match ps[..] {
            [a, b] if dm[a][b] == dist => Some((a, b)),
            _ => None,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::Family;
    use crate::lattice::build_lattice;
    use crate::logical::{logical_schedule, Observable};
    use crate::noise::{apply_noise, NoiseModel};

    #[test]
    fn plaquette_graph_is_triangular() {
        let lat = build_lattice(6, 12).unwrap();
        let dm = plaquette_distances(&lat);
        for (a, row) in dm.iter().enumerate() {
            assert_eq!(row.iter().filter(|&&d| d == 1).count(), 6, "plaquette {a}");
            assert_eq!(row.iter().filter(|&&d| d == 2).count(), 12, "plaquette {a}");
        }
    }

    #[test]
    fn only_dynamic_faults_reach_next_nearest_plaquettes() {
        let lat = build_lattice(6, 9).unwrap();
        let s = logical_schedule(&lat).unwrap();
        let noisy = |f: Family| {
            apply_noise(
                &f.build(&lat, 3, Observable::H, &s).unwrap(),
                &NoiseModel::new(1e-3).unwrap(),
            )
            .unwrap()
        };
        let std = noisy(Family::Standard);
        let dynamic = noisy(Family::Dynamic);
        assert!(flipped_pairs_at(&std, &lat, 2).unwrap().is_empty());
        assert!(!flipped_pairs_at(&std, &lat, 1).unwrap().is_empty());
        assert!(!flipped_pairs_at(&dynamic, &lat, 2).unwrap().is_empty());
        let spans = mechanism_plaquettes(&std, &lat).unwrap();
        let dm = plaquette_distances(&lat);
        assert!(spans
            .iter()
            .all(|ps| ps.iter().all(|&a| ps.iter().all(|&b| dm[a][b] <= 1))));
    }
}
