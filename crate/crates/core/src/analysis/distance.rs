//! Spatial and timelike circuit distances.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builder::Family;
use crate::circuit::{Circuit, Gate, Instruction};
use crate::dem::{extract_dem, DetectorErrorModel};
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::logical::{logical_schedule, Observable};
use crate::noise::{apply_noise, NoiseModel};
use crate::sim::verify_determinism;

/// Shortest set of graphlike mechanisms (at most two detectors each) with
/// empty symptom and nonzero observable mask: the shortest cycle through the
/// boundary-augmented graph with odd parity for some observable.
pub fn graph_distance(dem: &DetectorErrorModel) -> Option<usize> {
    (0..dem.num_observables.min(64))
        .filter_map(|k| graph_search(dem, 1 << k, 1 << k))
        .min()
}

/// Shortest graphlike set with empty symptom whose mask restricted to
/// `relevant` equals `target`. Breadth-first search over (node, mask) from
/// every node incident to a relevant edge.
fn graph_search(dem: &DetectorErrorModel, relevant: u64, target: u64) -> Option<usize> {
    let n = dem.num_detectors;
    let boundary = n;
    let bits: Vec<u32> = (0..64).filter(|&b| relevant >> b & 1 == 1).collect();
    if bits.len() > 8 {
        return None;
    }
    // Compress the relevant bits into a small state index.
    let squeeze = |m: u64| {
        bits.iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | ((m >> b & 1) as usize) << i)
    };
    let states = 1usize << bits.len();
    let want = squeeze(target);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for m in &dem.mechanisms {
        let s = &m.symptom;
        let x = squeeze(s.observables);
        match s.detectors[..] {
            [] if x == want => return Some(1),
            [a] => {
                adj[a as usize].push((boundary, x));
                adj[boundary].push((a as usize, x));
            }
            [a, b] => {
                adj[a as usize].push((b as usize, x));
                adj[b as usize].push((a as usize, x));
            }
            _ => {}
        }
    }
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; (n + 1) * states];
    let mut queue = VecDeque::new();
    let starts: Vec<usize> = (0..=n)
        .filter(|&v| adj[v].iter().any(|&(_, x)| x != 0))
        .collect();
    for s in starts {
        dist.fill(usize::MAX);
        dist[s * states] = 0;
        queue.clear();
        queue.push_back((s, 0usize));
        while let Some((v, x)) = queue.pop_front() {
            let dv = dist[v * states + x];
            if best.is_some_and(|b| dv + 1 >= b) {
                break;
            }
            for &(u, y) in &adj[v] {
                let z = x ^ y;
                if dist[u * states + z] == usize::MAX {
                    dist[u * states + z] = dv + 1;
                    queue.push_back((u, z));
                }
            }
        }
        let d = dist[s * states + want];
        if d != usize::MAX {
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best
}

/// Exact minimum number of mechanisms with empty detector symptom and
/// nonzero observable mask, if it is at most `w_max` (`w_max <= 4`).
pub fn exhaustive_distance(dem: &DetectorErrorModel, w_max: usize) -> Result<Option<usize>> {
    exhaustive_search(dem, w_max, |m| m != 0)
}

fn exhaustive_search(
    dem: &DetectorErrorModel,
    w_max: usize,
    good: impl Fn(u64) -> bool,
) -> Result<Option<usize>> {
    if w_max > 4 {
        return Err(Error::InvalidArgument(
            "exhaustive search supports w_max <= 4".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let zob: Vec<u64> = (0..dem.num_detectors).map(|_| rng.gen()).collect();
    let ms = &dem.mechanisms;
    let key: Vec<u64> = ms
        .iter()
        .map(|m| {
            m.symptom
                .detectors
                .iter()
                .fold(0, |h, &d| h ^ zob[d as usize])
        })
        .collect();
    let dets = |i: usize| &ms[i].symptom.detectors[..];
    let mask = |i: usize| ms[i].symptom.observables;
    let same = |a: &[usize], b: &[usize]| -> bool {
        let mut x: Vec<u32> = Vec::new();
        for &i in a.iter().chain(b) {
            x = crate::dem::xor_sorted(&x, dets(i));
        }
        x.is_empty()
    };

    if w_max >= 1 && (0..ms.len()).any(|i| dets(i).is_empty() && good(mask(i))) {
        return Ok(Some(1));
    }
    // Mechanisms by symptom hash.
    let mut singles: HashMap<u64, Vec<usize>> = HashMap::new();
    for i in 0..ms.len() {
        singles.entry(key[i]).or_default().push(i);
    }
    if w_max >= 2 {
        for group in singles.values() {
            for (x, &i) in group.iter().enumerate() {
                for &j in &group[x + 1..] {
                    if good(mask(i) ^ mask(j)) && same(&[i], &[j]) {
                        return Ok(Some(2));
                    }
                }
            }
        }
    }
    if w_max >= 3 {
        for i in 0..ms.len() {
            for j in i + 1..ms.len() {
                if let Some(group) = singles.get(&(key[i] ^ key[j])) {
                    for &c in group {
                        if c != i
                            && c != j
                            && good(mask(c) ^ mask(i) ^ mask(j))
                            && same(&[i, j], &[c])
                        {
                            return Ok(Some(3));
                        }
                    }
                }
            }
        }
    }
    if w_max >= 4 {
        // Meet in the middle: two pairs with equal symptom.
        let mut pairs: HashMap<u64, Vec<(u64, u32, u32)>> = HashMap::new();
        for i in 0..ms.len() {
            for j in i + 1..ms.len() {
                let h = key[i] ^ key[j];
                let m = mask(i) ^ mask(j);
                let entry = pairs.entry(h).or_default();
                for &(m2, a, b) in entry.iter() {
                    if good(m2 ^ m) && same(&[i, j], &[a as usize, b as usize]) {
                        return Ok(Some(4));
                    }
                }
                if entry.iter().all(|&(m2, _, _)| m2 != m) {
                    entry.push((m, i as u32, j as u32));
                }
            }
        }
    }
    Ok(None)
}

/// Noise used to expose a circuit's fault structure when it has none.
const PROBE_NOISE: f64 = 1e-3;

fn model_of(circuit: &Circuit) -> Result<DetectorErrorModel> {
    if circuit.has_noise() {
        Ok(extract_dem(circuit))
    } else {
        Ok(extract_dem(&apply_noise(
            circuit,
            &NoiseModel::new(PROBE_NOISE)?,
        )?))
    }
}

/// Circuit distance, exact up to `w_max`; `None` means larger than `w_max`.
/// A noiseless circuit is analysed under circuit-level depolarizing noise.
/// For `w_max <= 4` the exhaustive search decides; beyond that the graph
/// search result is reported.
pub fn circuit_distance(circuit: &Circuit, w_max: usize) -> Result<Option<usize>> {
    let dem = model_of(circuit)?;
    if w_max <= 4 {
        return exhaustive_distance(&dem, w_max);
    }
    Ok(graph_distance(&dem).filter(|&d| d <= w_max))
}

/// Both distance searches on one model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DistanceReport {
    pub graph: Option<usize>,
    pub exhaustive: Option<usize>,
}

pub fn distance_report(circuit: &Circuit, w_max: usize) -> Result<DistanceReport> {
    let dem = model_of(circuit)?;
    Ok(DistanceReport {
        graph: graph_distance(&dem),
        exhaustive: exhaustive_distance(&dem, w_max.min(4))?,
    })
}

/// Memory circuit of `family` with measurement-flip noise on the gauge
/// measurements only (the final data readout stays exact).
pub fn gauge_flip_circuit(circuit: &Circuit, p: f64) -> Result<Circuit> {
    let clean = circuit.without_noise();
    let last = clean
        .instructions()
        .iter()
        .rposition(|i| i.gate.is_measurement())
        .ok_or_else(|| Error::InvalidCircuit("no measurements".into()))?;
    let mut out = Circuit::new();
    out.reserve_qubits(clean.num_qubits());
    for (k, inst) in clean.instructions().iter().enumerate() {
        let mut inst = inst.clone();
        if inst.gate.is_measurement() && k != last && p > 0.0 {
            inst.args = vec![p];
        }
        out.push(inst)?;
    }
    Ok(out)
}

/// Detectors that read the initial state: those that become random when the
/// first reset layer is replaced by maximally mixed qubits (halves of Bell
/// pairs with fresh partners).
pub fn initial_boundary_detectors(circuit: &Circuit) -> Result<Vec<usize>> {
    let clean = circuit.without_noise();
    let first = clean
        .instructions()
        .iter()
        .position(|i| i.gate.is_reset())
        .ok_or_else(|| Error::InvalidCircuit("no initialization layer".into()))?;
    let n = clean.num_qubits();
    let mut out = Circuit::new();
    out.reserve_qubits(n);
    for (k, inst) in clean.instructions().iter().enumerate() {
        if k == first {
            let qs: Vec<usize> = inst.qubits().collect();
            out.push(Instruction::on_qubits(
                Gate::H,
                (0..qs.len()).map(|i| n + i),
            ))?;
            out.push(Instruction::on_qubits(
                Gate::CX,
                qs.iter().enumerate().flat_map(|(i, &q)| [n + i, q]),
            ))?;
        } else {
            out.push(inst.clone())?;
        }
    }
    Ok(verify_determinism(&out).detectors)
}

/// Detectors that read the final measurement layer.
pub fn final_boundary_detectors(circuit: &Circuit) -> Vec<usize> {
    let last_start = circuit.num_measurements()
        - circuit
            .instructions()
            .iter()
            .rev()
            .find(|i| i.gate.is_measurement())
            .map_or(0, |i| i.targets.len());
    circuit
        .detector_records()
        .iter()
        .enumerate()
        .filter(|(_, recs)| recs.iter().any(|&r| r >= last_start))
        .map(|(d, _)| d)
        .collect()
}

/// Measurement-flip model with open time boundaries. Detectors reading the
/// initial state or the final readout are removed; observable 0 records
/// whether a mechanism touched an odd number of initial-boundary detectors,
/// observable 1 the same for final-boundary detectors. A set with empty
/// symptom and both observables flipped is a chain of gauge measurement
/// flips running from the start of the experiment to its end.
pub fn timelike_model(circuit: &Circuit) -> Result<DetectorErrorModel> {
    let noisy = gauge_flip_circuit(circuit, PROBE_NOISE)?;
    let dem = extract_dem(&noisy);
    let mut role = vec![0u8; dem.num_detectors];
    for d in initial_boundary_detectors(circuit)? {
        role[d] |= 1;
    }
    for d in final_boundary_detectors(circuit) {
        role[d] |= 2;
    }
    let mut out = DetectorErrorModel {
        num_detectors: dem.num_detectors,
        num_observables: 2,
        mechanisms: Vec::new(),
    };
    for mut m in dem.mechanisms {
        let touched = |bit: u8| {
            m.symptom
                .detectors
                .iter()
                .filter(|&&d| role[d as usize] & bit != 0)
                .count() as u64
                % 2
        };
        m.symptom.observables = touched(1) | touched(2) << 1;
        m.symptom.detectors.retain(|&d| role[d as usize] == 0);
        m.decomposition.clear();
        out.mechanisms.push(m);
    }
    Ok(out)
}

/// Timelike distance: the fewest gauge measurement flips that leave every
/// bulk detector silent while connecting the initial and final time
/// boundaries (see [`timelike_model`]), minimized over both memory circuits.
pub fn timelike_distance(family: Family, lat: &TorusLattice, cycles: usize) -> Result<usize> {
    let schedule = logical_schedule(lat)?;
    let mut best = usize::MAX;
    for obs in [Observable::H, Observable::V] {
        let c = family.build(lat, cycles, obs, &schedule)?;
        let dem = timelike_model(&c)?;
        let d = match graph_search(&dem, 3, 3) {
            Some(d) if d <= 4 => exhaustive_search(&dem, d, |m| m == 3)?.unwrap_or(d),
            Some(d) => d,
            None => exhaustive_search(&dem, 4, |m| m == 3)?.unwrap_or(usize::MAX),
        };
        best = best.min(d);
    }
    (best != usize::MAX)
        .then_some(best)
        .ok_or_else(|| Error::UnsupportedObservable("no timelike logical".into()))
}
