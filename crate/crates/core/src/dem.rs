//! Detector error models and matching graphs.
//!
//! Text format, one item per line:
//!
//! ```text
//! error(0.001) D3 D7 L0
//! error(0.002) D1 D4 ^ D5 D9
//! detector D41
//! logical_observable L0
//! ```
//!
//! `^` separates the parts of a decomposed mechanism. The trailing
//! `detector`/`logical_observable` lines declare the highest indices.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Detectors flipped (sorted) and observable mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Symptom {
    pub detectors: Vec<u32>,
    pub observables: u64,
}

impl Symptom {
    pub fn is_empty(&self) -> bool {
        self.detectors.is_empty() && self.observables == 0
    }

    pub fn xor(&self, other: &Symptom) -> Symptom {
        Symptom {
            detectors: xor_sorted(&self.detectors, &other.detectors),
            observables: self.observables ^ other.observables,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub instruction: usize,
    /// Pauli on the first target, second target (two-qubit channels), or a
    /// measurement flip.
    pub component: Component,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Pauli(Option<Pauli>, Option<Pauli>),
    MeasurementFlip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMechanism {
    pub probability: f64,
    pub symptom: Symptom,
    /// First contributing fault (absent when parsed from text).
    pub provenance: Option<Provenance>,
    /// Graphlike parts whose XOR is `symptom`, when the mechanism is wider
    /// than an edge and a split within its own channel exists.
    pub decomposition: Vec<Symptom>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectorErrorModel {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub mechanisms: Vec<ErrorMechanism>,
}

pub fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Probability of an odd number of events.
pub fn xor_probability(p1: f64, p2: f64) -> f64 {
    p1 * (1.0 - p2) + p2 * (1.0 - p1)
}

/// Per-component probability of `DEPOLARIZE1(p)` written as three
/// independent X, Y, Z channels.
pub fn depolarize1_component(p: f64) -> f64 {
    0.5 - 0.5 * (1.0 - 4.0 * p / 3.0).max(0.0).sqrt()
}

/// Per-component probability of `DEPOLARIZE2(p)` written as fifteen
/// independent channels.
pub fn depolarize2_component(p: f64) -> f64 {
    0.5 - 0.5 * (1.0 - 16.0 * p / 15.0).max(0.0).powf(0.125)
}

/// Backward sensitivities: for each qubit, symptoms caused by an X or Z at
/// the current position.
struct Sensitivity {
    x: Vec<Symptom>,
    z: Vec<Symptom>,
}

impl Sensitivity {
    fn of(&self, q: usize, p: Option<Pauli>) -> Symptom {
        match p {
            None => Symptom::default(),
            Some(Pauli::X) => self.x[q].clone(),
            Some(Pauli::Z) => self.z[q].clone(),
            Some(Pauli::Y) => self.x[q].xor(&self.z[q]),
        }
    }
}

const PAULIS: [Option<Pauli>; 4] = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];

struct Collector {
    merged: HashMap<Symptom, usize>,
    mechanisms: Vec<ErrorMechanism>,
}

impl Collector {
    fn add(
        &mut self,
        p: f64,
        symptom: Symptom,
        provenance: Provenance,
        decomposition: Vec<Symptom>,
    ) {
        if symptom.is_empty() || p <= 0.0 {
            return;
        }
        match self.merged.get(&symptom) {
            Some(&i) => {
                let m = &mut self.mechanisms[i];
                m.probability = xor_probability(m.probability, p);
                if m.decomposition.is_empty() {
                    m.decomposition = decomposition;
                }
            }
            None => {
                self.merged.insert(symptom.clone(), self.mechanisms.len());
                self.mechanisms.push(ErrorMechanism {
                    probability: p,
                    symptom,
                    provenance: Some(provenance),
                    decomposition,
                });
            }
        }
    }

    /// Add every component of one channel instance, recording splits of wide
    /// components into two graphlike components of the same instance.
    fn add_channel(&mut self, p: f64, comps: Vec<(Symptom, Component)>, instruction: usize) {
        for (i, (s, c)) in comps.iter().enumerate() {
            let mut decomposition = Vec::new();
            if s.detectors.len() > 2 {
                'search: for (j, (a, _)) in comps.iter().enumerate() {
                    if j == i || a.detectors.len() > 2 || a.detectors.is_empty() {
                        continue;
                    }
                    let rest = s.xor(a);
                    if rest.detectors.len() <= 2
                        && !rest.detectors.is_empty()
                        && comps.iter().any(|(b, _)| *b == rest)
                    {
                        decomposition = vec![a.clone(), rest];
                        break 'search;
                    }
                }
            }
            let provenance = Provenance {
                instruction,
                component: *c,
            };
            self.add(p, s.clone(), provenance, decomposition);
        }
    }
}

/// Enumerate every independent fault of the circuit's noise channels and
/// its symptoms, merging faults with identical symptoms.
pub fn extract_dem(circuit: &Circuit) -> DetectorErrorModel {
    let nq = circuit.num_qubits();
    let dets = circuit.detector_records();
    let obs = circuit.observable_records();
    let mut rec_syms = vec![Symptom::default(); circuit.num_measurements()];
    for (d, recs) in dets.iter().enumerate() {
        for &r in recs {
            rec_syms[r].detectors = xor_sorted(&rec_syms[r].detectors, &[d as u32]);
        }
    }
    for (k, recs) in obs.iter().enumerate() {
        for &r in recs {
            rec_syms[r].observables ^= 1 << k;
        }
    }
    let mut sens = Sensitivity {
        x: vec![Symptom::default(); nq],
        z: vec![Symptom::default(); nq],
    };
    let mut out = Collector {
        merged: HashMap::new(),
        mechanisms: Vec::new(),
    };
    let mut rec = circuit.num_measurements();
    for (idx, inst) in circuit.instructions().iter().enumerate().rev() {
        let qs: Vec<usize> = inst.qubits().collect();
        let p = inst.probability();
        match inst.gate {
            Gate::H => {
                for &q in &qs {
                    std::mem::swap(&mut sens.x[q], &mut sens.z[q]);
                }
            }
            Gate::HYz => {
                for &q in &qs {
                    // Z before becomes Y after.
                    sens.z[q] = sens.x[q].xor(&sens.z[q]);
                }
            }
            Gate::CX => {
                for c in qs.chunks(2).rev() {
                    let (a, b) = (c[0], c[1]);
                    sens.x[a] = sens.x[a].xor(&sens.x[b]);
                    sens.z[b] = sens.z[b].xor(&sens.z[a]);
                }
            }
            Gate::CZ => {
                for c in qs.chunks(2).rev() {
                    let (a, b) = (c[0], c[1]);
                    let xa = sens.x[a].xor(&sens.z[b]);
                    sens.x[b] = sens.x[b].xor(&sens.z[a]);
                    sens.x[a] = xa;
                }
            }
            Gate::CY => {
                for c in qs.chunks(2).rev() {
                    let (a, b) = (c[0], c[1]);
                    sens.x[a] = sens.x[a].xor(&sens.x[b]).xor(&sens.z[b]);
                    sens.x[b] = sens.x[b].xor(&sens.z[a]);
                    sens.z[b] = sens.z[b].xor(&sens.z[a]);
                }
            }
            Gate::R | Gate::RX | Gate::RY => {
                for &q in &qs {
                    sens.x[q] = Symptom::default();
                    sens.z[q] = Symptom::default();
                }
            }
            Gate::M | Gate::MX | Gate::MY => {
                rec -= qs.len();
                for (i, &q) in qs.iter().enumerate().rev() {
                    let s = &rec_syms[rec + i];
                    if p > 0.0 {
                        let prov = Provenance {
                            instruction: idx,
                            component: Component::MeasurementFlip,
                        };
                        out.add(p, s.clone(), prov, Vec::new());
                    }
                    match inst.gate.basis() {
                        Some(Pauli::Z) => sens.x[q] = sens.x[q].xor(s),
                        Some(Pauli::X) => sens.z[q] = sens.z[q].xor(s),
                        _ => {
                            sens.x[q] = sens.x[q].xor(s);
                            sens.z[q] = sens.z[q].xor(s);
                        }
                    }
                }
            }
            Gate::XError | Gate::YError | Gate::ZError => {
                let e = match inst.gate {
                    Gate::XError => Pauli::X,
                    Gate::YError => Pauli::Y,
                    _ => Pauli::Z,
                };
                for &q in &qs {
                    let prov = Provenance {
                        instruction: idx,
                        component: Component::Pauli(Some(e), None),
                    };
                    out.add(p, sens.of(q, Some(e)), prov, Vec::new());
                }
            }
            Gate::Depolarize1 => {
                let pc = depolarize1_component(p);
                for &q in &qs {
                    let comps = PAULIS[1..]
                        .iter()
                        .map(|&e| (sens.of(q, e), Component::Pauli(e, None)))
                        .collect();
                    out.add_channel(pc, comps, idx);
                }
            }
            Gate::Depolarize2 => {
                let pc = depolarize2_component(p);
                for c in qs.chunks(2) {
                    let mut comps = Vec::with_capacity(15);
                    for &ea in &PAULIS {
                        for &eb in &PAULIS {
                            if ea.is_none() && eb.is_none() {
                                continue;
                            }
                            let s = sens.of(c[0], ea).xor(&sens.of(c[1], eb));
                            comps.push((s, Component::Pauli(ea, eb)));
                        }
                    }
                    out.add_channel(pc, comps, idx);
                }
            }
            Gate::Tick | Gate::Detector | Gate::ObservableInclude | Gate::QubitCoords => {}
        }
    }
    let mut mechanisms = out.mechanisms;
    mechanisms.sort_by(|a, b| a.symptom.cmp(&b.symptom));
    DetectorErrorModel {
        num_detectors: dets.len(),
        num_observables: obs.len(),
        mechanisms,
    }
}

fn write_symptom(s: &mut String, sym: &Symptom) {
    for d in &sym.detectors {
        let _ = write!(s, " D{d}");
    }
    for k in 0..64 {
        if sym.observables >> k & 1 == 1 {
            let _ = write!(s, " L{k}");
        }
    }
}

impl DetectorErrorModel {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.mechanisms {
            let _ = write!(s, "error({})", m.probability);
            if m.decomposition.is_empty() {
                write_symptom(&mut s, &m.symptom);
            } else {
                for (i, part) in m.decomposition.iter().enumerate() {
                    if i > 0 {
                        s.push_str(" ^");
                    }
                    write_symptom(&mut s, part);
                }
            }
            s.push('\n');
        }
        if self.num_detectors > 0 {
            let _ = writeln!(s, "detector D{}", self.num_detectors - 1);
        }
        if self.num_observables > 0 {
            let _ = writeln!(s, "logical_observable L{}", self.num_observables - 1);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut dem = DetectorErrorModel::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: n + 1,
                message,
            };
            let target = |tok: &str| -> Result<(char, u32)> {
                let (kind, rest) = tok.split_at(1);
                let kind = kind.chars().next().unwrap_or(' ');
                let v: u32 = rest
                    .parse()
                    .map_err(|_| err(format!("bad target `{tok}`")))?;
                if kind != 'D' && kind != 'L' || (kind == 'L' && v >= 64) {
                    return Err(err(format!("bad target `{tok}`")));
                }
                Ok((kind, v))
            };
            if let Some(rest) = line.strip_prefix("error(") {
                let (p, targets) = rest
                    .split_once(')')
                    .ok_or_else(|| err("missing `)`".into()))?;
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad probability `{p}`")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(err(format!("probability {p} outside [0, 1]")));
                }
                let mut parts = vec![Symptom::default()];
                for tok in targets.split_whitespace() {
                    if tok == "^" {
                        parts.push(Symptom::default());
                        continue;
                    }
                    let (kind, v) = target(tok)?;
                    let part = parts.last_mut().expect("nonempty");
                    if kind == 'D' {
                        part.detectors = xor_sorted(&part.detectors, &[v]);
                        dem.num_detectors = dem.num_detectors.max(v as usize + 1);
                    } else {
                        part.observables ^= 1 << v;
                        dem.num_observables = dem.num_observables.max(v as usize + 1);
                    }
                }
                let symptom = parts.iter().fold(Symptom::default(), |a, b| a.xor(b));
                dem.mechanisms.push(ErrorMechanism {
                    probability: p,
                    symptom,
                    provenance: None,
                    decomposition: if parts.len() > 1 { parts } else { Vec::new() },
                });
            } else if let Some(rest) = line.strip_prefix("detector") {
                for tok in rest.split_whitespace() {
                    let (kind, v) = target(tok)?;
                    if kind != 'D' {
                        return Err(err(format!("expected a detector, got `{tok}`")));
                    }
                    dem.num_detectors = dem.num_detectors.max(v as usize + 1);
                }
            } else if let Some(rest) = line.strip_prefix("logical_observable") {
                for tok in rest.split_whitespace() {
                    let (kind, v) = target(tok)?;
                    if kind != 'L' {
                        return Err(err(format!("expected an observable, got `{tok}`")));
                    }
                    dem.num_observables = dem.num_observables.max(v as usize + 1);
                }
            } else {
                return Err(err(format!("unknown item `{line}`")));
            }
        }
        Ok(dem)
    }
}

/// Matching-graph edge; `b == None` joins the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: u32,
    pub b: Option<u32>,
    pub probability: f64,
    pub weight: f64,
    pub observables: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodingGraph {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub edges: Vec<Edge>,
}

/// Edge weight `ln((1 - p) / p)`, clamped at zero.
pub fn edge_weight(p: f64) -> f64 {
    ((1.0 - p) / p).ln().max(0.0)
}

type EdgeKey = (u32, Option<u32>, u64);

fn edge_key(s: &Symptom) -> Option<EdgeKey> {
    match s.detectors[..] {
        [a] => Some((a, None, s.observables)),
        [a, b] => Some((a, Some(b), s.observables)),
        _ => None,
    }
}

/// Split `target` into existing edges with matching observable mask.
fn decompose(
    target: &Symptom,
    masks: &HashMap<(u32, Option<u32>), Vec<u64>>,
    allow_new: bool,
) -> Option<Vec<EdgeKey>> {
    fn go(
        rest: &[u32],
        want: u64,
        masks: &HashMap<(u32, Option<u32>), Vec<u64>>,
        allow_new: bool,
        acc: &mut Vec<EdgeKey>,
    ) -> bool {
        let Some((&first, tail)) = rest.split_first() else {
            return want == 0;
        };
        if allow_new && rest.len() <= 2 {
            acc.push((first, tail.first().copied(), want));
            return true;
        }
        if let Some(ms) = masks.get(&(first, None)) {
            for &m in ms {
                acc.push((first, None, m));
                if go(tail, want ^ m, masks, allow_new, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        for (i, &other) in tail.iter().enumerate() {
            if let Some(ms) = masks.get(&(first, Some(other))) {
                let mut remaining = tail.to_vec();
                remaining.remove(i);
                for &m in ms {
                    acc.push((first, Some(other), m));
                    if go(&remaining, want ^ m, masks, allow_new, acc) {
                        return true;
                    }
                    acc.pop();
                }
            }
        }
        false
    }
    let mut acc = Vec::new();
    go(
        &target.detectors,
        target.observables,
        masks,
        allow_new,
        &mut acc,
    )
    .then_some(acc)
}

/// Split into consecutive pairs, the observables on the first part.
fn pair_up(target: &Symptom) -> Vec<EdgeKey> {
    target
        .detectors
        .chunks(2)
        .enumerate()
        .map(|(i, c)| {
            (
                c[0],
                c.get(1).copied(),
                if i == 0 { target.observables } else { 0 },
            )
        })
        .collect()
}

/// Build the matching graph: graphlike mechanisms become edges (merged per
/// endpoints and mask), wider ones are split into existing edges. A mechanism
/// that cannot be split that way gets one new edge for what is left over, or
/// failing that is paired up arbitrarily.
pub fn build_decoding_graph(dem: &DetectorErrorModel) -> Result<DecodingGraph> {
    decoding_graph(dem, false)
}

/// As `build_decoding_graph`, but fail on mechanisms that do not split into
/// existing edges.
pub fn build_decoding_graph_strict(dem: &DetectorErrorModel) -> Result<DecodingGraph> {
    decoding_graph(dem, true)
}

fn decoding_graph(dem: &DetectorErrorModel, strict: bool) -> Result<DecodingGraph> {
    let mut probs: HashMap<EdgeKey, f64> = HashMap::new();
    let mut order: Vec<EdgeKey> = Vec::new();
    let mut add =
        |key: EdgeKey, p: f64, probs: &mut HashMap<EdgeKey, f64>| match probs.get_mut(&key) {
            Some(q) => *q = xor_probability(*q, p),
            None => {
                probs.insert(key, p);
                order.push(key);
            }
        };
    for m in &dem.mechanisms {
        if let Some(k) = edge_key(&m.symptom) {
            add(k, m.probability, &mut probs);
        }
    }
    let mut masks: HashMap<(u32, Option<u32>), Vec<u64>> = HashMap::new();
    for &(a, b, m) in probs.keys() {
        masks.entry((a, b)).or_default().push(m);
    }
    for v in masks.values_mut() {
        v.sort_unstable();
    }
    for m in &dem.mechanisms {
        if m.symptom.detectors.len() <= 2 {
            continue;
        }
        let hinted: Option<Vec<EdgeKey>> = if m.decomposition.is_empty() {
            None
        } else {
            m.decomposition
                .iter()
                .map(|part| edge_key(part).filter(|k| probs.contains_key(k)))
                .collect()
        };
        let parts = match hinted {
            Some(parts) => parts,
            None => match decompose(&m.symptom, &masks, false) {
                Some(parts) => parts,
                None if strict => {
                    let mut s = format!("error({})", m.probability);
                    write_symptom(&mut s, &m.symptom);
                    return Err(Error::UndecomposableMechanism(s));
                }
                None => decompose(&m.symptom, &masks, true).unwrap_or_else(|| pair_up(&m.symptom)),
            },
        };
        for k in parts {
            add(k, m.probability, &mut probs);
        }
    }
    order.sort();
    let edges = order
        .into_iter()
        .map(|k| {
            let p = probs[&k];
            Edge {
                a: k.0,
                b: k.1,
                probability: p,
                weight: edge_weight(p),
                observables: k.2,
            }
        })
        .collect();
    Ok(DecodingGraph {
        num_detectors: dem.num_detectors,
        num_observables: dem.num_observables,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::Family;
    use crate::lattice::build_lattice;
    use crate::logical::{logical_schedule, Observable};
    use crate::noise::{apply_noise, NoiseModel};

    fn noisy(family: Family, l1: usize, l2: usize, cycles: usize, p: f64) -> Circuit {
        let lat = build_lattice(l1, l2).unwrap();
        let s = logical_schedule(&lat).unwrap();
        let c = family.build(&lat, cycles, Observable::H, &s).unwrap();
        apply_noise(&c, &NoiseModel::new(p).unwrap()).unwrap()
    }

    #[test]
    fn noiseless_circuit_has_empty_model() {
        let lat = build_lattice(4, 6).unwrap();
        let s = logical_schedule(&lat).unwrap();
        let c = Family::Dynamic.build(&lat, 2, Observable::H, &s).unwrap();
        assert!(extract_dem(&c).mechanisms.is_empty());
    }

    #[test]
    fn every_logical_fault_is_detected() {
        for (family, l1, l2) in [(Family::Dynamic, 6, 9), (Family::Standard, 6, 12)] {
            for obs in [Observable::H, Observable::V] {
                for cycles in [2, 3] {
                    let lat = build_lattice(l1, l2).unwrap();
                    let s = logical_schedule(&lat).unwrap();
                    let c = family.build(&lat, cycles, obs, &s).unwrap();
                    let c = apply_noise(&c, &NoiseModel::new(1e-3).unwrap()).unwrap();
                    let dem = extract_dem(&c);
                    assert!(
                        dem.mechanisms
                            .iter()
                            .all(|m| !m.symptom.detectors.is_empty()),
                        "{family} {obs:?} x{cycles}"
                    );
                }
            }
        }
    }

    #[test]
    fn small_torus_needs_fallback_edges() {
        let dem = extract_dem(&noisy(Family::Standard, 3, 6, 2, 1e-3));
        assert!(build_decoding_graph_strict(&dem).is_err());
        let g = build_decoding_graph(&dem).unwrap();
        assert!(g.edges.iter().all(|e| e.a < g.num_detectors as u32));
    }

    #[test]
    fn weight_formula() {
        assert!((edge_weight(1e-3) - 6.906755).abs() < 1e-6);
    }

    #[test]
    fn component_probabilities_compose() {
        let p = 0.03;
        // Net identity probability over the independent components.
        let q = depolarize1_component(p);
        assert!(((1.0 + 3.0 * (1.0 - 2.0 * q).powi(2)) / 4.0 - (1.0 - p)).abs() < 1e-12);
        let q = depolarize2_component(p);
        assert!(((1.0 + 15.0 * (1.0 - 2.0 * q).powi(8)) / 16.0 - (1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let c = noisy(Family::Dynamic, 4, 6, 2, 1e-3);
        let dem = extract_dem(&c);
        assert!(!dem.mechanisms.is_empty());
        let parsed = DetectorErrorModel::parse(&dem.to_text()).unwrap();
        assert_eq!(parsed.num_detectors, dem.num_detectors);
        assert_eq!(parsed.mechanisms.len(), dem.mechanisms.len());
        for (a, b) in parsed.mechanisms.iter().zip(&dem.mechanisms) {
            assert_eq!(a.symptom, b.symptom);
            assert_eq!(a.probability, b.probability);
            assert_eq!(a.decomposition, b.decomposition);
        }
        assert!(DetectorErrorModel::parse("error(2) D0").is_err());
        assert!(DetectorErrorModel::parse("oops D0").is_err());
    }

    #[test]
    fn graphs_build_for_both_families() {
        for (family, l1, l2) in [
            (Family::Dynamic, 4, 6),
            (Family::Dynamic, 6, 9),
            (Family::Standard, 6, 12),
        ] {
            let dem = extract_dem(&noisy(family, l1, l2, 2, 1e-3));
            let g = build_decoding_graph_strict(&dem).unwrap();
            assert!(g.edges.iter().all(|e| e.weight > 0.0));
            let graphlike = dem
                .mechanisms
                .iter()
                .filter(|m| m.symptom.detectors.len() <= 2)
                .count();
            assert!(g.edges.len() >= graphlike.min(1));
        }
    }
}
