//! Memory-experiment circuits for the two syndrome-extraction schemes.
//!
//! Both builders run a symbolic stabilizer tracker alongside the emitted
//! instructions. Every measurement whose outcome is implied by earlier ones
//! becomes a detector; the implied parity is reduced against earlier
//! detectors so that each detector compares two nearby inferences of the same
//! stabilizer (or a stabilizer against initialization/readout).

use std::fmt;
use std::str::FromStr;

use crate::circuit::{Circuit, Gate, Instruction, Target};
use crate::error::{Error, Result};
use crate::flow::{FlowTracker, MARKER};
use crate::gf2::{self, BitVec};
use crate::lattice::{Color, TorusLattice};
use crate::logical::{LogicalSchedule, Observable};
use crate::pauli::Pauli;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Standard,
    Dynamic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Standard => "standard",
            Family::Dynamic => "dynamic",
        }
    }

    /// Lattice dimensions giving spatial distance `d`.
    pub fn dims(self, d: usize) -> (usize, usize) {
        match self {
            Family::Dynamic => (2 * d, 3 * d),
            Family::Standard => (d, 2 * d),
        }
    }

    /// Gauge cycles needed for timelike distance `d`.
    pub fn memory_cycles(self, d: usize) -> usize {
        match self {
            Family::Dynamic => d,
            Family::Standard => (4 * d).div_ceil(3),
        }
    }

    /// Physical qubits per unit of `d²`.
    pub fn footprint_factor(self) -> usize {
        match self {
            Family::Dynamic => 6,
            Family::Standard => 5,
        }
    }

    pub fn build(
        self,
        lat: &TorusLattice,
        cycles: usize,
        obs: Observable,
        schedule: &LogicalSchedule,
    ) -> Result<Circuit> {
        match self {
            Family::Dynamic => build_dynamic_circuit(lat, cycles, obs, schedule),
            Family::Standard => build_standard_circuit(lat, cycles, obs, schedule),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Family::Standard),
            "dynamic" => Ok(Family::Dynamic),
            _ => Err(format!(
                "unknown family {s:?} (expected standard or dynamic)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Origin {
    Bond(usize),
    Data(usize),
}

/// Rounds searched backwards when localizing a detector.
const DETECTOR_WINDOW: usize = 6;

struct Builder<'a> {
    lat: &'a TorusLattice,
    circuit: Circuit,
    tracker: FlowTracker,
    origins: Vec<Origin>,
    rounds: Vec<usize>,
    /// Per record, its value as a parity of random records (itself when
    /// random).
    canon: Vec<Vec<u32>>,
    /// Per data qubit, the records whose origin touches it.
    records_of_qubit: Vec<Vec<u32>>,
    /// Deterministic records awaiting a detector.
    pending: Vec<u32>,
    plaquettes_of_bond: Vec<Vec<usize>>,
    plaquettes_of_qubit: Vec<Vec<usize>>,
    round: usize,
    /// Observable records accumulated so far and the tracked value of the
    /// current representative.
    observable: Vec<u32>,
    obs_value: Option<Vec<u32>>,
    /// Round of each marked reset; data initialization counts as round -1.
    marker_rounds: Vec<isize>,
    initializing: bool,
    /// First record of the latest measurement layer.
    layer_start: u32,
}

/// Echelon basis of detector restrictions to one measurement layer.
struct LayerBasis {
    start: u32,
    len: usize,
    rows: Vec<(usize, BitVec)>,
}

impl LayerBasis {
    fn new(start: u32, end: u32) -> Self {
        LayerBasis {
            start,
            len: (end - start) as usize,
            rows: Vec::new(),
        }
    }

    /// Add the layer part of `recs`; false if it is already spanned.
    fn insert(&mut self, recs: &[u32]) -> bool {
        let mut v = BitVec::zeros(self.len);
        for &r in recs.iter().filter(|&&r| r >= self.start) {
            v.flip((r - self.start) as usize);
        }
        loop {
            let Some(top) = v.ones().last() else {
                return false;
            };
            match self.rows.iter().find(|(p, _)| *p == top) {
                Some((_, row)) => v.xor_with(row),
                None => {
                    self.rows.push((top, v));
                    return true;
                }
            }
        }
    }
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
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

impl<'a> Builder<'a> {
    fn new(lat: &'a TorusLattice, total_qubits: usize) -> Self {
        let mut plaquettes_of_bond = vec![Vec::new(); lat.bonds().len()];
        let mut plaquettes_of_qubit = vec![Vec::new(); lat.num_qubits()];
        for (p, plaq) in lat.plaquettes().iter().enumerate() {
            for b in plaq.bonds {
                plaquettes_of_bond[b].push(p);
            }
            for q in plaq.qubits {
                plaquettes_of_qubit[q].push(p);
            }
        }
        let mut circuit = Circuit::new();
        circuit.reserve_qubits(total_qubits);
        Builder {
            lat,
            circuit,
            tracker: FlowTracker::new(total_qubits),
            origins: Vec::new(),
            rounds: Vec::new(),
            canon: Vec::new(),
            records_of_qubit: vec![Vec::new(); lat.num_qubits()],
            pending: Vec::new(),
            plaquettes_of_bond,
            plaquettes_of_qubit,
            round: 0,
            observable: Vec::new(),
            obs_value: None,
            marker_rounds: Vec::new(),
            initializing: false,
            layer_start: 0,
        }
    }

    fn coords(&mut self, ancilla_base: Option<usize>) {
        let lat = self.lat;
        for q in 0..lat.num_qubits() {
            let (x, y) = lat.coords(q);
            self.circuit.push_unchecked(Instruction::new(
                Gate::QubitCoords,
                vec![x as f64, y as f64],
                vec![Target::Qubit(q as u32)],
            ));
        }
        let Some(base) = ancilla_base else { return };
        let (l1, l2) = (lat.l1() as f64, lat.l2() as f64);
        for (b, bond) in lat.bonds().iter().enumerate() {
            let (x0, y0) = lat.coords(bond.qubits[0]);
            let (x1, y1) = lat.coords(bond.qubits[1]);
            let unwrap = |d: f64, period: f64| {
                if d > 1.0 {
                    d - period
                } else if d < -1.0 {
                    d + period
                } else {
                    d
                }
            };
            let dx = unwrap(x1 as f64 - x0 as f64, l1);
            let dy = unwrap(y1 as f64 - y0 as f64, l2);
            self.circuit.push_unchecked(Instruction::new(
                Gate::QubitCoords,
                vec![x0 as f64 + dx / 2.0, y0 as f64 + dy / 2.0],
                vec![Target::Qubit((base + b) as u32)],
            ));
        }
    }

    fn tick(&mut self) {
        self.circuit.tick();
    }

    fn reset(&mut self, qubits: &[usize], basis: Pauli) {
        let round = self.round as isize - self.initializing as isize;
        for &q in qubits {
            let id = self.marker_rounds.len() as u32;
            self.marker_rounds.push(round);
            self.tracker.reset_marked(q, basis, id);
        }
        self.circuit.push_unchecked(Instruction::on_qubits(
            Gate::reset(basis),
            qubits.iter().copied(),
        ));
    }

    /// Controlled-`p` gates, `(control, target)` pairs.
    fn controlled(&mut self, p: Pauli, pairs: &[(usize, usize)]) {
        for &(c, t) in pairs {
            match p {
                Pauli::X => self.tracker.cx(c, t),
                Pauli::Y => self.tracker.cy(c, t),
                Pauli::Z => self.tracker.cz(c, t),
            }
        }
        self.circuit.push_unchecked(Instruction::on_qubits(
            Gate::controlled(p),
            pairs.iter().flat_map(|&(c, t)| [c, t]),
        ));
    }

    fn origin_qubits(&self, origin: Origin) -> Vec<usize> {
        match origin {
            Origin::Bond(b) => self.lat.bonds()[b].qubits.to_vec(),
            Origin::Data(q) => vec![q],
        }
    }

    fn measure(&mut self, qubits: &[(usize, Origin)], basis: Pauli) {
        self.layer_start = self.tracker.num_records() as u32;
        for &(q, origin) in qubits {
            let rec = self.tracker.num_records() as u32;
            match self.tracker.measure(q, basis) {
                Some(rel) => {
                    self.canon.push(rel.deps);
                    self.pending.push(rec);
                }
                None => self.canon.push(vec![rec]),
            }
            self.origins.push(origin);
            self.rounds.push(self.round);
            for dq in self.origin_qubits(origin) {
                self.records_of_qubit[dq].push(rec);
            }
        }
        self.circuit.push_unchecked(Instruction::on_qubits(
            Gate::measure(basis),
            qubits.iter().map(|&(q, _)| q),
        ));
    }

    /// Records from rounds `>= first_round` touching any of `qubits`, excluding
    /// records at or after `before`.
    fn records_near(&self, qubits: &[usize], first_round: isize, before: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for &q in qubits {
            for &r in self.records_of_qubit[q].iter().rev() {
                if r >= before {
                    continue;
                }
                if (self.rounds[r as usize] as isize) < first_round {
                    break;
                }
                out.push(r);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Minimum-weight subset of `unknowns` whose combined value equals the
    /// parity `target`. Resets from rounds `>= first_round` are constants and
    /// need not cancel.
    fn solve_local(
        &self,
        target: &[u32],
        unknowns: &[u32],
        first_round: isize,
    ) -> Option<Vec<u32>> {
        let mut vars: Vec<u32> = target.to_vec();
        for &u in unknowns {
            vars.extend_from_slice(&self.canon[u as usize]);
        }
        vars.sort_unstable();
        vars.dedup();
        vars.retain(|&v| {
            v & MARKER == 0 || self.marker_rounds[(v & !MARKER) as usize] < first_round
        });
        let index = |v: u32| vars.binary_search(&v).ok();
        let mut rows = vec![BitVec::zeros(unknowns.len()); vars.len()];
        for (j, &u) in unknowns.iter().enumerate() {
            for &v in &self.canon[u as usize] {
                if let Some(i) = index(v) {
                    rows[i].flip(j);
                }
            }
        }
        let mut rhs = vec![false; vars.len()];
        for &v in target {
            if let Some(i) = index(v) {
                rhs[i] = true;
            }
        }
        let (x, null) = gf2::solve(&rows, &rhs, unknowns.len())?;
        let best = gf2::min_weight_coset(&x, &null);
        Some(best.ones().map(|j| unknowns[j]).collect())
    }

    fn plaquette_for(&self, recs: &[u32]) -> usize {
        let mut score = vec![0usize; self.lat.plaquettes().len()];
        for &r in recs {
            let ps = match self.origins[r as usize] {
                Origin::Bond(b) => &self.plaquettes_of_bond[b],
                Origin::Data(q) => &self.plaquettes_of_qubit[q],
            };
            for &p in ps {
                score[p] += 1;
            }
        }
        let best = score.iter().copied().max().unwrap_or(0);
        score.iter().position(|&s| s == best).unwrap_or(0)
    }

    /// Emit a local detector for each deterministic measurement since the
    /// last call. Each record is first explained by earlier records; records
    /// that fail are retried with later records of the same layer, keeping
    /// only detectors independent of those already emitted for the layer.
    /// Deterministic parities with no local support (products of every gauge
    /// of one color, logical strings) are skipped.
    fn flush_detectors(&mut self) {
        let total = self.tracker.num_records() as u32;
        let pending = std::mem::take(&mut self.pending);
        let mut basis = LayerBasis::new(self.layer_start, total);
        let mut found = Vec::new();
        let mut retry = Vec::new();
        for rec in pending {
            match self.local_detector(rec, rec, &mut |_| true) {
                Some(mut recs) => {
                    recs.push(rec);
                    basis.insert(&recs);
                    found.push(recs);
                }
                None => retry.push(rec),
            }
        }
        for rec in retry {
            let accept = &mut |others: &[u32]| {
                let mut recs = others.to_vec();
                recs.push(rec);
                basis.insert(&recs)
            };
            if let Some(mut recs) = self.local_detector(rec, total, accept) {
                recs.push(rec);
                found.push(recs);
            }
        }
        for mut recs in found {
            recs.sort_unstable();
            let plaq = &self.lat.plaquettes()[self.plaquette_for(&recs)];
            let (cx, cy) = plaq.center;
            self.circuit.push_unchecked(Instruction::new(
                Gate::Detector,
                vec![cx, cy, self.round as f64],
                recs.iter().rev().map(|&r| Target::Rec(total - r)).collect(),
            ));
        }
    }

    /// Records before `before` (other than `rec`) fixing `rec`, the first
    /// candidate passing `accept`: the shortest look-back window first, and
    /// within it records on the boundary of one adjacent plaquette, then
    /// records touching one plaquette. Records near any adjacent plaquette
    /// over the full window are the last resort.
    fn local_detector(
        &self,
        rec: u32,
        before: u32,
        accept: &mut dyn FnMut(&[u32]) -> bool,
    ) -> Option<Vec<u32>> {
        for window in 1..=DETECTOR_WINDOW {
            let first_round = self.round as isize - window as isize;
            if let Some(sol) = self.plaquette_detector(rec, first_round, before, accept) {
                return Some(sol);
            }
        }
        let origin = self.origins[rec as usize];
        let mut near = Vec::new();
        for q in self.origin_qubits(origin) {
            for &p in &self.plaquettes_of_qubit[q] {
                near.extend(self.lat.plaquettes()[p].qubits);
            }
        }
        near.sort_unstable();
        near.dedup();
        let first_round = self.round as isize - DETECTOR_WINDOW as isize;
        let unknowns = self.unknowns(&near, first_round, rec, before, |_| true);
        self.solve_local(&self.canon[rec as usize], &unknowns, first_round)
            .filter(|sol| accept(sol))
    }

    fn unknowns(
        &self,
        qubits: &[usize],
        first_round: isize,
        rec: u32,
        before: u32,
        keep: impl Fn(u32) -> bool,
    ) -> Vec<u32> {
        self.records_near(qubits, first_round, before)
            .into_iter()
            .filter(|&r| r != rec && keep(r))
            .collect()
    }

    fn plaquette_detector(
        &self,
        rec: u32,
        first_round: isize,
        before: u32,
        accept: &mut dyn FnMut(&[u32]) -> bool,
    ) -> Option<Vec<u32>> {
        let origin = self.origins[rec as usize];
        let target = &self.canon[rec as usize];
        let adjacent: Vec<usize> = match origin {
            Origin::Bond(b) => self.plaquettes_of_bond[b].clone(),
            Origin::Data(q) => self.plaquettes_of_qubit[q].clone(),
        };
        for boundary_only in [true, false] {
            let mut sols: Vec<Vec<u32>> = Vec::new();
            for &p in &adjacent {
                let plaq = &self.lat.plaquettes()[p];
                let unknowns = self.unknowns(&plaq.qubits, first_round, rec, before, |r| {
                    !boundary_only
                        || match self.origins[r as usize] {
                            Origin::Bond(b) => plaq.bonds.contains(&b),
                            Origin::Data(_) => true,
                        }
                });
                if let Some(sol) = self.solve_local(target, &unknowns, first_round) {
                    sols.push(sol);
                }
            }
            sols.sort_by_key(|s| s.len());
            if let Some(sol) = sols.into_iter().find(|s| accept(s)) {
                return Some(sol);
            }
        }
        None
    }

    fn value(&self, rep: &crate::pauli::PauliString) -> Result<Vec<u32>> {
        let (_, deps) = self
            .tracker
            .value_of(rep)
            .ok_or_else(|| Error::Schedule("logical representative is not determined".into()))?;
        if deps.has_hidden() {
            return Err(Error::Schedule(
                "observable depends on unrecorded randomness".into(),
            ));
        }
        Ok(deps.records().to_vec())
    }

    /// Close round `self.round`: fold the change of the tracked logical value
    /// into the observable using records of recent rounds near its support.
    fn end_round(&mut self, obs: Observable, schedule: &LogicalSchedule) -> Result<()> {
        let t = self.round;
        let before = schedule.rep(obs, t);
        let after = schedule.rep(obs, t + 1);
        let new_value = self.value(after)?;
        let old_value = self.obs_value.take().expect("initialized");
        let delta = xor_sorted(&new_value, &old_value);
        let mut near: Vec<usize> = before.support().chain(after.support()).collect();
        for &b in schedule.multiply(obs, t) {
            near.extend(self.lat.bonds()[b].qubits);
        }
        near.sort_unstable();
        near.dedup();
        let unknowns = self.records_near(&near, t as isize - 3, u32::MAX);
        let part = self
            .solve_local(&delta, &unknowns, isize::MIN)
            .ok_or_else(|| {
                Error::Schedule(format!("observable update after round {t} is not local"))
            })?;
        self.observable = xor_sorted(&self.observable, &{
            let mut p = part;
            p.sort_unstable();
            p
        });
        self.obs_value = Some(new_value);
        self.round += 1;
        Ok(())
    }

    fn init_data(&mut self, obs: Observable, schedule: &LogicalSchedule) -> Result<()> {
        let basis = schedule
            .basis(obs, self.round)
            .ok_or_else(|| Error::Schedule("initial representative is not uniform".into()))?;
        let data: Vec<usize> = (0..self.lat.num_qubits()).collect();
        self.initializing = true;
        self.reset(&data, basis);
        self.initializing = false;
        self.tick();
        self.obs_value = Some(self.value(schedule.rep(obs, self.round))?);
        Ok(())
    }

    fn readout_and_observable(
        &mut self,
        obs: Observable,
        schedule: &LogicalSchedule,
    ) -> Result<()> {
        let step = self.round;
        let rep = schedule.rep(obs, step).clone();
        let basis = schedule
            .basis(obs, step)
            .ok_or_else(|| Error::Schedule("final representative is not uniform".into()))?;
        let base = self.tracker.num_records() as u32;
        let data: Vec<(usize, Origin)> = (0..self.lat.num_qubits())
            .map(|q| (q, Origin::Data(q)))
            .collect();
        self.measure(&data, basis);
        self.flush_detectors();
        let total = self.tracker.num_records() as u32;
        let support: Vec<u32> = rep.support().map(|q| base + q as u32).collect();
        let recs = xor_sorted(&self.observable, &support);
        self.circuit.push_unchecked(Instruction::new(
            Gate::ObservableInclude,
            vec![0.0],
            recs.iter().rev().map(|&r| Target::Rec(total - r)).collect(),
        ));
        Ok(())
    }
}

/// Schedule step at which the experiment starts: the first one from which
/// `cycles` cycles end with a representative of the same Pauli type as the
/// last measured gauges, so the readout checks every final-round outcome.
pub fn first_round(schedule: &LogicalSchedule, obs: Observable, cycles: usize) -> Result<usize> {
    (0..6)
        .find(|&s| {
            let end = s + 3 * cycles;
            schedule.basis(obs, s).is_some()
                && schedule.basis(obs, end) == Some(LogicalSchedule::round_color(end - 1).pauli())
        })
        .ok_or_else(|| Error::Schedule("no step gives a matched readout".into()))
}

fn check_cycles(cycles: usize) -> Result<()> {
    if cycles == 0 {
        return Err(Error::InvalidArgument("cycles must be at least 1".into()));
    }
    Ok(())
}

/// `(measured, other)` endpoints of each bond of `color` in round `round`.
pub fn dynamic_pairs(lat: &TorusLattice, color: Color, round: usize) -> Vec<(usize, usize, usize)> {
    lat.bonds_of_color(color)
        .map(|b| {
            let [q0, q1] = lat.bonds()[b].qubits;
            if lat.sublattice(q0) == round % 2 {
                (b, q0, q1)
            } else {
                (b, q1, q0)
            }
        })
        .collect()
}

/// Shrink gate for a bond: `(gate Pauli, control, target)` mapping the bond
/// operator onto the measured endpoint `m`.
pub fn shrink_gate(color: Color, m: usize, o: usize) -> (Pauli, usize, usize) {
    match color.pauli() {
        Pauli::X => (Pauli::X, m, o),
        Pauli::Y => (Pauli::Y, m, o),
        Pauli::Z => (Pauli::X, o, m),
    }
}

/// Ancilla-free circuit: each gauge operator is mapped onto one of its qubits
/// by a two-qubit Clifford, measured there, reset, and mapped back. The
/// measured endpoint alternates between the two sublattices from round to
/// round.
pub fn build_dynamic_circuit(
    lat: &TorusLattice,
    cycles: usize,
    obs: Observable,
    schedule: &LogicalSchedule,
) -> Result<Circuit> {
    check_cycles(cycles)?;
    let mut bld = Builder::new(lat, lat.num_qubits());
    bld.coords(None);
    let start = first_round(schedule, obs, cycles)?;
    bld.round = start;
    bld.init_data(obs, schedule)?;
    for round in start..start + 3 * cycles {
        let color = LogicalSchedule::round_color(round);
        let basis = color.pauli();
        let pairs = dynamic_pairs(lat, color, round);
        let gates: Vec<(Pauli, usize, usize)> = pairs
            .iter()
            .map(|&(_, m, o)| shrink_gate(color, m, o))
            .collect();
        let gate_pauli = gates[0].0;
        let ct: Vec<(usize, usize)> = gates.iter().map(|&(_, c, t)| (c, t)).collect();
        let measured: Vec<(usize, Origin)> = pairs
            .iter()
            .map(|&(b, m, _)| (m, Origin::Bond(b)))
            .collect();
        let qs: Vec<usize> = measured.iter().map(|&(q, _)| q).collect();
        bld.controlled(gate_pauli, &ct);
        bld.tick();
        bld.measure(&measured, basis);
        bld.flush_detectors();
        bld.tick();
        bld.reset(&qs, basis);
        bld.tick();
        bld.controlled(gate_pauli, &ct);
        bld.tick();
        bld.end_round(obs, schedule)?;
    }
    bld.readout_and_observable(obs, schedule)?;
    Ok(bld.circuit)
}

/// Ancilla-based circuit: one ancilla per bond (index `n + bond`), prepared in
/// `|+>`, coupled to both endpoints by controlled-P gates (smaller qubit
/// index first) and measured in the X basis.
pub fn build_standard_circuit(
    lat: &TorusLattice,
    cycles: usize,
    obs: Observable,
    schedule: &LogicalSchedule,
) -> Result<Circuit> {
    check_cycles(cycles)?;
    let n = lat.num_qubits();
    let mut bld = Builder::new(lat, n + lat.bonds().len());
    bld.coords(Some(n));
    let start = first_round(schedule, obs, cycles)?;
    bld.round = start;
    bld.init_data(obs, schedule)?;
    for round in start..start + 3 * cycles {
        let color = LogicalSchedule::round_color(round);
        let p = color.pauli();
        let bonds: Vec<usize> = lat.bonds_of_color(color).collect();
        let anc: Vec<usize> = bonds.iter().map(|&b| n + b).collect();
        bld.reset(&anc, Pauli::X);
        bld.tick();
        for side in 0..2 {
            let pairs: Vec<(usize, usize)> = bonds
                .iter()
                .map(|&b| (n + b, lat.bonds()[b].qubits[side]))
                .collect();
            bld.controlled(p, &pairs);
            bld.tick();
        }
        let measured: Vec<(usize, Origin)> =
            bonds.iter().map(|&b| (n + b, Origin::Bond(b))).collect();
        bld.measure(&measured, Pauli::X);
        bld.flush_detectors();
        bld.tick();
        bld.end_round(obs, schedule)?;
    }
    bld.readout_and_observable(obs, schedule)?;
    Ok(bld.circuit)
}

/// Per-cycle resource counts. Initialization (a leading reset-only layer) and
/// final readout (a trailing measurement-only layer) are excluded; a cycle is
/// six two-qubit gate layers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ResourceCounts {
    pub qubits: usize,
    pub cycles: usize,
    pub two_qubit_gates: usize,
    pub measurements: usize,
    pub resets: usize,
    pub gate_layers: usize,
    pub measure_layers: usize,
    pub reset_layers: usize,
}

impl ResourceCounts {
    /// Wall-clock time of one cycle. The dynamic schedule is fully
    /// sequential; the standard one overlaps ancilla measurement and reset
    /// with the data-qubit gates of the next color.
    pub fn cycle_time(&self, family: Family, t_gate: f64, t_meas: f64, t_reset: f64) -> f64 {
        match family {
            Family::Dynamic => {
                self.gate_layers as f64 * t_gate
                    + self.measure_layers as f64 * t_meas
                    + self.reset_layers as f64 * t_reset
            }
            Family::Standard => {
                (self.gate_layers / 2) as f64 * t_gate
                    + self.measure_layers as f64 * t_meas.max(t_reset)
            }
        }
    }
}

#[derive(Default, Clone, Copy)]
struct LayerScan {
    gates2: usize,
    meas: usize,
    resets: usize,
    other: bool,
}

/// TICK-delimited layers with per-layer tallies.
fn scan_layers(c: &Circuit) -> Vec<LayerScan> {
    let mut layers = vec![LayerScan::default()];
    for inst in c.instructions() {
        let cur = layers.last_mut().expect("nonempty");
        let g = inst.gate;
        if g == Gate::Tick {
            layers.push(LayerScan::default());
        } else if matches!(g, Gate::CX | Gate::CY | Gate::CZ) {
            cur.gates2 += inst.targets.len() / 2;
        } else if g.is_measurement() {
            cur.meas += inst.targets.len();
        } else if g.is_reset() {
            cur.resets += inst.targets.len();
        } else if g.is_unitary() {
            cur.other = true;
        }
    }
    layers.retain(|l| l.gates2 + l.meas + l.resets > 0 || l.other);
    layers
}

pub fn count_resources(c: &Circuit) -> ResourceCounts {
    let mut layers = scan_layers(c);
    if layers
        .first()
        .is_some_and(|l| l.resets > 0 && l.gates2 == 0 && l.meas == 0 && !l.other)
    {
        layers.remove(0);
    }
    if layers
        .last()
        .is_some_and(|l| l.meas > 0 && l.gates2 == 0 && l.resets == 0 && !l.other)
    {
        layers.pop();
    }
    let gate_layers = layers.iter().filter(|l| l.gates2 > 0).count();
    let cycles = gate_layers / 6;
    let div = cycles.max(1);
    ResourceCounts {
        qubits: c.num_qubits(),
        cycles,
        two_qubit_gates: layers.iter().map(|l| l.gates2).sum::<usize>() / div,
        measurements: layers.iter().map(|l| l.meas).sum::<usize>() / div,
        resets: layers.iter().map(|l| l.resets).sum::<usize>() / div,
        gate_layers: gate_layers / div,
        measure_layers: layers.iter().filter(|l| l.meas > 0).count() / div,
        reset_layers: layers.iter().filter(|l| l.resets > 0).count() / div,
    }
}

/// Longest run of two-qubit gate layers any qubit sees between consecutive
/// measurements of it (counting the runs before its first and after its last
/// measurement).
pub fn max_gate_layers_between_measurements(c: &Circuit) -> usize {
    let n = c.num_qubits();
    let mut run = vec![0usize; n];
    let mut worst = 0;
    let mut layer_has_gate = false;
    let mut layer_measured: Vec<usize> = Vec::new();
    let mut close_layer = |has_gate: bool, measured: &mut Vec<usize>, run: &mut Vec<usize>| {
        if has_gate {
            for r in run.iter_mut() {
                *r += 1;
            }
        }
        for &q in measured.iter() {
            worst = worst.max(run[q]);
            run[q] = 0;
        }
        measured.clear();
    };
    for inst in c.instructions() {
        let g = inst.gate;
        if g == Gate::Tick {
            close_layer(layer_has_gate, &mut layer_measured, &mut run);
            layer_has_gate = false;
        } else if matches!(g, Gate::CX | Gate::CY | Gate::CZ) {
            layer_has_gate = true;
        } else if g.is_measurement() {
            layer_measured.extend(inst.qubits());
        }
    }
    close_layer(layer_has_gate, &mut layer_measured, &mut run);
    run.into_iter().fold(worst, usize::max)
}
