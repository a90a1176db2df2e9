//! Time-dependent logical representatives.
//!
//! No single logical representative commutes with all three gauge colors, so
//! after every round the running representative is multiplied by a subset of
//! the gauge operators just measured. Rounds measure `XX`, `YY`, `ZZ` in turn;
//! step `t` of the schedule holds the representative valid just before round
//! `t` (color `t mod 3`) and the round-`t` bonds folded in afterwards. The
//! representatives repeat with period 6.
//!
//! At step 0 the horizontal observable is a `Z` string on a horizontally
//! wrapping cycle of red bonds and the vertical one an `X` string on a
//! vertically wrapping cycle of blue bonds; the two anticommute.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::gf2::{self, BitVec};
use crate::lattice::{Color, TorusLattice};
use crate::pauli::{Pauli, PauliString};

pub const PERIOD: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observable {
    H,
    V,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::H => "H",
            Observable::V => "V",
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "H" | "h" => Ok(Observable::H),
            "V" | "v" => Ok(Observable::V),
            _ => Err(format!("unknown observable {s:?} (expected H or V)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleStep {
    pub rep: PauliString,
    /// Bonds of color `step mod 3` multiplied into the representative after
    /// that round is measured.
    pub multiply: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LogicalSchedule {
    h: Vec<ScheduleStep>,
    v: Vec<ScheduleStep>,
}

impl LogicalSchedule {
    pub fn steps(&self, obs: Observable) -> &[ScheduleStep] {
        match obs {
            Observable::H => &self.h,
            Observable::V => &self.v,
        }
    }

    pub fn rep(&self, obs: Observable, t: usize) -> &PauliString {
        &self.steps(obs)[t % PERIOD].rep
    }

    pub fn multiply(&self, obs: Observable, t: usize) -> &[usize] {
        &self.steps(obs)[t % PERIOD].multiply
    }

    pub fn round_color(t: usize) -> Color {
        Color::from_index(t % 3)
    }

    /// Uniform Pauli type of the representative at step `t`.
    pub fn basis(&self, obs: Observable, t: usize) -> Option<Pauli> {
        uniform_type(self.rep(obs, t))
    }
}

pub fn uniform_type(p: &PauliString) -> Option<Pauli> {
    let mut it = p.iter().map(|(_, pp)| pp);
    let first = it.next()?;
    it.all(|pp| pp == first).then_some(first)
}

/// Shortest cycle of `color` bonds in the superlattice of `color` plaquettes
/// whose winding parity equals `target`. Returns the bond indices.
fn winding_cycle(lat: &TorusLattice, color: Color, target: [u8; 2]) -> Option<Vec<usize>> {
    let plaqs: Vec<usize> = lat.plaquettes_of_color(color).collect();
    let mut local = vec![usize::MAX; lat.plaquettes().len()];
    for (i, &p) in plaqs.iter().enumerate() {
        local[p] = i;
    }
    let wrap_in = |plaq: usize, q: usize| -> [u8; 2] {
        let p = &lat.plaquettes()[plaq];
        let k = p
            .qubits
            .iter()
            .position(|&x| x == q)
            .expect("qubit on plaquette");
        p.wraps[k]
    };
    // Superlattice adjacency: (neighbor, bond, parity flip).
    let mut adj: Vec<Vec<(usize, usize, u8)>> = vec![Vec::new(); plaqs.len()];
    for b in lat.bonds_of_color(color) {
        let bond = &lat.bonds()[b];
        let [q0, q1] = bond.qubits;
        let (pa, pb) = (lat.plaquette_at(q0, color), lat.plaquette_at(q1, color));
        let (ka, kb) = (wrap_in(pa, q0), wrap_in(pb, q1));
        let w = [
            (ka[0] ^ bond.wrap[0] ^ kb[0]) & 1,
            (ka[1] ^ bond.wrap[1] ^ kb[1]) & 1,
        ];
        let flip = w[0] | (w[1] << 1);
        adj[local[pa]].push((local[pb], b, flip));
        adj[local[pb]].push((local[pa], b, flip));
    }
    let want = target[0] | (target[1] << 1);
    let mut best: Option<Vec<usize>> = None;
    for start in 0..plaqs.len() {
        let idx = |node: usize, par: u8| node * 4 + par as usize;
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; plaqs.len() * 4];
        let mut seen = vec![false; plaqs.len() * 4];
        let mut queue = VecDeque::new();
        seen[idx(start, 0)] = true;
        queue.push_back((start, 0u8));
        while let Some((node, par)) = queue.pop_front() {
            if node == start && par == want {
                break;
            }
            for &(nb, bond, flip) in &adj[node] {
                let np = par ^ flip;
                if !seen[idx(nb, np)] {
                    seen[idx(nb, np)] = true;
                    prev[idx(nb, np)] = Some((idx(node, par), bond));
                    queue.push_back((nb, np));
                }
            }
        }
        if !seen[idx(start, want)] {
            return None;
        }
        let mut bonds = BTreeSet::new();
        let mut cur = idx(start, want);
        while let Some((p, b)) = prev[cur] {
            if !bonds.insert(b) {
                bonds.remove(&b);
            }
            cur = p;
        }
        let cand: Vec<usize> = bonds.into_iter().collect();
        if best.as_ref().is_none_or(|b| cand.len() < b.len()) {
            best = Some(cand);
        }
        // Translation symmetry makes every start equivalent up to ties; one
        // representative start per color suffices.
        break;
    }
    best
}

fn support_of(lat: &TorusLattice, bonds: &[usize], p: Pauli) -> PauliString {
    let mut qs = BTreeSet::new();
    for &b in bonds {
        for q in lat.bonds()[b].qubits {
            if !qs.insert(q) {
                qs.remove(&q);
            }
        }
    }
    PauliString::uniform(qs, p)
}

/// Bonds of `color` to multiply into `rep` so that the product commutes with
/// every bond of the next color. Minimum-weight choice among bonds touching
/// the support.
fn next_multiplier(lat: &TorusLattice, rep: &PauliString, color: Color) -> Option<Vec<usize>> {
    let next = Color::from_index(color.index() + 1);
    let cands: Vec<usize> = {
        let mut s = BTreeSet::new();
        for q in rep.support() {
            s.insert(lat.bond_at(q, color));
        }
        s.into_iter().collect()
    };
    let mut touched = BTreeSet::new();
    for q in rep.support() {
        touched.insert(q);
    }
    for &b in &cands {
        touched.extend(lat.bonds()[b].qubits);
    }
    let checks: BTreeSet<usize> = touched.iter().map(|&q| lat.bond_at(q, next)).collect();
    let gauges: Vec<PauliString> = cands
        .iter()
        .map(|&b| lat.gauge_operator(b).expect("bond index"))
        .collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &g in &checks {
        let gop = lat.gauge_operator(g).expect("bond index");
        let mut row = BitVec::zeros(cands.len());
        for (j, op) in gauges.iter().enumerate() {
            row.set(j, !op.commutes_with(&gop));
        }
        rows.push(row);
        rhs.push(!rep.commutes_with(&gop));
    }
    let (x, null) = gf2::solve(&rows, &rhs, cands.len())?;
    let best = gf2::min_weight_coset(&x, &null);
    Some(best.ones().map(|j| cands[j]).collect())
}

fn apply_bonds(lat: &TorusLattice, rep: &PauliString, bonds: &[usize]) -> PauliString {
    let mut out = rep.clone();
    for &b in bonds {
        out = out
            .mul_with_phase(&lat.gauge_operator(b).expect("bond index"))
            .0;
    }
    out.set_negative(false);
    out
}

fn evolve(lat: &TorusLattice, start: PauliString) -> Result<Vec<ScheduleStep>> {
    let fail = |why: &str| Error::Schedule(why.to_string());
    let mut steps = Vec::with_capacity(PERIOD);
    let mut rep = start.clone();
    for t in 0..PERIOD {
        let color = LogicalSchedule::round_color(t);
        let mult = next_multiplier(lat, &rep, color)
            .ok_or_else(|| fail("no gauge product keeps the representative commuting"))?;
        let next = apply_bonds(lat, &rep, &mult);
        steps.push(ScheduleStep {
            rep,
            multiply: mult,
        });
        rep = next;
    }
    // Six rounds translate the support; close the cycle with stabilizers and
    // the gauges just measured.
    let extra = closing_bonds(lat, &rep, &start, LogicalSchedule::round_color(PERIOD - 1))
        .ok_or_else(|| fail("representatives differ by more than the gauge group"))?;
    let mut set: BTreeSet<usize> = steps[PERIOD - 1].multiply.iter().copied().collect();
    for b in extra {
        if !set.insert(b) {
            set.remove(&b);
        }
    }
    steps[PERIOD - 1].multiply = set.into_iter().collect();
    Ok(steps)
}

fn symplectic(p: &PauliString, n: usize) -> BitVec {
    let mut v = BitVec::zeros(2 * n);
    for (q, pp) in p.iter() {
        let (x, z) = pp.bits();
        v.set(q, x);
        v.set(n + q, z);
    }
    v
}

/// Bonds whose product turns `from` into `to` (up to sign): boundaries of
/// stabilizers plus bonds of the round just measured.
fn closing_bonds(
    lat: &TorusLattice,
    from: &PauliString,
    to: &PauliString,
    round: Color,
) -> Option<Vec<usize>> {
    let n = lat.num_qubits();
    let mut gens: Vec<Vec<usize>> = lat.plaquettes().iter().map(|p| p.bonds.to_vec()).collect();
    gens.extend(lat.bonds_of_color(round).map(|b| vec![b]));
    let np = gens.len();
    let cols: Vec<BitVec> = gens
        .iter()
        .map(|bs| {
            let mut op = PauliString::identity();
            for &b in bs {
                op = op
                    .mul_with_phase(&lat.gauge_operator(b).expect("bond index"))
                    .0;
            }
            symplectic(&op, n)
        })
        .collect();
    let mut target = symplectic(from, n);
    target.xor_with(&symplectic(to, n));
    let mut rows = Vec::with_capacity(2 * n);
    let mut rhs = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        let mut row = BitVec::zeros(np);
        for (j, c) in cols.iter().enumerate() {
            row.set(j, c.get(i));
        }
        rows.push(row);
        rhs.push(target.get(i));
    }
    let (x, null) = gf2::solve(&rows, &rhs, np)?;
    let mut set = BTreeSet::new();
    for g in gf2::min_weight_coset(&x, &null).ones() {
        for &b in &gens[g] {
            if !set.insert(b) {
                set.remove(&b);
            }
        }
    }
    Some(set.into_iter().collect())
}

/// Build the period-6 schedules for the horizontal and vertical observable.
pub fn logical_schedule(lat: &TorusLattice) -> Result<LogicalSchedule> {
    let fail = |why: &str| Error::Schedule(why.to_string());
    let h_bonds = winding_cycle(lat, Color::Red, [1, 0])
        .ok_or_else(|| fail("no horizontally wrapping red cycle"))?;
    let v_bonds = winding_cycle(lat, Color::Blue, [0, 1])
        .ok_or_else(|| fail("no vertically wrapping blue cycle"))?;
    let h0 = support_of(lat, &h_bonds, Pauli::Z);
    let v0 = support_of(lat, &v_bonds, Pauli::X);
    if h0.commutes_with(&v0) {
        return Err(fail("horizontal and vertical representatives commute"));
    }
    Ok(LogicalSchedule {
        h: evolve(lat, h0)?,
        v: evolve(lat, v0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    fn check(lat: &TorusLattice) {
        let s = logical_schedule(lat).unwrap();
        let stabs: Vec<_> = (0..lat.plaquettes().len())
            .map(|i| lat.stabilizer_support(i).unwrap())
            .collect();
        for t in 0..2 * PERIOD {
            let (h, v) = (s.rep(Observable::H, t), s.rep(Observable::V, t));
            assert!(!h.commutes_with(v), "t={t}");
            for obs in [Observable::H, Observable::V] {
                let rep = s.rep(obs, t);
                assert!(stabs.iter().all(|st| st.commutes_with(rep)));
                let color = LogicalSchedule::round_color(t);
                for b in lat.bonds_of_color(color) {
                    assert!(rep.commutes_with(&lat.gauge_operator(b).unwrap()));
                }
                let next = apply_bonds(lat, rep, s.multiply(obs, t));
                assert!(next.eq_up_to_sign(s.rep(obs, t + 1)));
                assert!(s.basis(obs, t).is_some());
            }
        }
    }

    #[test]
    fn schedule_small_lattices() {
        for (l1, l2) in [(4, 6), (6, 9), (3, 6), (6, 12), (8, 12)] {
            check(&build_lattice(l1, l2).unwrap());
        }
    }

    #[test]
    fn horizontal_support_bound() {
        let lat = build_lattice(4, 6).unwrap();
        let s = logical_schedule(&lat).unwrap();
        for t in 0..PERIOD {
            assert!(s.rep(Observable::H, t).weight() <= 2 * lat.l1());
        }
    }
}
