//! Symbolic stabilizer tracking with measurement-record-valued signs.
//!
//! A destabilizer/stabilizer tableau whose stabilizer signs are affine
//! functions over GF(2) of measurement outcomes. Random measurements introduce
//! a fresh variable (the record itself); deterministic ones yield a relation
//! `record = const + sum(earlier records)`, which is exactly a detector.
//!
//! Random resets introduce hidden variables that are never recorded. If a
//! later measurement is determined only up to hidden variables, the record
//! absorbs one of them and no relation is produced.

use crate::pauli::{Pauli, PauliString};

const HIDDEN: u32 = 1 << 31;
/// Variables standing for the (zero) preparation sign of a marked reset.
pub const MARKER: u32 = 1 << 30;

/// Sorted set of variable ids, combined by symmetric difference.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSet(Vec<u32>);

impl VarSet {
    pub fn single(v: u32) -> Self {
        VarSet(vec![v])
    }

    pub fn xor_with(&mut self, other: &VarSet) {
        if other.0.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (a, b) = (&self.0, &other.0);
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
        self.0 = out;
    }

    pub fn toggle(&mut self, v: u32) {
        self.xor_with(&VarSet::single(v));
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn has_hidden(&self) -> bool {
        self.0.last().is_some_and(|&v| v & HIDDEN != 0)
    }

    fn last_hidden(&self) -> Option<u32> {
        self.0.last().copied().filter(|&v| v & HIDDEN != 0)
    }

    /// Variable ids: records, then reset markers (`MARKER | id`), then hidden
    /// variables.
    pub fn records(&self) -> &[u32] {
        &self.0
    }
}

/// Outcome of a deterministic measurement: the record equals
/// `constant ^ parity(deps)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub deps: Vec<u32>,
    pub constant: bool,
}

#[derive(Clone)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl Row {
    fn new(words: usize) -> Self {
        Row {
            x: vec![0; words],
            z: vec![0; words],
        }
    }

    #[inline]
    fn get(&self, q: usize) -> (bool, bool) {
        let (w, b) = (q / 64, q % 64);
        ((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    #[inline]
    fn set(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        if x {
            self.x[w] |= b;
        } else {
            self.x[w] &= !b;
        }
        if z {
            self.z[w] |= b;
        } else {
            self.z[w] &= !b;
        }
    }

    /// Multiply `self` by `other` (on the left); returns the power of `i`
    /// (mod 4) picked up by the product.
    fn mul_assign(&mut self, other: &Row) -> u32 {
        let mut plus = 0u32;
        let mut minus = 0u32;
        for k in 0..self.x.len() {
            let (x1, z1, x2, z2) = (other.x[k], other.z[k], self.x[k], self.z[k]);
            let p = (x1 & z1 & z2 & !x2) | (x1 & !z1 & z2 & x2) | (!x1 & z1 & x2 & !z2);
            let m = (x1 & z1 & x2 & !z2) | (x1 & !z1 & z2 & !x2) | (!x1 & z1 & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
            self.x[k] ^= x1;
            self.z[k] ^= z1;
        }
        (plus + 4 * 64 * self.x.len() as u32 - minus) % 4
    }
}

/// Stabilizer tableau over `n` qubits whose stabilizer signs are symbolic.
#[derive(Clone)]
pub struct FlowTracker {
    n: usize,
    destab: Vec<Row>,
    stab: Vec<Row>,
    sign: Vec<bool>,
    deps: Vec<VarSet>,
    num_records: u32,
    num_hidden: u32,
    relations: Vec<Option<Relation>>,
}

impl FlowTracker {
    /// All qubits start in `|0>`.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut destab = vec![Row::new(words); n];
        let mut stab = vec![Row::new(words); n];
        for q in 0..n {
            destab[q].set(q, true, false);
            stab[q].set(q, false, true);
        }
        FlowTracker {
            n,
            destab,
            stab,
            sign: vec![false; n],
            deps: vec![VarSet::default(); n],
            num_records: 0,
            num_hidden: 0,
            relations: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_records(&self) -> usize {
        self.num_records as usize
    }

    /// Per record: `Some(relation)` when the outcome was determined by
    /// earlier records, `None` when random.
    pub fn relations(&self) -> &[Option<Relation>] {
        &self.relations
    }

    fn for_each_row(&mut self, mut f: impl FnMut(&mut Row, Option<&mut bool>)) {
        for r in self.destab.iter_mut() {
            f(r, None);
        }
        for (r, s) in self.stab.iter_mut().zip(self.sign.iter_mut()) {
            f(r, Some(s));
        }
    }

    pub fn h(&mut self, q: usize) {
        self.for_each_row(|r, s| {
            let (x, z) = r.get(q);
            if let Some(s) = s {
                *s ^= x & z;
            }
            r.set(q, z, x);
        });
    }

    /// Swaps Y and Z; X picks up a minus sign.
    pub fn h_yz(&mut self, q: usize) {
        self.for_each_row(|r, s| {
            let (x, z) = r.get(q);
            if let Some(s) = s {
                *s ^= x & !z;
            }
            r.set(q, x ^ z, z);
        });
    }

    pub fn s(&mut self, q: usize) {
        self.for_each_row(|r, s| {
            let (x, z) = r.get(q);
            if let Some(s) = s {
                *s ^= x & z;
            }
            r.set(q, x, z ^ x);
        });
    }

    pub fn s_dag(&mut self, q: usize) {
        self.s(q);
        self.s(q);
        self.s(q);
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        self.for_each_row(|r, s| {
            let (xc, zc) = r.get(c);
            let (xt, zt) = r.get(t);
            if let Some(s) = s {
                *s ^= xc & zt & !(xt ^ zc);
            }
            r.set(t, xt ^ xc, zt);
            r.set(c, xc, zc ^ zt);
        });
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cx(a, b);
        self.h(b);
    }

    pub fn cy(&mut self, c: usize, t: usize) {
        self.s_dag(t);
        self.cx(c, t);
        self.s(t);
    }

    /// Rotate the given basis onto Z (self-inverse).
    fn to_z(&mut self, q: usize, basis: Pauli) {
        match basis {
            Pauli::Z => {}
            Pauli::X => self.h(q),
            Pauli::Y => self.h_yz(q),
        }
    }

    /// Product of the stabilizer rows selected by the destabilizers that
    /// anticommute with `Z_q`: equals `(-1)^sign * Z_q` with symbolic deps.
    fn z_value(&self, q: usize) -> (bool, VarSet) {
        let words = self.destab[0].x.len();
        let mut acc = Row::new(words);
        let mut phase = 0u32;
        let mut deps = VarSet::default();
        for i in 0..self.n {
            if self.destab[i].get(q).0 {
                phase += acc.mul_assign(&self.stab[i]) + 2 * self.sign[i] as u32;
                deps.xor_with(&self.deps[i]);
            }
        }
        debug_assert!(phase % 2 == 0);
        ((phase % 4) == 2, deps)
    }

    /// Symbolic Z measurement without recording. Returns `Err(pivot)` for a
    /// random outcome (tableau already updated, pivot row left for the caller
    /// to fill), or `Ok((const, deps))` for a determined one.
    fn measure_z_raw(&mut self, q: usize) -> Result<(bool, VarSet), usize> {
        let pivot = (0..self.n).find(|&i| self.stab[i].get(q).0);
        let Some(p) = pivot else {
            return Ok(self.z_value(q));
        };
        let pivot_row = self.stab[p].clone();
        let pivot_sign = self.sign[p];
        let pivot_deps = self.deps[p].clone();
        for i in 0..self.n {
            if i != p && self.stab[i].get(q).0 {
                let ph = self.stab[i].mul_assign(&pivot_row);
                self.sign[i] ^= pivot_sign ^ (ph == 2);
                let d = pivot_deps.clone();
                self.deps[i].xor_with(&d);
            }
            if self.destab[i].get(q).0 {
                self.destab[i].mul_assign(&pivot_row);
            }
        }
        self.destab[p] = pivot_row;
        let words = self.stab[p].x.len();
        let mut row = Row::new(words);
        row.set(q, false, true);
        self.stab[p] = row;
        self.sign[p] = false;
        self.deps[p] = VarSet::default();
        Err(p)
    }

    /// Measure a single-qubit Pauli, appending one record.
    pub fn measure(&mut self, q: usize, basis: Pauli) -> Option<Relation> {
        self.to_z(q, basis);
        let rec = self.num_records;
        self.num_records += 1;
        let rel = match self.measure_z_raw(q) {
            Err(p) => {
                self.deps[p] = VarSet::single(rec);
                None
            }
            Ok((c, deps)) => {
                if let Some(h) = deps.last_hidden() {
                    // Eliminate hidden variable h = rec + c + (deps - h).
                    let mut sub = deps.clone();
                    sub.toggle(rec);
                    for i in 0..self.n {
                        if self.deps[i].contains(h) {
                            self.deps[i].xor_with(&sub);
                            self.sign[i] ^= c;
                        }
                    }
                    None
                } else {
                    Some(Relation {
                        deps: deps.0,
                        constant: c,
                    })
                }
            }
        };
        self.to_z(q, basis);
        self.relations.push(rel.clone());
        rel
    }

    /// Reset to the +1 eigenstate of a single-qubit Pauli.
    pub fn reset(&mut self, q: usize, basis: Pauli) {
        self.to_z(q, basis);
        let (c, deps) = match self.measure_z_raw(q) {
            Err(p) => {
                let h = HIDDEN | self.num_hidden;
                self.num_hidden += 1;
                self.deps[p] = VarSet::single(h);
                (false, VarSet::single(h))
            }
            Ok(v) => v,
        };
        // Conditionally apply X_q: flips every stabilizer with a Z_q component.
        for i in 0..self.n {
            if self.stab[i].get(q).1 {
                self.sign[i] ^= c;
                self.deps[i].xor_with(&deps);
            }
        }
        self.to_z(q, basis);
    }

    /// Reset, then make every stabilizer that depends on the preparation carry
    /// variable `MARKER | id`. Relations then show which resets they rely on.
    pub fn reset_marked(&mut self, q: usize, basis: Pauli, id: u32) {
        self.reset(q, basis);
        self.to_z(q, basis);
        let marker = VarSet::single(MARKER | id);
        for i in 0..self.n {
            if self.stab[i].get(q).1 {
                self.deps[i].xor_with(&marker);
            }
        }
        self.to_z(q, basis);
    }

    /// If `p` is in the stabilizer group, its value as `(const, deps)`.
    pub fn value_of(&self, p: &PauliString) -> Option<(bool, VarSet)> {
        let words = self.destab[0].x.len();
        let mut target = Row::new(words);
        for (q, pp) in p.iter() {
            let (x, z) = pp.bits();
            target.set(q, x, z);
        }
        let anti = |r: &Row| -> bool {
            let mut par = 0u32;
            for k in 0..words {
                par += ((r.x[k] & target.z[k]) ^ (r.z[k] & target.x[k])).count_ones();
            }
            par % 2 == 1
        };
        if self.stab.iter().any(anti) {
            return None;
        }
        let mut acc = Row::new(words);
        let mut phase = 0u32;
        let mut deps = VarSet::default();
        for i in 0..self.n {
            if anti(&self.destab[i]) {
                phase += acc.mul_assign(&self.stab[i]) + 2 * self.sign[i] as u32;
                deps.xor_with(&self.deps[i]);
            }
        }
        if acc.x != target.x || acc.z != target.z {
            return None;
        }
        let negative = (phase % 4) == 2;
        Some((negative ^ p.is_negative(), deps))
    }
}

/// Reduce a parity of records with the relations found so far. Returns the
/// constant value if the parity is deterministic.
pub fn reduce_parity(relations: &[Option<Relation>], records: &[u32]) -> Option<bool> {
    let mut set = std::collections::BTreeSet::new();
    for &r in records {
        if !set.insert(r) {
            set.remove(&r);
        }
    }
    let mut constant = false;
    while let Some(&top) = set.iter().next_back() {
        let rel = relations.get(top as usize)?.as_ref()?;
        set.remove(&top);
        constant ^= rel.constant;
        for &d in &rel.deps {
            if !set.insert(d) {
                set.remove(&d);
            }
        }
    }
    Some(constant)
}
