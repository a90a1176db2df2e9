//! Single-qubit Paulis and sparse signed Pauli strings.

use std::collections::BTreeMap;
use std::fmt;

/// A non-identity single-qubit Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// `(x, z)` symplectic bits.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Option<Pauli> {
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != other
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Product `self * other` as `(i^phase, result)`.
    fn mul(self, other: Pauli) -> (u8, Option<Pauli>) {
        use Pauli::*;
        match (self, other) {
            (a, b) if a == b => (0, None),
            (X, Y) => (1, Some(Z)),
            (Y, Z) => (1, Some(X)),
            (Z, X) => (1, Some(Y)),
            (Y, X) => (3, Some(Z)),
            (Z, Y) => (3, Some(X)),
            (X, Z) => (3, Some(Y)),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Sparse Pauli string with a real sign. Identity factors are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: BTreeMap<usize, Pauli>,
    negative: bool,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        let mut s = Self::default();
        s.ops.insert(qubit, p);
        s
    }

    pub fn uniform<I: IntoIterator<Item = usize>>(qubits: I, p: Pauli) -> Self {
        Self {
            ops: qubits.into_iter().map(|q| (q, p)).collect(),
            negative: false,
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Pauli)>>(pairs: I) -> Self {
        let mut s = Self::default();
        for (q, p) in pairs {
            s.mul_single(q, p);
        }
        s
    }

    pub fn weight(&self) -> usize {
        self.ops.len()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        self.ops.get(&qubit).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.ops.iter().map(|(&q, &p)| (q, p))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.ops.keys().copied()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let (small, large) = if self.ops.len() <= other.ops.len() {
            (self, other)
        } else {
            (other, self)
        };
        let anti = small
            .ops
            .iter()
            .filter(|(q, p)| large.ops.get(q).is_some_and(|o| o.anticommutes(**p)))
            .count();
        anti % 2 == 0
    }

    /// Equality ignoring the sign.
    pub fn eq_up_to_sign(&self, other: &PauliString) -> bool {
        self.ops == other.ops
    }

    /// Right-multiply by a single-qubit Pauli, returning the accumulated
    /// power of `i` (mod 4) that the product picked up.
    fn mul_single(&mut self, qubit: usize, p: Pauli) -> u8 {
        match self.ops.get(&qubit).copied() {
            None => {
                self.ops.insert(qubit, p);
                0
            }
            Some(cur) => {
                let (phase, res) = cur.mul(p);
                match res {
                    None => {
                        self.ops.remove(&qubit);
                    }
                    Some(r) => {
                        self.ops.insert(qubit, r);
                    }
                }
                phase
            }
        }
    }

    /// `self * other`. Panics if the product is not Hermitian (the operands
    /// anticommute), since the result would carry an imaginary phase.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let (out, phase) = self.mul_with_phase(other);
        assert!(phase % 2 == 0, "product of anticommuting Pauli strings");
        out
    }

    /// `self * other`, dropping any imaginary phase. The sign of the result is
    /// meaningful only when the operands commute.
    pub fn mul_with_phase(&self, other: &PauliString) -> (PauliString, u8) {
        let mut out = self.clone();
        let mut phase = 0u8;
        for (q, p) in other.iter() {
            phase = (phase + out.mul_single(q, p)) % 4;
        }
        out.negative ^= other.negative;
        if phase >= 2 {
            out.negative ^= true;
        }
        (out, phase % 2)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        let mut first = true;
        for (q, p) in self.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{p}{q}")?;
        }
        if first {
            write!(f, "I")?;
        }
        Ok(())
    }
}
