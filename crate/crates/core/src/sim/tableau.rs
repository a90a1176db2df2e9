//! Exact stabilizer-tableau simulation (destabilizer/stabilizer form).

use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::pauli::Pauli;

/// Tableau over `n` qubits: rows `0..n` destabilizers, `n..2n` stabilizers,
/// row `2n` scratch.
#[derive(Debug, Clone)]
pub struct TableauState {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
    record: Vec<bool>,
}

impl TableauState {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = TableauState {
            n,
            words,
            x: vec![0; rows * words],
            z: vec![0; rows * words],
            r: vec![false; rows],
            record: Vec::new(),
        };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn record(&self) -> &[bool] {
        &self.record
    }

    #[inline]
    fn xb(&self, row: usize, q: usize) -> bool {
        (self.x[row * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    fn zb(&self, row: usize, q: usize) -> bool {
        (self.z[row * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let i = row * self.words + q / 64;
        let m = 1u64 << (q % 64);
        if v {
            self.x[i] |= m
        } else {
            self.x[i] &= !m
        }
    }

    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let i = row * self.words + q / 64;
        let m = 1u64 << (q % 64);
        if v {
            self.z[i] |= m
        } else {
            self.z[i] &= !m
        }
    }

    pub fn h(&mut self, q: usize) {
        for row in 0..2 * self.n {
            let (x, z) = (self.xb(row, q), self.zb(row, q));
            self.r[row] ^= x & z;
            self.set_x(row, q, z);
            self.set_z(row, q, x);
        }
    }

    pub fn s(&mut self, q: usize) {
        for row in 0..2 * self.n {
            let (x, z) = (self.xb(row, q), self.zb(row, q));
            self.r[row] ^= x & z;
            self.set_z(row, q, z ^ x);
        }
    }

    pub fn s_dag(&mut self, q: usize) {
        self.s(q);
        self.s(q);
        self.s(q);
    }

    pub fn cx(&mut self, a: usize, b: usize) {
        for row in 0..2 * self.n {
            let (xa, za, xb, zb) = (
                self.xb(row, a),
                self.zb(row, a),
                self.xb(row, b),
                self.zb(row, b),
            );
            self.r[row] ^= xa & zb & !(xb ^ za);
            self.set_x(row, b, xb ^ xa);
            self.set_z(row, a, za ^ zb);
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cx(a, b);
        self.h(b);
    }

    pub fn cy(&mut self, a: usize, b: usize) {
        self.s_dag(b);
        self.cx(a, b);
        self.s(b);
    }

    /// The Clifford exchanging Y and Z (and negating X).
    pub fn h_yz(&mut self, q: usize) {
        self.s_dag(q);
        self.h(q);
        self.s(q);
    }

    /// Apply a Pauli error.
    pub fn pauli(&mut self, q: usize, p: Pauli) {
        let (px, pz) = p.bits();
        for row in 0..2 * self.n {
            // Rows anticommuting with the error flip sign.
            if (px & self.zb(row, q)) ^ (pz & self.xb(row, q)) {
                self.r[row] = !self.r[row];
            }
        }
    }

    /// Left-multiply row `h` by row `i`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut plus = 0u32;
        let mut minus = 0u32;
        for k in 0..self.words {
            let (x1, z1) = (self.x[i * self.words + k], self.z[i * self.words + k]);
            let (x2, z2) = (self.x[h * self.words + k], self.z[h * self.words + k]);
            plus +=
                ((x1 & z1 & z2 & !x2) | (x1 & !z1 & z2 & x2) | (!x1 & z1 & x2 & !z2)).count_ones();
            minus +=
                ((x1 & z1 & x2 & !z2) | (x1 & !z1 & z2 & !x2) | (!x1 & z1 & x2 & z2)).count_ones();
            self.x[h * self.words + k] ^= x1;
            self.z[h * self.words + k] ^= z1;
        }
        let total = 2 * self.r[h] as i64 + 2 * self.r[i] as i64 + plus as i64 - minus as i64;
        self.r[h] = total.rem_euclid(4) == 2;
    }

    fn copy_row(&mut self, from: usize, to: usize) {
        let w = self.words;
        self.x.copy_within(from * w..(from + 1) * w, to * w);
        self.z.copy_within(from * w..(from + 1) * w, to * w);
        self.r[to] = self.r[from];
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.x[row * w..(row + 1) * w].fill(0);
        self.z[row * w..(row + 1) * w].fill(0);
        self.r[row] = false;
    }

    /// Measure Z; random outcomes come from `rng`.
    pub fn measure_z<R: Rng>(&mut self, q: usize, rng: &mut R) -> bool {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&row| self.xb(row, q)) {
            for row in 0..2 * n {
                if row != p && self.xb(row, q) {
                    self.rowsum(row, p);
                }
            }
            self.copy_row(p, p - n);
            self.clear_row(p);
            self.set_z(p, q, true);
            let outcome = rng.gen::<bool>();
            self.r[p] = outcome;
            outcome
        } else {
            let scratch = 2 * n;
            self.clear_row(scratch);
            for row in 0..n {
                if self.xb(row, q) {
                    self.rowsum(scratch, row + n);
                }
            }
            self.r[scratch]
        }
    }

    fn to_z(&mut self, q: usize, basis: Pauli) {
        match basis {
            Pauli::Z => {}
            Pauli::X => self.h(q),
            Pauli::Y => self.h_yz(q),
        }
    }

    pub fn measure<R: Rng>(&mut self, q: usize, basis: Pauli, rng: &mut R) -> bool {
        self.to_z(q, basis);
        let m = self.measure_z(q, rng);
        self.to_z(q, basis);
        m
    }

    pub fn reset<R: Rng>(&mut self, q: usize, basis: Pauli, rng: &mut R) {
        self.to_z(q, basis);
        if self.measure_z(q, rng) {
            self.pauli(q, Pauli::X);
        }
        self.to_z(q, basis);
    }

    /// Execute a circuit, sampling measurement randomness and noise.
    pub fn run<R: Rng>(&mut self, circuit: &Circuit, rng: &mut R) {
        for inst in circuit.instructions() {
            let qs: Vec<usize> = inst.qubits().collect();
            let p = inst.probability();
            match inst.gate {
                Gate::H => qs.iter().for_each(|&q| self.h(q)),
                Gate::HYz => qs.iter().for_each(|&q| self.h_yz(q)),
                Gate::CX => qs.chunks(2).for_each(|c| self.cx(c[0], c[1])),
                Gate::CY => qs.chunks(2).for_each(|c| self.cy(c[0], c[1])),
                Gate::CZ => qs.chunks(2).for_each(|c| self.cz(c[0], c[1])),
                Gate::R | Gate::RX | Gate::RY => {
                    let b = inst.gate.basis().expect("reset basis");
                    qs.iter().for_each(|&q| self.reset(q, b, rng));
                }
                Gate::M | Gate::MX | Gate::MY => {
                    let b = inst.gate.basis().expect("measure basis");
                    for &q in &qs {
                        let m = self.measure(q, b, rng);
                        let flip = p > 0.0 && rng.gen::<f64>() < p;
                        self.record.push(m ^ flip);
                    }
                }
                Gate::XError | Gate::YError | Gate::ZError => {
                    let e = match inst.gate {
                        Gate::XError => Pauli::X,
                        Gate::YError => Pauli::Y,
                        _ => Pauli::Z,
                    };
                    for &q in &qs {
                        if rng.gen::<f64>() < p {
                            self.pauli(q, e);
                        }
                    }
                }
                Gate::Depolarize1 => {
                    for &q in &qs {
                        if rng.gen::<f64>() < p {
                            let k = rng.gen_range(1..4u8);
                            self.apply_bits(q, k);
                        }
                    }
                }
                Gate::Depolarize2 => {
                    for c in qs.chunks(2) {
                        if rng.gen::<f64>() < p {
                            let k = rng.gen_range(1..16u8);
                            self.apply_bits(c[0], k & 3);
                            self.apply_bits(c[1], k >> 2);
                        }
                    }
                }
                Gate::Tick | Gate::Detector | Gate::ObservableInclude | Gate::QubitCoords => {}
            }
        }
    }

    /// Pauli from two bits: bit 0 = X part, bit 1 = Z part.
    fn apply_bits(&mut self, q: usize, k: u8) {
        if let Some(p) = Pauli::from_bits(k & 1 == 1, k & 2 == 2) {
            self.pauli(q, p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bell_pair_correlations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut t = TableauState::new(2);
            t.h(0);
            t.cx(0, 1);
            let a = t.measure(0, Pauli::X, &mut rng);
            let b = t.measure(1, Pauli::X, &mut rng);
            assert_eq!(a, b);
            let mut t = TableauState::new(2);
            t.h(0);
            t.cx(0, 1);
            let a = t.measure(0, Pauli::Z, &mut rng);
            let b = t.measure(1, Pauli::Z, &mut rng);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn yy_parity_of_bell_state_is_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut t = TableauState::new(2);
            t.h(0);
            t.cx(0, 1);
            let a = t.measure(0, Pauli::Y, &mut rng);
            let b = t.measure(1, Pauli::Y, &mut rng);
            assert!(a ^ b);
        }
    }

    #[test]
    fn h_yz_exchanges_y_and_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = TableauState::new(1);
        t.h_yz(0);
        assert!(!t.measure(0, Pauli::Y, &mut rng));
        let mut t = TableauState::new(1);
        t.reset(0, Pauli::X, &mut rng);
        t.h_yz(0);
        assert!(t.measure(0, Pauli::X, &mut rng));
    }

    #[test]
    fn reset_in_each_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for b in [Pauli::X, Pauli::Y, Pauli::Z] {
            for _ in 0..10 {
                let mut t = TableauState::new(1);
                t.h(0);
                t.s(0);
                t.reset(0, b, &mut rng);
                assert!(!t.measure(0, b, &mut rng));
            }
        }
    }

    #[test]
    fn cy_kicks_y_onto_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut t = TableauState::new(2);
        t.pauli(0, Pauli::X);
        t.reset(1, Pauli::Y, &mut rng);
        t.cy(0, 1);
        // Control |1> applies Y to the +1 Y eigenstate: still +1.
        assert!(!t.measure(1, Pauli::Y, &mut rng));
        let mut t = TableauState::new(2);
        t.pauli(0, Pauli::X);
        t.cy(0, 1);
        assert!(t.measure(1, Pauli::Z, &mut rng));
    }
}
