//! Periodic honeycomb lattice with 3-colored bonds and plaquettes.
//!
//! The honeycomb is embedded as a brick wall on an `L1 x L2` grid of qubits.
//! In the default orientation every column of qubits is a chain of vertical
//! bonds and horizontal rungs join `(x, y)` to `(x + 1, y)` whenever `x + y`
//! is even. Each brick is a hexagonal plaquette spanning two columns and three
//! rows. The torus identifies `(x, y) ~ (x + L1, y + s)` and
//! `(x, y) ~ (x + t, y + L2)`, where at most one of the twists `s`, `t` is
//! non-zero; the first twist (in a fixed search order) that yields a
//! consistent coloring is used.
//!
//! Colors follow the gauge type: red bonds carry `XX`, green `YY`, blue `ZZ`,
//! and a plaquette of color `c` carries the weight-6 stabilizer of the same
//! Pauli type. A bond of color `c` joins two plaquettes of color `c` and
//! borders one plaquette of each other color.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Color {
        Self::ALL[i % 3]
    }

    /// Pauli type of gauge operators (bonds) and stabilizers (plaquettes) of
    /// this color.
    pub fn pauli(self) -> Pauli {
        match self {
            Color::Red => Pauli::X,
            Color::Green => Pauli::Y,
            Color::Blue => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Green => 'G',
            Color::Blue => 'B',
        }
    }

    fn third(a: Color, b: Color) -> Color {
        Color::from_index(3 - a.index() - b.index())
    }
}

/// Which grid axis the bond chains run along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Columns are chains; rungs are horizontal.
    #[default]
    VerticalChains,
    /// Rows are chains; rungs are vertical.
    HorizontalChains,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    pub color: Color,
    pub qubits: [usize; 2],
    /// Number of times (mod 2) the bond crosses the seam of the horizontal
    /// and vertical period, going from `qubits[0]` to `qubits[1]`.
    pub wrap: [u8; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plaquette {
    pub color: Color,
    /// Boundary qubits in cyclic order.
    pub qubits: [usize; 6],
    /// Boundary bonds; `bonds[i]` joins `qubits[i]` and `qubits[(i + 1) % 6]`.
    pub bonds: [usize; 6],
    /// Per boundary qubit, the period crossings (mod 2) between the
    /// plaquette's own frame and the qubit's canonical position.
    pub wraps: [[u8; 2]; 6],
    /// Center in grid coordinates (may lie outside the fundamental domain).
    pub center: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct TorusLattice {
    l1: usize,
    l2: usize,
    orientation: Orientation,
    twist: (usize, usize),
    coords: Vec<(usize, usize)>,
    bonds: Vec<Bond>,
    plaquettes: Vec<Plaquette>,
    /// Per qubit, its bond of each color.
    qubit_bonds: Vec<[usize; 3]>,
    /// Per qubit, its plaquette of each color.
    qubit_plaquettes: Vec<[usize; 3]>,
}

/// Build the `L1 x L2` torus with the default orientation.
pub fn build_lattice(l1: usize, l2: usize) -> Result<TorusLattice> {
    TorusLattice::new(l1, l2, Orientation::default())
}

struct Grid {
    /// Extent along the rung axis.
    a_len: i64,
    /// Extent along the chain axis.
    b_len: i64,
    /// Shift along the chain axis when wrapping the rung axis.
    s: i64,
    /// Shift along the rung axis when wrapping the chain axis.
    t: i64,
}

impl Grid {
    /// Reduce covering-space coordinates into the fundamental domain, also
    /// returning how many times each period was subtracted.
    fn reduce(&self, a: i64, b: i64) -> ((i64, i64), (i64, i64)) {
        if self.s == 0 {
            let kb = b.div_euclid(self.b_len);
            let b1 = b - kb * self.b_len;
            let a1 = a - kb * self.t;
            let ka = a1.div_euclid(self.a_len);
            ((a1 - ka * self.a_len, b1), (ka, kb))
        } else {
            let ka = a.div_euclid(self.a_len);
            let a1 = a - ka * self.a_len;
            let b1 = b - ka * self.s;
            let kb = b1.div_euclid(self.b_len);
            ((a1, b1 - kb * self.b_len), (ka, kb))
        }
    }

    /// Base face color on the infinite lattice for the face anchored at `(a, b0)`.
    fn face_color(a: i64, b0: i64) -> Color {
        Color::from_index(((b0 - 3 * a).div_euclid(2)).rem_euclid(3) as usize)
    }
}

impl TorusLattice {
    pub fn new(l1: usize, l2: usize, orientation: Orientation) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidDimensions {
            l1,
            l2,
            reason: reason.to_string(),
        };
        if l1 < 2 || l2 < 2 {
            return Err(invalid("both extents must be at least 2"));
        }
        let (a_len, b_len) = match orientation {
            Orientation::VerticalChains => (l1, l2),
            Orientation::HorizontalChains => (l2, l1),
        };
        let mut candidates = vec![(0, 0)];
        candidates.extend((1..a_len).map(|t| (0, t)));
        candidates.extend((1..b_len).map(|s| (s, 0)));
        let mut last_reason = String::from("no twist admits a consistent coloring");
        for (s, t) in candidates {
            match Self::try_build(l1, l2, orientation, s, t) {
                Ok(lat) => return Ok(lat),
                Err(reason) => last_reason = reason,
            }
        }
        Err(invalid(&last_reason))
    }

    fn try_build(
        l1: usize,
        l2: usize,
        orientation: Orientation,
        s: usize,
        t: usize,
    ) -> std::result::Result<Self, String> {
        let (a_len, b_len) = match orientation {
            Orientation::VerticalChains => (l1, l2),
            Orientation::HorizontalChains => (l2, l1),
        };
        let grid = Grid {
            a_len: a_len as i64,
            b_len: b_len as i64,
            s: s as i64,
            t: t as i64,
        };
        if (grid.a_len + grid.s) % 2 != 0 || (grid.t + grid.b_len) % 2 != 0 {
            return Err("rung pattern is not periodic".into());
        }
        let n = l1 * l2;
        let to_xy = |a: i64, b: i64| -> (usize, usize) {
            match orientation {
                Orientation::VerticalChains => (a as usize, b as usize),
                Orientation::HorizontalChains => (b as usize, a as usize),
            }
        };
        let qubit_of = |a: i64, b: i64| -> usize {
            let (x, y) = to_xy(a, b);
            y * l1 + x
        };
        // Period crossings expressed as (horizontal, vertical) for reporting.
        let wrap_of = |(ka, kb): (i64, i64)| -> [u8; 2] {
            let (ka, kb) = ((ka.rem_euclid(2)) as u8, (kb.rem_euclid(2)) as u8);
            match orientation {
                Orientation::VerticalChains => [ka, kb],
                Orientation::HorizontalChains => [kb, ka],
            }
        };

        let mut coords = vec![(0, 0); n];
        for a in 0..grid.a_len {
            for b in 0..grid.b_len {
                coords[qubit_of(a, b)] = to_xy(a, b);
            }
        }

        // Faces anchored at each canonical (a, b0) with a + b0 even.
        struct RawFace {
            color: Color,
            qubits: [usize; 6],
            wraps: [[u8; 2]; 6],
            center: (f64, f64),
            /// Per boundary edge: endpoints and wrap from first to second.
            edges: [(usize, usize, [u8; 2]); 6],
        }
        let mut faces = Vec::new();
        for a in 0..grid.a_len {
            for b0 in 0..grid.b_len {
                if (a + b0) % 2 != 0 {
                    continue;
                }
                let ring = [
                    (a, b0),
                    (a, b0 + 1),
                    (a, b0 + 2),
                    (a + 1, b0 + 2),
                    (a + 1, b0 + 1),
                    (a + 1, b0),
                ];
                let mut qubits = [0usize; 6];
                let mut shifts = [(0i64, 0i64); 6];
                for (i, &(ra, rb)) in ring.iter().enumerate() {
                    let ((ca, cb), k) = grid.reduce(ra, rb);
                    qubits[i] = qubit_of(ca, cb);
                    shifts[i] = k;
                }
                let mut sorted = qubits;
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err("plaquette wraps onto itself".into());
                }
                let mut edges = [(0, 0, [0u8; 2]); 6];
                for i in 0..6 {
                    let j = (i + 1) % 6;
                    let d = (shifts[j].0 - shifts[i].0, shifts[j].1 - shifts[i].1);
                    edges[i] = (qubits[i], qubits[j], wrap_of(d));
                }
                let center = match orientation {
                    Orientation::VerticalChains => (a as f64 + 0.5, b0 as f64 + 1.0),
                    Orientation::HorizontalChains => (b0 as f64 + 1.0, a as f64 + 0.5),
                };
                faces.push(RawFace {
                    color: Grid::face_color(a, b0),
                    qubits,
                    wraps: shifts.map(wrap_of),
                    edges,
                    center,
                });
            }
        }

        // Bonds: chain bond upward from every vertex, rung rightward from
        // vertices with even coordinate sum.
        let mut raw_bonds: Vec<(usize, usize, [u8; 2])> = Vec::new();
        for a in 0..grid.a_len {
            for b in 0..grid.b_len {
                let q = qubit_of(a, b);
                let ((ca, cb), k) = grid.reduce(a, b + 1);
                raw_bonds.push((q, qubit_of(ca, cb), wrap_of(k)));
                if (a + b) % 2 == 0 {
                    let ((ca, cb), k) = grid.reduce(a + 1, b);
                    if (ca + cb) % 2 == 0 {
                        return Err("rung parity broken by twist".into());
                    }
                    raw_bonds.push((q, qubit_of(ca, cb), wrap_of(k)));
                }
            }
        }
        if raw_bonds.iter().any(|&(p, q, _)| p == q) {
            return Err("bond joins a qubit to itself".into());
        }

        // Match face edges to bonds via (endpoints, wrap) keys.
        let key = |p: usize, q: usize, w: [u8; 2]| -> (usize, usize, [u8; 2]) {
            if p <= q {
                (p, q, w)
            } else {
                (q, p, w)
            }
        };
        let mut bond_lookup: HashMap<(usize, usize, [u8; 2]), usize> = HashMap::new();
        for (i, &(p, q, w)) in raw_bonds.iter().enumerate() {
            if bond_lookup.insert(key(p, q, w), i).is_some() {
                return Err("duplicate bond".into());
            }
        }
        let mut bond_faces: Vec<Vec<usize>> = vec![Vec::new(); raw_bonds.len()];
        let mut face_bonds: Vec<[usize; 6]> = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            let mut fb = [0usize; 6];
            for (i, &(p, q, w)) in f.edges.iter().enumerate() {
                let bi = *bond_lookup
                    .get(&key(p, q, w))
                    .ok_or_else(|| "face edge without bond".to_string())?;
                fb[i] = bi;
                bond_faces[bi].push(fi);
            }
            face_bonds.push(fb);
        }

        let mut bond_colors = Vec::with_capacity(raw_bonds.len());
        for adj in &bond_faces {
            if adj.len() != 2 {
                return Err("bond does not lie on exactly two plaquettes".into());
            }
            let (c0, c1) = (faces[adj[0]].color, faces[adj[1]].color);
            if c0 == c1 {
                return Err("adjacent plaquettes share a color".into());
            }
            bond_colors.push(Color::third(c0, c1));
        }

        let mut qubit_bonds = vec![[usize::MAX; 3]; n];
        for (bi, &(p, q, _)) in raw_bonds.iter().enumerate() {
            let c = bond_colors[bi].index();
            for v in [p, q] {
                if qubit_bonds[v][c] != usize::MAX {
                    return Err("qubit touches two bonds of one color".into());
                }
                qubit_bonds[v][c] = bi;
            }
        }
        if qubit_bonds.iter().any(|b| b.contains(&usize::MAX)) {
            return Err("qubit is missing a bond color".into());
        }
        let mut qubit_plaquettes = vec![[usize::MAX; 3]; n];
        for (fi, f) in faces.iter().enumerate() {
            for &q in &f.qubits {
                let slot = &mut qubit_plaquettes[q][f.color.index()];
                if *slot != usize::MAX {
                    return Err("qubit touches two plaquettes of one color".into());
                }
                *slot = fi;
            }
            for &bi in &face_bonds[fi] {
                if bond_colors[bi] == f.color {
                    return Err("plaquette bounded by a bond of its own color".into());
                }
            }
        }

        // Canonical ordering: bonds and plaquettes sorted by their sorted
        // qubit lists (then color).
        let mut bond_order: Vec<usize> = (0..raw_bonds.len()).collect();
        let bond_key = |i: usize| {
            let (p, q, w) = raw_bonds[i];
            (p.min(q), p.max(q), bond_colors[i], w)
        };
        bond_order.sort_by_key(|&i| bond_key(i));
        let mut bond_rank = vec![0; raw_bonds.len()];
        for (rank, &i) in bond_order.iter().enumerate() {
            bond_rank[i] = rank;
        }
        let bonds: Vec<Bond> = bond_order
            .iter()
            .map(|&i| {
                let (p, q, w) = raw_bonds[i];
                let qubits = if p <= q { [p, q] } else { [q, p] };
                Bond {
                    color: bond_colors[i],
                    qubits,
                    wrap: w,
                }
            })
            .collect();

        let mut face_order: Vec<usize> = (0..faces.len()).collect();
        let face_key = |i: usize| {
            let mut s = faces[i].qubits;
            s.sort_unstable();
            (s, faces[i].color)
        };
        face_order.sort_by_key(|&i| face_key(i));
        let mut face_rank = vec![0; faces.len()];
        for (rank, &i) in face_order.iter().enumerate() {
            face_rank[i] = rank;
        }
        let plaquettes: Vec<Plaquette> = face_order
            .iter()
            .map(|&i| {
                let mut b = face_bonds[i];
                for x in b.iter_mut() {
                    *x = bond_rank[*x];
                }
                Plaquette {
                    color: faces[i].color,
                    qubits: faces[i].qubits,
                    bonds: b,
                    wraps: faces[i].wraps,
                    center: faces[i].center,
                }
            })
            .collect();
        for qb in qubit_bonds.iter_mut() {
            for x in qb.iter_mut() {
                *x = bond_rank[*x];
            }
        }
        for qp in qubit_plaquettes.iter_mut() {
            for x in qp.iter_mut() {
                *x = face_rank[*x];
            }
        }

        Ok(TorusLattice {
            l1,
            l2,
            orientation,
            twist: (s, t),
            coords,
            bonds,
            plaquettes,
            qubit_bonds,
            qubit_plaquettes,
        })
    }

    pub fn l1(&self) -> usize {
        self.l1
    }

    pub fn l2(&self) -> usize {
        self.l2
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// `(s, t)`: shift along the chain axis when wrapping the rung axis, and
    /// shift along the rung axis when wrapping the chain axis.
    pub fn twist(&self) -> (usize, usize) {
        self.twist
    }

    pub fn num_qubits(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self, qubit: usize) -> (usize, usize) {
        self.coords[qubit]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn bonds_of_color(&self, color: Color) -> impl Iterator<Item = usize> + '_ {
        self.bonds
            .iter()
            .enumerate()
            .filter(move |(_, b)| b.color == color)
            .map(|(i, _)| i)
    }

    pub fn plaquettes_of_color(&self, color: Color) -> impl Iterator<Item = usize> + '_ {
        self.plaquettes
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.color == color)
            .map(|(i, _)| i)
    }

    /// The bond of the given color incident to `qubit`.
    pub fn bond_at(&self, qubit: usize, color: Color) -> usize {
        self.qubit_bonds[qubit][color.index()]
    }

    /// The plaquette of the given color containing `qubit`.
    pub fn plaquette_at(&self, qubit: usize, color: Color) -> usize {
        self.qubit_plaquettes[qubit][color.index()]
    }

    /// Honeycomb sublattice (0 or 1) of a qubit. Every bond joins one qubit
    /// of each sublattice.
    pub fn sublattice(&self, qubit: usize) -> usize {
        let (x, y) = self.coords[qubit];
        (x + y) % 2
    }

    pub fn gauge_operator(&self, bond: usize) -> Result<PauliString> {
        let b = self.bonds.get(bond).ok_or(Error::IndexOutOfRange {
            index: bond,
            len: self.bonds.len(),
        })?;
        Ok(PauliString::uniform(b.qubits, b.color.pauli()))
    }

    /// Weight-6 stabilizer of a plaquette, with `+1` sign.
    pub fn stabilizer_support(&self, plaquette: usize) -> Result<PauliString> {
        let p = self
            .plaquettes
            .get(plaquette)
            .ok_or(Error::IndexOutOfRange {
                index: plaquette,
                len: self.plaquettes.len(),
            })?;
        Ok(PauliString::uniform(p.qubits, p.color.pauli()))
    }

    /// Debug dump: `QUBIT i x y`, `BOND i c q1 q2`, `PLAQ i c q1..q6`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, (x, y)) in self.coords.iter().enumerate() {
            let _ = writeln!(out, "QUBIT {i} {x} {y}");
        }
        for (i, b) in self.bonds.iter().enumerate() {
            let _ = writeln!(
                out,
                "BOND {i} {} {} {}",
                b.color.letter(),
                b.qubits[0],
                b.qubits[1]
            );
        }
        for (i, p) in self.plaquettes.iter().enumerate() {
            let _ = write!(out, "PLAQ {i} {}", p.color.letter());
            for q in p.qubits {
                let _ = write!(out, " {q}");
            }
            out.push('\n');
        }
        out
    }
}
