//! Dense linear algebra over GF(2).

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let m = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_with(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

/// Solve `A x = b` where `A` is given as rows over `num_vars` columns.
/// Returns a particular solution and a basis of the null space.
pub fn solve(rows: &[BitVec], rhs: &[bool], num_vars: usize) -> Option<(BitVec, Vec<BitVec>)> {
    let mut a: Vec<(BitVec, bool)> = rows.iter().cloned().zip(rhs.iter().copied()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..num_vars {
        let Some(p) = (r..a.len()).find(|&i| a[i].0.get(col)) else {
            continue;
        };
        a.swap(r, p);
        let (pivot_row, pivot_rhs) = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row.0.get(col) {
                row.0.xor_with(&pivot_row);
                row.1 ^= pivot_rhs;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if a[r..].iter().any(|(_, b)| *b) {
        return None;
    }
    let mut x = BitVec::zeros(num_vars);
    for (i, &col) in pivots.iter().enumerate() {
        x.set(col, a[i].1);
    }
    let mut is_pivot = vec![false; num_vars];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut null = Vec::new();
    for free in (0..num_vars).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::zeros(num_vars);
        v.set(free, true);
        for (i, &col) in pivots.iter().enumerate() {
            if a[i].0.get(free) {
                v.set(col, true);
            }
        }
        null.push(v);
    }
    Some((x, null))
}

/// Minimum-weight element of the affine space `x + span(null)`; exhaustive for
/// small null spaces, greedy descent otherwise.
pub fn min_weight_coset(x: &BitVec, null: &[BitVec]) -> BitVec {
    if null.len() <= 16 {
        let mut best = x.clone();
        let mut best_w = best.count_ones();
        let mut cur = x.clone();
        // Gray-code walk over all 2^k combinations.
        for i in 1u64..(1u64 << null.len()) {
            let bit = i.trailing_zeros() as usize;
            cur.xor_with(&null[bit]);
            let w = cur.count_ones();
            if w < best_w {
                best_w = w;
                best = cur.clone();
            }
        }
        best
    } else {
        let mut cur = x.clone();
        loop {
            let w = cur.count_ones();
            let mut improved = false;
            for v in null {
                let mut t = cur.clone();
                t.xor_with(v);
                if t.count_ones() < w {
                    cur = t;
                    improved = true;
                    break;
                }
            }
            if !improved {
                return cur;
            }
        }
    }
}

/// Rank of a set of vectors.
pub fn rank(rows: &[BitVec]) -> usize {
    let mut a = rows.to_vec();
    let Some(n) = a.first().map(|r| r.len()) else {
        return 0;
    };
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..a.len()).find(|&i| a[i].get(col)) else {
            continue;
        };
        a.swap(r, p);
        let pr = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row.get(col) {
                row.xor_with(&pr);
            }
        }
        r += 1;
    }
    r
}
