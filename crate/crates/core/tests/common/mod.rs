//! Independent oracles shared by integration tests.
#![allow(dead_code)]

use floquet::dem::DecodingGraph;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// All-pairs shortest paths over (node, observable parity) for graphs with
/// one observable; the boundary is the last node.
pub struct Oracle {
    n: usize,
    /// dist[parity][i * n + j]
    dist: [Vec<f64>; 2],
}

impl Oracle {
    pub fn new(g: &DecodingGraph) -> Self {
        assert_eq!(g.num_observables, 1);
        let n = g.num_detectors + 1;
        let mut dist = [vec![f64::INFINITY; n * n], vec![f64::INFINITY; n * n]];
        for v in 0..n {
            dist[0][v * n + v] = 0.0;
        }
        for e in &g.edges {
            let a = e.a as usize;
            let b = e.b.map_or(n - 1, |b| b as usize);
            let m = e.observables as usize & 1;
            for (x, y) in [(a, b), (b, a)] {
                dist[m][x * n + y] = dist[m][x * n + y].min(e.weight);
            }
        }
        // Paths may not pass through the boundary node.
        for k in 0..n - 1 {
            for i in 0..n {
                for pa in 0..2 {
                    let dik = dist[pa][i * n + k];
                    if dik.is_infinite() {
                        continue;
                    }
                    for pb in 0..2 {
                        for j in 0..n {
                            let nd = dik + dist[pb][k * n + j];
                            let cell = &mut dist[pa ^ pb][i * n + j];
                            if nd < *cell {
                                *cell = nd;
                            }
                        }
                    }
                }
            }
        }
        Oracle { n, dist }
    }

    /// Minimum weight over all ways of pairing the defects with each other
    /// or the boundary, for each observable parity.
    pub fn best_by_mask(&self, defects: &[usize]) -> [f64; 2] {
        let k = defects.len();
        let b = self.n - 1;
        let mut table = vec![[f64::INFINITY; 2]; 1 << k];
        table[0] = [0.0, f64::INFINITY];
        for set in 1usize..1 << k {
            let i = set.trailing_zeros() as usize;
            let rest = set & !(1 << i);
            let di = defects[i];
            let mut best = [f64::INFINITY; 2];
            let mut relax = |sub: usize, to: usize| {
                for m in 0..2 {
                    for p in 0..2 {
                        let w = table[sub][m] + self.dist[p][di * self.n + to];
                        if w < best[m ^ p] {
                            best[m ^ p] = w;
                        }
                    }
                }
            };
            relax(rest, b);
            for j in i + 1..k {
                if rest >> j & 1 == 1 {
                    relax(rest & !(1 << j), defects[j]);
                }
            }
            table[set] = best;
        }
        table[(1 << k) - 1]
    }

    pub fn best(&self, defects: &[usize]) -> (f64, u64) {
        let [w0, w1] = self.best_by_mask(defects);
        if w1 < w0 {
            (w1, 1)
        } else {
            (w0, 0)
        }
    }
}

/// Chi-square homogeneity test of two samples of category counts. Categories
/// are merged from the end until every expected count is at least 5.
/// Returns the p-value, or `None` when fewer than two categories remain.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let mut cells: Vec<(u64, u64)> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x, y))
        .filter(|c| c.0 + c.1 > 0)
        .collect();
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let n = (na + nb) as f64;
    let expected_min = |c: &(u64, u64)| (c.0 + c.1) as f64 * na.min(nb) as f64 / n;
    while cells.len() > 1 {
        let Some(i) = cells.iter().rposition(|c| expected_min(c) < 5.0) else {
            break;
        };
        let c = cells.remove(i);
        let j = if i > 0 { i - 1 } else { 0 };
        cells[j].0 += c.0;
        cells[j].1 += c.1;
    }
    if cells.len() < 2 {
        return None;
    }
    let mut stat = 0.0;
    for &(x, y) in &cells {
        let t = (x + y) as f64;
        for (o, tot) in [(x, na), (y, nb)] {
            let e = t * tot as f64 / n;
            stat += (o as f64 - e).powi(2) / e;
        }
    }
    let dof = (cells.len() - 1) as f64;
    Some(1.0 - ChiSquared::new(dof).unwrap().cdf(stat))
}

/// Two-by-two homogeneity test of event counts `ka` of `na` against `kb`
/// of `nb`.
pub fn chi_square_rates(ka: u64, na: u64, kb: u64, nb: u64) -> Option<f64> {
    chi_square_homogeneity(&[ka, na - ka], &[kb, nb - kb])
}
