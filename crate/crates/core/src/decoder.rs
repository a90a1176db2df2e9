//! Minimum-weight perfect matching decoder.
//!
//! Defects are matched on a complete graph whose weights are shortest-path
//! distances in the decoding graph. Each defect also gets a private boundary
//! copy; boundary copies match each other for free. Pairs that are cheaper
//! through the boundary are dropped, which splits the problem into
//! independent clusters.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::blossom::max_weight_matching;
use crate::dem::{build_decoding_graph, DecodingGraph, DetectorErrorModel};
use crate::error::{Error, Result};
use crate::sim::ShotBlock;

/// Set of fired detectors for one shot.
pub type Syndrome = [usize];

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: u32,
    weight: f64,
    mask: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-thread search buffers.
#[derive(Debug, Clone)]
pub struct Scratch {
    dist: Vec<f64>,
    mask: Vec<u64>,
    done: Vec<bool>,
    touched: Vec<u32>,
    defect: Vec<u32>,
    heap: BinaryHeap<Entry>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![f64::INFINITY; n],
            mask: vec![0; n],
            done: vec![false; n],
            touched: Vec::new(),
            defect: vec![u32::MAX; n],
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            let v = v as usize;
            self.dist[v] = f64::INFINITY;
            self.mask[v] = 0;
            self.done[v] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }
}

/// Outcome of decoding one syndrome.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub observables: u64,
    pub weight: f64,
    /// Matched pairs as defect indices; `None` is the boundary.
    pub pairs: Vec<(usize, Option<usize>)>,
}

#[derive(Debug, Clone)]
pub struct MatchingDecoder {
    num_detectors: usize,
    num_observables: usize,
    adj: Vec<Vec<Arc>>,
    boundary_dist: Vec<f64>,
    boundary_mask: Vec<u64>,
}

/// Weight scale for the integer matching.
const SCALE: f64 = (1u64 << 24) as f64;

impl MatchingDecoder {
    pub fn new(graph: &DecodingGraph) -> Result<Self> {
        if graph.num_observables > 64 {
            return Err(Error::InvalidArgument(format!(
                "{} observables; at most 64 supported",
                graph.num_observables
            )));
        }
        let n = graph.num_detectors;
        let mut adj = vec![Vec::new(); n];
        let mut to_boundary: Vec<Vec<Arc>> = vec![Vec::new(); n];
        for e in &graph.edges {
            let a = e.a as usize;
            if a >= n {
                return Err(Error::IndexOutOfRange { index: a, len: n });
            }
            match e.b {
                Some(b) => {
                    if b as usize >= n {
                        return Err(Error::IndexOutOfRange {
                            index: b as usize,
                            len: n,
                        });
                    }
                    adj[a].push(Arc {
                        to: b,
                        weight: e.weight,
                        mask: e.observables,
                    });
                    adj[b as usize].push(Arc {
                        to: e.a,
                        weight: e.weight,
                        mask: e.observables,
                    });
                }
                None => to_boundary[a].push(Arc {
                    to: e.a,
                    weight: e.weight,
                    mask: e.observables,
                }),
            }
        }
        let mut dec = MatchingDecoder {
            num_detectors: n,
            num_observables: graph.num_observables,
            adj,
            boundary_dist: vec![f64::INFINITY; n],
            boundary_mask: vec![0; n],
        };
        dec.boundary_distances(&to_boundary);
        Ok(dec)
    }

    pub fn from_dem(dem: &DetectorErrorModel) -> Result<Self> {
        Self::new(&build_decoding_graph(dem)?)
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn scratch(&self) -> Scratch {
        Scratch::new(self.num_detectors)
    }

    /// Multi-source Dijkstra from the boundary.
    fn boundary_distances(&mut self, to_boundary: &[Vec<Arc>]) {
        let mut heap = BinaryHeap::new();
        for (v, arcs) in to_boundary.iter().enumerate() {
            for a in arcs {
                if a.weight < self.boundary_dist[v] {
                    self.boundary_dist[v] = a.weight;
                    self.boundary_mask[v] = a.mask;
                }
            }
            if self.boundary_dist[v].is_finite() {
                heap.push(Entry {
                    dist: self.boundary_dist[v],
                    node: v as u32,
                });
            }
        }
        let mut done = vec![false; self.num_detectors];
        while let Some(Entry { dist, node }) = heap.pop() {
            let u = node as usize;
            if done[u] {
                continue;
            }
            done[u] = true;
            for a in &self.adj[u] {
                let v = a.to as usize;
                let nd = dist + a.weight;
                if nd < self.boundary_dist[v] {
                    self.boundary_dist[v] = nd;
                    self.boundary_mask[v] = self.boundary_mask[u] ^ a.mask;
                    heap.push(Entry {
                        dist: nd,
                        node: a.to,
                    });
                }
            }
        }
    }

    /// Distance and path mask from a detector to the boundary.
    pub fn boundary_path(&self, d: usize) -> Option<(f64, u64)> {
        let w = self.boundary_dist[d];
        w.is_finite().then_some((w, self.boundary_mask[d]))
    }

    /// Distances from `defects[i]` to the other defects, stopping once
    /// `bound` is exceeded. Returns `(j, dist, mask)` for reached `j`.
    fn search(
        &self,
        defects: &[usize],
        i: usize,
        bound: f64,
        s: &mut Scratch,
    ) -> Vec<(usize, f64, u64)> {
        s.reset();
        let src = defects[i];
        s.dist[src] = 0.0;
        s.touched.push(src as u32);
        s.heap.push(Entry {
            dist: 0.0,
            node: src as u32,
        });
        let mut out = Vec::new();
        while let Some(Entry { dist, node }) = s.heap.pop() {
            if dist > bound {
                break;
            }
            let u = node as usize;
            if s.done[u] {
                continue;
            }
            s.done[u] = true;
            let j = s.defect[u];
            if j != u32::MAX && j as usize != i {
                out.push((j as usize, dist, s.mask[u]));
            }
            for a in &self.adj[u] {
                let v = a.to as usize;
                let nd = dist + a.weight;
                if nd < s.dist[v] {
                    if s.dist[v].is_infinite() {
                        s.touched.push(a.to);
                    }
                    s.dist[v] = nd;
                    s.mask[v] = s.mask[u] ^ a.mask;
                    s.heap.push(Entry {
                        dist: nd,
                        node: a.to,
                    });
                }
            }
        }
        out
    }

    pub fn decode(&self, syndrome: &Syndrome) -> Result<u64> {
        Ok(self.decode_full(syndrome, &mut self.scratch())?.observables)
    }

    pub fn decode_with_weight(&self, syndrome: &Syndrome) -> Result<(u64, f64)> {
        let c = self.decode_full(syndrome, &mut self.scratch())?;
        Ok((c.observables, c.weight))
    }

    /// Decode one syndrome, reusing `scratch`.
    pub fn decode_full(&self, syndrome: &Syndrome, s: &mut Scratch) -> Result<Correction> {
        let mut defects = syndrome.to_vec();
        defects.sort_unstable();
        defects.dedup();
        if defects.len() != syndrome.len() {
            return Err(Error::InvalidArgument(
                "repeated detector in syndrome".into(),
            ));
        }
        if let Some(&d) = defects.iter().find(|&&d| d >= self.num_detectors) {
            return Err(Error::IndexOutOfRange {
                index: d,
                len: self.num_detectors,
            });
        }
        let k = defects.len();
        let mut out = Correction {
            observables: 0,
            weight: 0.0,
            pairs: Vec::new(),
        };
        if k == 0 {
            return Ok(out);
        }
        let bd: Vec<f64> = defects.iter().map(|&d| self.boundary_dist[d]).collect();
        let max_b = bd.iter().copied().fold(0.0, f64::max);
        for (i, &d) in defects.iter().enumerate() {
            s.defect[d] = i as u32;
        }
        // Pairs strictly cheaper than going through the boundary.
        let mut pairs: Vec<(usize, usize, f64, u64)> = Vec::new();
        for i in 0..k {
            for (j, w, m) in self.search(&defects, i, bd[i] + max_b, s) {
                if j > i && w < bd[i] + bd[j] {
                    pairs.push((i, j, w, m));
                }
            }
        }
        for &d in &defects {
            s.defect[d] = u32::MAX;
        }
        s.reset();

        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j, _, _) in &pairs {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; k];
        for i in 0..k {
            let r = find(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = clusters.len();
                clusters.push(Vec::new());
            }
            clusters[slot[r]].push(i);
        }
        let mut cluster_pairs: Vec<Vec<(usize, usize, f64, u64)>> =
            vec![Vec::new(); clusters.len()];
        for p in pairs {
            cluster_pairs[slot[find(&mut parent, p.0)]].push(p);
        }

        for (members, cp) in clusters.iter().zip(&cluster_pairs) {
            for (a, b) in self.match_cluster(members, cp, &bd)? {
                match b {
                    Some(b) => {
                        let &(_, _, w, m) = cp
                            .iter()
                            .find(|p| (p.0, p.1) == (a.min(b), a.max(b)))
                            .expect("matched pair");
                        out.weight += w;
                        out.observables ^= m;
                    }
                    None => {
                        out.weight += bd[a];
                        out.observables ^= self.boundary_mask[defects[a]];
                    }
                }
                out.pairs.push((a, b));
            }
        }
        out.pairs.sort_unstable();
        Ok(out)
    }

    fn match_cluster(
        &self,
        members: &[usize],
        pairs: &[(usize, usize, f64, u64)],
        bd: &[f64],
    ) -> Result<Vec<(usize, Option<usize>)>> {
        let c = members.len();
        if c == 1 {
            return if bd[members[0]].is_finite() {
                Ok(vec![(members[0], None)])
            } else {
                Err(Error::OddSyndrome)
            };
        }
        let local = |g: usize| members.binary_search(&g).expect("cluster member");
        let max_w = pairs
            .iter()
            .map(|p| p.2)
            .chain(members.iter().map(|&m| bd[m]).filter(|w| w.is_finite()))
            .fold(0.0, f64::max);
        let scale = SCALE.min(1e15 / (max_w + 1.0) / c as f64);
        let int = |w: f64| (w * scale).round() as i64;
        let big = int(max_w) + 1;
        // Vertices: members 0..c, boundary copies c..2c.
        let mut edges: Vec<(usize, usize, i64)> = Vec::new();
        for &(i, j, w, _) in pairs {
            edges.push((local(i), local(j), 2 * (big - int(w))));
        }
        for (li, &g) in members.iter().enumerate() {
            if bd[g].is_finite() {
                edges.push((li, c + li, 2 * (big - int(bd[g]))));
            }
        }
        let with_copy: Vec<usize> = (0..c).filter(|&li| bd[members[li]].is_finite()).collect();
        for (x, &a) in with_copy.iter().enumerate() {
            for &b in &with_copy[x + 1..] {
                edges.push((c + a, c + b, 2 * big));
            }
        }
        let mate = max_weight_matching(2 * c, &edges, true);
        let mut out = Vec::with_capacity(c);
        for li in 0..c {
            match mate[li] {
                None => return Err(Error::OddSyndrome),
                Some(m) if m < c => {
                    if li < m {
                        out.push((members[li], Some(members[m])));
                    }
                }
                Some(_) => out.push((members[li], None)),
            }
        }
        Ok(out)
    }

    /// Decode every shot; the result has no detector columns and one
    /// observable column per observable. `workers` bounds the thread count.
    pub fn decode_batch(&self, shots: &ShotBlock, workers: Option<usize>) -> Result<ShotBlock> {
        if shots.num_detectors() != self.num_detectors {
            return Err(Error::InvalidArgument(format!(
                "shots have {} detectors, graph has {}",
                shots.num_detectors(),
                self.num_detectors
            )));
        }
        let run = || -> Result<Vec<u64>> {
            (0..shots.shots())
                .into_par_iter()
                .map_init(
                    || self.scratch(),
                    |s, i| self.decode_full(&shots.fired(i), s).map(|c| c.observables),
                )
                .collect()
        };
        let masks = match workers {
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?
                .install(run)?,
            None => run()?,
        };
        let mut out = ShotBlock::new(shots.shots(), 0, self.num_observables);
        for (i, m) in masks.into_iter().enumerate() {
            for k in 0..self.num_observables {
                out.set_observable(i, k, m >> k & 1 == 1);
            }
        }
        Ok(out)
    }

    /// Number of shots whose prediction differs from the sampled flips.
    pub fn count_logical_errors(&self, shots: &ShotBlock, workers: Option<usize>) -> Result<usize> {
        let pred = self.decode_batch(shots, workers)?;
        Ok((0..shots.shots())
            .filter(|&i| pred.observable_mask(i) != shots.observable_mask(i))
            .count())
    }
}

/// Decode a syndrome on `graph`.
pub fn decode(graph: &DecodingGraph, syndrome: &Syndrome) -> Result<u64> {
    MatchingDecoder::new(graph)?.decode(syndrome)
}

/// Decode every shot of `shots` on `graph`.
pub fn decode_batch(graph: &DecodingGraph, shots: &ShotBlock) -> Result<ShotBlock> {
    MatchingDecoder::new(graph)?.decode_batch(shots, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::Edge;

    fn edge(a: u32, b: Option<u32>, w: f64, obs: u64) -> Edge {
        Edge {
            a,
            b,
            probability: 0.0,
            weight: w,
            observables: obs,
        }
    }

    fn repetition(n: u32) -> DecodingGraph {
        // Boundary - 0 - 1 - ... - (n-1) - boundary; observable on the left end.
        let mut edges = vec![edge(0, None, 1.0, 1)];
        for i in 0..n - 1 {
            edges.push(edge(i, Some(i + 1), 1.0, 0));
        }
        edges.push(edge(n - 1, None, 1.0, 0));
        DecodingGraph {
            num_detectors: n as usize,
            num_observables: 1,
            edges,
        }
    }

    #[test]
    fn empty_syndrome() {
        let d = MatchingDecoder::new(&repetition(5)).unwrap();
        assert_eq!(d.decode_with_weight(&[]).unwrap(), (0, 0.0));
    }

    #[test]
    fn repetition_code_corrections() {
        let d = MatchingDecoder::new(&repetition(7)).unwrap();
        assert_eq!(d.decode_with_weight(&[0]).unwrap(), (1, 1.0));
        assert_eq!(d.decode_with_weight(&[6]).unwrap(), (0, 1.0));
        assert_eq!(d.decode_with_weight(&[2, 3]).unwrap(), (0, 1.0));
        assert_eq!(d.decode_with_weight(&[1, 5]).unwrap(), (1, 4.0));
        assert_eq!(d.decode_with_weight(&[0, 6]).unwrap(), (1, 2.0));
    }

    #[test]
    fn odd_syndrome_without_boundary() {
        let g = DecodingGraph {
            num_detectors: 3,
            num_observables: 1,
            edges: vec![
                edge(0, Some(1), 1.0, 0),
                edge(1, Some(2), 1.0, 1),
                edge(2, Some(0), 1.0, 0),
            ],
        };
        let d = MatchingDecoder::new(&g).unwrap();
        assert!(matches!(d.decode(&[0]), Err(Error::OddSyndrome)));
        assert_eq!(d.decode_with_weight(&[1, 2]).unwrap(), (1, 1.0));
        assert_eq!(d.decode_with_weight(&[0, 2]).unwrap(), (0, 1.0));
    }

    #[test]
    fn cheaper_parallel_edge_wins() {
        let g = DecodingGraph {
            num_detectors: 2,
            num_observables: 1,
            edges: vec![edge(0, Some(1), 2.0, 0), edge(0, Some(1), 1.5, 1)],
        };
        assert_eq!(decode(&g, &[0, 1]).unwrap(), 1);
    }

    #[test]
    fn rejects_bad_syndromes() {
        let d = MatchingDecoder::new(&repetition(3)).unwrap();
        assert!(d.decode(&[5]).is_err());
        assert!(d.decode(&[1, 1]).is_err());
    }

    #[test]
    fn batch_matches_single_decodes() {
        let d = MatchingDecoder::new(&repetition(9)).unwrap();
        let mut shots = ShotBlock::new(4, 9, 1);
        for (s, fired) in [vec![], vec![0], vec![3, 4], vec![0, 8]].iter().enumerate() {
            for &f in fired {
                shots.set_detector(s, f, true);
            }
        }
        let pred = d.decode_batch(&shots, Some(2)).unwrap();
        for s in 0..4 {
            assert_eq!(pred.observable_mask(s), d.decode(&shots.fired(s)).unwrap());
        }
        assert_eq!(d.count_logical_errors(&shots, None).unwrap(), 2);
    }
}
