//! Bit-packed Pauli-frame sampler.
//!
//! Shots are processed in batches of `BATCH` shots. Batch `b` draws its
//! randomness from ChaCha8 seeded with the user seed on stream `b`, so the
//! output depends only on (circuit, seed, shot count).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::error::Result;
use crate::pauli::Pauli;
use crate::sim::shots::ShotBlock;

pub const WORDS: usize = 16;
pub const BATCH: usize = 64 * WORDS;

type Lane = [u64; WORDS];

#[derive(Debug, Clone)]
enum Op {
    H(Vec<usize>),
    HYz(Vec<usize>),
    CX(Vec<(usize, usize)>),
    CY(Vec<(usize, usize)>),
    CZ(Vec<(usize, usize)>),
    Reset(Vec<usize>),
    Measure {
        basis: Pauli,
        qubits: Vec<usize>,
        p: f64,
    },
    Error {
        pauli: Pauli,
        qubits: Vec<usize>,
        p: f64,
    },
    Depolarize1 {
        qubits: Vec<usize>,
        p: f64,
    },
    Depolarize2 {
        pairs: Vec<(usize, usize)>,
        p: f64,
    },
}

/// A circuit compiled for repeated frame sampling.
#[derive(Debug, Clone)]
pub struct FrameSampler {
    num_qubits: usize,
    num_measurements: usize,
    ops: Vec<Op>,
    detectors: Vec<Vec<usize>>,
    observables: Vec<Vec<usize>>,
}

fn pairs(qs: &[usize]) -> Vec<(usize, usize)> {
    qs.chunks(2).map(|c| (c[0], c[1])).collect()
}

impl FrameSampler {
    /// Compile without checking determinism.
    pub fn compile(circuit: &Circuit) -> Self {
        let mut ops = Vec::new();
        for inst in circuit.instructions() {
            let qs: Vec<usize> = inst.qubits().collect();
            let p = inst.probability();
            let op = match inst.gate {
                Gate::H => Op::H(qs),
                Gate::HYz => Op::HYz(qs),
                Gate::CX => Op::CX(pairs(&qs)),
                Gate::CY => Op::CY(pairs(&qs)),
                Gate::CZ => Op::CZ(pairs(&qs)),
                Gate::R | Gate::RX | Gate::RY => Op::Reset(qs),
                Gate::M | Gate::MX | Gate::MY => Op::Measure {
                    basis: inst.gate.basis().expect("measure basis"),
                    qubits: qs,
                    p,
                },
                Gate::XError | Gate::YError | Gate::ZError => {
                    if p == 0.0 {
                        continue;
                    }
                    let pauli = match inst.gate {
                        Gate::XError => Pauli::X,
                        Gate::YError => Pauli::Y,
                        _ => Pauli::Z,
                    };
                    Op::Error {
                        pauli,
                        qubits: qs,
                        p,
                    }
                }
                Gate::Depolarize1 if p > 0.0 => Op::Depolarize1 { qubits: qs, p },
                Gate::Depolarize2 if p > 0.0 => Op::Depolarize2 {
                    pairs: pairs(&qs),
                    p,
                },
                _ => continue,
            };
            ops.push(op);
        }
        FrameSampler {
            num_qubits: circuit.num_qubits(),
            num_measurements: circuit.num_measurements(),
            ops,
            detectors: circuit.detector_records(),
            observables: circuit.observable_records(),
        }
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn num_observables(&self) -> usize {
        self.observables.len()
    }

    /// Sample `shots` shots; `workers` bounds the thread count (`None` uses
    /// the global pool). The result does not depend on `workers`.
    pub fn sample(&self, shots: usize, seed: u64, workers: Option<usize>) -> Result<ShotBlock> {
        let batches = shots.div_ceil(BATCH);
        let run = || -> Vec<ShotBlock> {
            (0..batches)
                .into_par_iter()
                .map(|b| {
                    let n = BATCH.min(shots - b * BATCH);
                    self.sample_batch(seed, b as u64, n)
                })
                .collect()
        };
        let parts = match workers {
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| crate::error::Error::InvalidArgument(e.to_string()))?
                .install(run),
            None => run(),
        };
        let mut out = ShotBlock::new(0, self.num_detectors(), self.num_observables());
        for part in &parts {
            out.extend(part)?;
        }
        Ok(out)
    }

    fn sample_batch(&self, seed: u64, batch: u64, n: usize) -> ShotBlock {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        let mut x = vec![[0u64; WORDS]; self.num_qubits];
        let mut z = vec![[0u64; WORDS]; self.num_qubits];
        let mut rec: Vec<Lane> = Vec::with_capacity(self.num_measurements);
        for op in &self.ops {
            match op {
                Op::H(qs) => {
                    for &q in qs {
                        std::mem::swap(&mut x[q], &mut z[q]);
                    }
                }
                Op::HYz(qs) => {
                    for &q in qs {
                        for w in 0..WORDS {
                            x[q][w] ^= z[q][w];
                        }
                    }
                }
                Op::CX(ps) => {
                    for &(c, t) in ps {
                        for w in 0..WORDS {
                            x[t][w] ^= x[c][w];
                            z[c][w] ^= z[t][w];
                        }
                    }
                }
                Op::CZ(ps) => {
                    for &(a, b) in ps {
                        for w in 0..WORDS {
                            z[a][w] ^= x[b][w];
                            z[b][w] ^= x[a][w];
                        }
                    }
                }
                Op::CY(ps) => {
                    for &(c, t) in ps {
                        for w in 0..WORDS {
                            z[c][w] ^= x[t][w] ^ z[t][w];
                            x[t][w] ^= x[c][w];
                            z[t][w] ^= x[c][w];
                        }
                    }
                }
                Op::Reset(qs) => {
                    for &q in qs {
                        x[q] = [0; WORDS];
                        z[q] = [0; WORDS];
                    }
                }
                Op::Measure { basis, qubits, p } => {
                    let start = rec.len();
                    for &q in qubits {
                        let mut lane = [0u64; WORDS];
                        for w in 0..WORDS {
                            lane[w] = match basis {
                                Pauli::Z => x[q][w],
                                Pauli::X => z[q][w],
                                Pauli::Y => x[q][w] ^ z[q][w],
                            };
                        }
                        rec.push(lane);
                    }
                    for_each_hit(&mut rng, *p, qubits.len(), |i, bit| {
                        rec[start + i][bit / 64] ^= 1 << (bit % 64);
                    });
                }
                Op::Error { pauli, qubits, p } => {
                    let (px, pz) = pauli.bits();
                    for_each_hit(&mut rng, *p, qubits.len(), |i, bit| {
                        let q = qubits[i];
                        let m = 1u64 << (bit % 64);
                        if px {
                            x[q][bit / 64] ^= m;
                        }
                        if pz {
                            z[q][bit / 64] ^= m;
                        }
                    });
                }
                Op::Depolarize1 { qubits, p } => {
                    let mut hits = Vec::new();
                    for_each_hit(&mut rng, *p, qubits.len(), |i, bit| hits.push((i, bit)));
                    for (i, bit) in hits {
                        let k: u8 = rng.gen_range(1..4);
                        flip(&mut x, &mut z, qubits[i], bit, k);
                    }
                }
                Op::Depolarize2 { pairs, p } => {
                    let mut hits = Vec::new();
                    for_each_hit(&mut rng, *p, pairs.len(), |i, bit| hits.push((i, bit)));
                    for (i, bit) in hits {
                        let k: u8 = rng.gen_range(1..16);
                        flip(&mut x, &mut z, pairs[i].0, bit, k & 3);
                        flip(&mut x, &mut z, pairs[i].1, bit, k >> 2);
                    }
                }
            }
        }
        let mut block = ShotBlock::new(n, self.num_detectors(), self.num_observables());
        let mut lane = [0u64; WORDS];
        let mut emit = |recs: &[usize], set: &mut dyn FnMut(usize)| {
            lane = [0; WORDS];
            for &r in recs {
                for w in 0..WORDS {
                    lane[w] ^= rec[r][w];
                }
            }
            for (w, &word) in lane.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let s = w * 64 + bits.trailing_zeros() as usize;
                    if s < n {
                        set(s);
                    }
                    bits &= bits - 1;
                }
            }
        };
        for (d, recs) in self.detectors.iter().enumerate() {
            emit(recs, &mut |s| block.set_detector(s, d, true));
        }
        for (k, recs) in self.observables.iter().enumerate() {
            emit(recs, &mut |s| block.set_observable(s, k, true));
        }
        block
    }
}

fn flip(x: &mut [Lane], z: &mut [Lane], q: usize, bit: usize, k: u8) {
    let m = 1u64 << (bit % 64);
    if k & 1 == 1 {
        x[q][bit / 64] ^= m;
    }
    if k & 2 == 2 {
        z[q][bit / 64] ^= m;
    }
}

/// Visit the Bernoulli(`p`) successes among `count * BATCH` trials as
/// (target index, shot bit) pairs, by geometric skipping.
fn for_each_hit<F: FnMut(usize, usize)>(rng: &mut ChaCha8Rng, p: f64, count: usize, mut f: F) {
    if p <= 0.0 || count == 0 {
        return;
    }
    let total = (count * BATCH) as u64;
    if p >= 1.0 {
        for i in 0..total {
            f(i as usize / BATCH, i as usize % BATCH);
        }
        return;
    }
    let geo = Geometric::new(p).expect("probability in (0, 1)");
    let mut pos = geo.sample(rng);
    while pos < total {
        f(pos as usize / BATCH, pos as usize % BATCH);
        pos = match pos.checked_add(1 + geo.sample(rng)) {
            Some(v) => v,
            None => break,
        };
    }
}
