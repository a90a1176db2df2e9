//! Sampling detection events and observable flips.

pub mod frame;
pub mod shots;
pub mod tableau;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::flow::FlowTracker;

pub use frame::FrameSampler;
pub use shots::ShotBlock;
pub use tableau::TableauState;

/// Result of the symbolic determinism check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeterminismReport {
    /// Detectors whose parity is not fixed by the circuit.
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
    /// Noiseless parity of each detector (meaningful for deterministic ones).
    pub detector_values: Vec<bool>,
    pub observable_values: Vec<bool>,
}

impl DeterminismReport {
    pub fn is_ok(&self) -> bool {
        self.detectors.is_empty() && self.observables.is_empty()
    }
}

/// Propagate the stabilizer flow of the noiseless circuit and check that
/// every detector and observable parity is fixed.
pub fn verify_determinism(circuit: &Circuit) -> DeterminismReport {
    let mut tracker = FlowTracker::new(circuit.num_qubits());
    // Per record: value as a parity of random records, plus a constant.
    let mut canon: Vec<(Vec<u32>, bool)> = Vec::with_capacity(circuit.num_measurements());
    for inst in circuit.instructions() {
        let qs: Vec<usize> = inst.qubits().collect();
        match inst.gate {
            Gate::H => qs.iter().for_each(|&q| tracker.h(q)),
            Gate::HYz => qs.iter().for_each(|&q| tracker.h_yz(q)),
            Gate::CX => qs.chunks(2).for_each(|c| tracker.cx(c[0], c[1])),
            Gate::CY => qs.chunks(2).for_each(|c| tracker.cy(c[0], c[1])),
            Gate::CZ => qs.chunks(2).for_each(|c| tracker.cz(c[0], c[1])),
            g if g.is_reset() => {
                let b = g.basis().expect("reset basis");
                qs.iter().for_each(|&q| tracker.reset(q, b));
            }
            g if g.is_measurement() => {
                let b = g.basis().expect("measure basis");
                for &q in &qs {
                    let rec = tracker.num_records() as u32;
                    canon.push(match tracker.measure(q, b) {
                        Some(rel) => (rel.deps, rel.constant),
                        None => (vec![rec], false),
                    });
                }
            }
            _ => {}
        }
    }
    let parity = |recs: &[usize]| -> (bool, bool) {
        let mut vars: Vec<u32> = Vec::new();
        let mut c = false;
        for &r in recs {
            let (deps, k) = &canon[r];
            vars.extend_from_slice(deps);
            c ^= k;
        }
        vars.sort_unstable();
        let mut odd = false;
        let mut i = 0;
        while i < vars.len() {
            let mut j = i;
            while j < vars.len() && vars[j] == vars[i] {
                j += 1;
            }
            odd |= (j - i) % 2 == 1;
            i = j;
        }
        (!odd, c)
    };
    let mut report = DeterminismReport::default();
    for (i, recs) in circuit.detector_records().iter().enumerate() {
        let (ok, v) = parity(recs);
        if !ok {
            report.detectors.push(i);
        }
        report.detector_values.push(v);
    }
    for (i, recs) in circuit.observable_records().iter().enumerate() {
        let (ok, v) = parity(recs);
        if !ok {
            report.observables.push(i);
        }
        report.observable_values.push(v);
    }
    report
}

fn require_deterministic(circuit: &Circuit) -> Result<DeterminismReport> {
    let report = verify_determinism(&circuit.without_noise());
    if report.is_ok() {
        Ok(report)
    } else {
        Err(Error::NondeterministicDetector {
            detectors: report.detectors,
            observables: report.observables,
        })
    }
}

/// Frame-sample `shots` shots of detection events and observable flips.
pub fn sample_shots(circuit: &Circuit, shots: usize, seed: u64) -> Result<ShotBlock> {
    sample_shots_with(circuit, shots, seed, None)
}

pub fn sample_shots_with(
    circuit: &Circuit,
    shots: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<ShotBlock> {
    require_deterministic(circuit)?;
    FrameSampler::compile(circuit).sample(shots, seed, workers)
}

/// Sample with the exact tableau simulator. Detector and observable bits are
/// reported relative to their noiseless values, as in `sample_shots`.
pub fn reference_simulate(circuit: &Circuit, shots: usize, seed: u64) -> Result<ShotBlock> {
    let report = verify_determinism(&circuit.without_noise());
    let dets = circuit.detector_records();
    let obs = circuit.observable_records();
    let rows: Vec<(Vec<bool>, Vec<bool>)> = (0..shots)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let mut t = TableauState::new(circuit.num_qubits());
            t.run(circuit, &mut rng);
            let rec = t.record();
            let par = |recs: &[usize]| recs.iter().fold(false, |a, &r| a ^ rec[r]);
            (
                dets.iter()
                    .zip(&report.detector_values)
                    .map(|(d, &v)| par(d) ^ v)
                    .collect(),
                obs.iter()
                    .zip(&report.observable_values)
                    .map(|(o, &v)| par(o) ^ v)
                    .collect(),
            )
        })
        .collect();
    let mut block = ShotBlock::new(shots, dets.len(), obs.len());
    for (s, (d, o)) in rows.into_iter().enumerate() {
        for (i, b) in d.into_iter().enumerate() {
            block.set_detector(s, i, b);
        }
        for (i, b) in o.into_iter().enumerate() {
            block.set_observable(s, i, b);
        }
    }
    Ok(block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::Family;
    use crate::circuit::{Instruction, Target};
    use crate::lattice::build_lattice;
    use crate::logical::{logical_schedule, Observable};
    use crate::noise::{apply_noise, NoiseModel};

    fn builder_circuit(
        family: Family,
        l1: usize,
        l2: usize,
        cycles: usize,
        obs: Observable,
    ) -> Circuit {
        let lat = build_lattice(l1, l2).unwrap();
        let s = logical_schedule(&lat).unwrap();
        family.build(&lat, cycles, obs, &s).unwrap()
    }

    #[test]
    fn builder_circuits_are_deterministic() {
        for (family, l1, l2) in [
            (Family::Dynamic, 4, 6),
            (Family::Standard, 3, 6),
            (Family::Dynamic, 6, 9),
        ] {
            for obs in [Observable::H, Observable::V] {
                for cycles in [1, 2, 3] {
                    let c = builder_circuit(family, l1, l2, cycles, obs);
                    let r = verify_determinism(&c);
                    assert!(r.is_ok(), "{family} ({l1},{l2}) x{cycles} {obs:?}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn trivial_circuit_and_corruption() {
        let c: Circuit = "R 0\nM 0\nDETECTOR rec[-1]\n".parse().unwrap();
        assert!(verify_determinism(&c).is_ok());
        let c: Circuit = "RX 0\nM 0\nDETECTOR rec[-1]\n".parse().unwrap();
        assert_eq!(verify_determinism(&c).detectors, vec![0]);

        // Point the first detector at the first (random) bond measurement.
        let c = builder_circuit(Family::Dynamic, 4, 6, 2, Observable::H);
        let mut insts = c.instructions().to_vec();
        let idx = insts.iter().position(|i| i.gate == Gate::Detector).unwrap();
        let before: usize = insts[..idx]
            .iter()
            .filter(|i| i.gate.is_measurement())
            .map(|i| i.targets.len())
            .sum();
        insts[idx].targets = vec![Target::Rec(before as u32)];
        let mut c = Circuit::new();
        c.reserve_qubits(insts.iter().flat_map(|i| i.qubits()).max().unwrap() + 1);
        for inst in insts {
            c.push(inst).unwrap();
        }
        assert_eq!(verify_determinism(&c).detectors, vec![0]);
    }

    #[test]
    fn noiseless_samples_are_zero() {
        for obs in [Observable::H, Observable::V] {
            let c = builder_circuit(Family::Dynamic, 4, 6, 2, obs);
            let shots = sample_shots(&c, 300, 1).unwrap();
            assert!((0..300).all(|s| shots.fired(s).is_empty() && shots.observable_mask(s) == 0));
            let shots = reference_simulate(&c, 20, 1).unwrap();
            assert!((0..20).all(|s| shots.fired(s).is_empty() && shots.observable_mask(s) == 0));
        }
    }

    #[test]
    fn seed_and_worker_determinism() {
        let c = builder_circuit(Family::Dynamic, 4, 6, 2, Observable::H);
        let noisy = apply_noise(&c, &NoiseModel::new(0.01).unwrap()).unwrap();
        let a = sample_shots_with(&noisy, 3000, 7, Some(1)).unwrap();
        let b = sample_shots_with(&noisy, 3000, 7, Some(3)).unwrap();
        assert_eq!(a, b);
        let c2 = sample_shots_with(&noisy, 3000, 8, Some(1)).unwrap();
        assert_ne!(a, c2);
    }

    #[test]
    fn single_inserted_error_matches_tableau() {
        let c = builder_circuit(Family::Dynamic, 4, 6, 2, Observable::H);
        let ticks: Vec<usize> = c
            .instructions()
            .iter()
            .enumerate()
            .filter(|(_, i)| i.gate == Gate::Tick)
            .map(|(k, _)| k)
            .collect();
        for (n, &pos) in ticks.iter().enumerate().skip(3).step_by(5) {
            let q = (n * 7) % c.num_qubits();
            let gate = [Gate::XError, Gate::YError, Gate::ZError][n % 3];
            let mut noisy = Circuit::new();
            noisy.reserve_qubits(c.num_qubits());
            for (k, inst) in c.instructions().iter().enumerate() {
                noisy.push(inst.clone()).unwrap();
                if k == pos {
                    noisy
                        .push(Instruction::new(
                            gate,
                            vec![1.0],
                            vec![Target::Qubit(q as u32)],
                        ))
                        .unwrap();
                }
            }
            let f = sample_shots(&noisy, 1, 0).unwrap();
            let t = reference_simulate(&noisy, 1, 0).unwrap();
            assert_eq!(f, t, "error {gate:?} on {q} after instruction {pos}");
        }
    }
}
