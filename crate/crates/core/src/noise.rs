//! Circuit-level depolarizing noise.

use crate::circuit::{Circuit, Gate, Instruction};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p: f64,
    /// Also depolarize qubits left idle by measurement and reset layers.
    pub idle_during_meas: bool,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "noise strength {p} outside [0, 1]"
            )));
        }
        Ok(NoiseModel {
            p,
            idle_during_meas: false,
        })
    }

    pub fn with_idle_during_meas(mut self, on: bool) -> Self {
        self.idle_during_meas = on;
        self
    }
}

/// Insert noise after every gate, reset and idle location, and attach a flip
/// probability to every measurement.
///
/// Depolarizing strengths above the channel maxima (3/4 and 15/16) are
/// clamped.
pub fn apply_noise(circuit: &Circuit, model: &NoiseModel) -> Result<Circuit> {
    if circuit.has_noise() {
        return Err(Error::AlreadyNoisy);
    }
    let p = model.p;
    let n = circuit.num_qubits();
    let mut out = Circuit::new();
    out.reserve_qubits(n);
    let mut touched = vec![false; n];
    let mut layer = LayerKind::default();

    let close_layer = |out: &mut Circuit, touched: &mut [bool], layer: &mut LayerKind| {
        let idle = layer.gates || (model.idle_during_meas && layer.meas_or_reset);
        if idle {
            let idle_qubits: Vec<usize> = (0..n).filter(|&q| !touched[q]).collect();
            if !idle_qubits.is_empty() {
                out.push_unchecked(depolarize1(p, idle_qubits));
            }
        }
        touched.iter_mut().for_each(|t| *t = false);
        *layer = LayerKind::default();
    };

    for inst in circuit.instructions() {
        if inst.gate == Gate::Tick {
            close_layer(&mut out, &mut touched, &mut layer);
            out.push_unchecked(inst.clone());
            continue;
        }
        for q in inst.qubits() {
            if !inst.gate.is_annotation() {
                touched[q] = true;
            }
        }
        let g = inst.gate;
        if g.is_measurement() {
            layer.meas_or_reset = true;
            let mut noisy = inst.clone();
            noisy.args = vec![p];
            out.push_unchecked(noisy);
            continue;
        }
        out.push_unchecked(inst.clone());
        if g.is_unitary() {
            layer.gates = true;
            let channel = if g.is_two_qubit() {
                Instruction::on_qubits(Gate::Depolarize2, inst.qubits())
            } else {
                Instruction::on_qubits(Gate::Depolarize1, inst.qubits())
            };
            let max = if g.is_two_qubit() { 15.0 / 16.0 } else { 0.75 };
            out.push_unchecked(with_arg(channel, p.min(max)));
        } else if g.is_reset() {
            layer.meas_or_reset = true;
            let flip = match g.basis() {
                Some(Pauli::X) => Gate::ZError,
                _ => Gate::XError,
            };
            out.push_unchecked(with_arg(Instruction::on_qubits(flip, inst.qubits()), p));
        }
    }
    close_layer(&mut out, &mut touched, &mut layer);
    Ok(out)
}

#[derive(Default)]
struct LayerKind {
    gates: bool,
    meas_or_reset: bool,
}

fn with_arg(mut inst: Instruction, p: f64) -> Instruction {
    inst.args = vec![p];
    inst
}

fn depolarize1(p: f64, qubits: Vec<usize>) -> Instruction {
    with_arg(
        Instruction::on_qubits(Gate::Depolarize1, qubits),
        p.min(0.75),
    )
}
