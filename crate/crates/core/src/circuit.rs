//! Instruction-level circuit IR and its text form.
//!
//! The text grammar is the common stabilizer-circuit interchange format:
//! one instruction per line, `NAME(args) targets`, `rec[-k]` record
//! back-references, `#` comments.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::Pauli;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H,
    HYz,
    CX,
    CY,
    CZ,
    R,
    RX,
    RY,
    M,
    MX,
    MY,
    Depolarize1,
    Depolarize2,
    XError,
    YError,
    ZError,
    Tick,
    Detector,
    ObservableInclude,
    QubitCoords,
}

impl Gate {
    pub const ALL: [Gate; 20] = [
        Gate::H,
        Gate::HYz,
        Gate::CX,
        Gate::CY,
        Gate::CZ,
        Gate::R,
        Gate::RX,
        Gate::RY,
        Gate::M,
        Gate::MX,
        Gate::MY,
        Gate::Depolarize1,
        Gate::Depolarize2,
        Gate::XError,
        Gate::YError,
        Gate::ZError,
        Gate::Tick,
        Gate::Detector,
        Gate::ObservableInclude,
        Gate::QubitCoords,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::HYz => "H_YZ",
            Gate::CX => "CX",
            Gate::CY => "CY",
            Gate::CZ => "CZ",
            Gate::R => "R",
            Gate::RX => "RX",
            Gate::RY => "RY",
            Gate::M => "M",
            Gate::MX => "MX",
            Gate::MY => "MY",
            Gate::Depolarize1 => "DEPOLARIZE1",
            Gate::Depolarize2 => "DEPOLARIZE2",
            Gate::XError => "X_ERROR",
            Gate::YError => "Y_ERROR",
            Gate::ZError => "Z_ERROR",
            Gate::Tick => "TICK",
            Gate::Detector => "DETECTOR",
            Gate::ObservableInclude => "OBSERVABLE_INCLUDE",
            Gate::QubitCoords => "QUBIT_COORDS",
        }
    }

    fn from_name(s: &str) -> Option<Gate> {
        let up = s.to_ascii_uppercase();
        let alias = match up.as_str() {
            "CNOT" | "ZCX" => "CX",
            "ZCY" => "CY",
            "ZCZ" => "CZ",
            "MZ" => "M",
            "RZ" => "R",
            other => other,
        };
        Gate::ALL.into_iter().find(|g| g.name() == alias)
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, Gate::CX | Gate::CY | Gate::CZ | Gate::Depolarize2)
    }

    pub fn is_unitary(self) -> bool {
        matches!(self, Gate::H | Gate::HYz | Gate::CX | Gate::CY | Gate::CZ)
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, Gate::M | Gate::MX | Gate::MY)
    }

    pub fn is_reset(self) -> bool {
        matches!(self, Gate::R | Gate::RX | Gate::RY)
    }

    pub fn is_noise(self) -> bool {
        matches!(
            self,
            Gate::Depolarize1 | Gate::Depolarize2 | Gate::XError | Gate::YError | Gate::ZError
        )
    }

    pub fn is_annotation(self) -> bool {
        matches!(
            self,
            Gate::Tick | Gate::Detector | Gate::ObservableInclude | Gate::QubitCoords
        )
    }

    /// Measurement/reset basis.
    pub fn basis(self) -> Option<Pauli> {
        match self {
            Gate::M | Gate::R => Some(Pauli::Z),
            Gate::MX | Gate::RX => Some(Pauli::X),
            Gate::MY | Gate::RY => Some(Pauli::Y),
            _ => None,
        }
    }

    pub fn measure(basis: Pauli) -> Gate {
        match basis {
            Pauli::X => Gate::MX,
            Pauli::Y => Gate::MY,
            Pauli::Z => Gate::M,
        }
    }

    pub fn reset(basis: Pauli) -> Gate {
        match basis {
            Pauli::X => Gate::RX,
            Pauli::Y => Gate::RY,
            Pauli::Z => Gate::R,
        }
    }

    /// Controlled-P with a Z-basis control.
    pub fn controlled(p: Pauli) -> Gate {
        match p {
            Pauli::X => Gate::CX,
            Pauli::Y => Gate::CY,
            Pauli::Z => Gate::CZ,
        }
    }

    fn takes_records(self) -> bool {
        matches!(self, Gate::Detector | Gate::ObservableInclude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Qubit(u32),
    /// `rec[-k]`, k ≥ 1.
    Rec(u32),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Qubit(q) => write!(f, "{q}"),
            Target::Rec(k) => write!(f, "rec[-{k}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub args: Vec<f64>,
    pub targets: Vec<Target>,
}

impl Instruction {
    pub fn new(gate: Gate, args: Vec<f64>, targets: Vec<Target>) -> Self {
        Instruction {
            gate,
            args,
            targets,
        }
    }

    pub fn on_qubits<I: IntoIterator<Item = usize>>(gate: Gate, qubits: I) -> Self {
        Instruction::new(
            gate,
            Vec::new(),
            qubits
                .into_iter()
                .map(|q| Target::Qubit(q as u32))
                .collect(),
        )
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().filter_map(|t| match t {
            Target::Qubit(q) => Some(*q as usize),
            Target::Rec(_) => None,
        })
    }

    /// Noise probability (also the flip probability of a noisy measurement).
    pub fn probability(&self) -> f64 {
        self.args.first().copied().unwrap_or(0.0)
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gate.name())?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// Validated instruction list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    instructions: Vec<Instruction>,
    num_qubits: usize,
    num_measurements: usize,
    num_detectors: usize,
    num_observables: usize,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_measurements(&self) -> usize {
        self.num_measurements
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn push(&mut self, inst: Instruction) -> Result<()> {
        self.check(&inst).map_err(Error::InvalidCircuit)?;
        let g = inst.gate;
        for q in inst.qubits() {
            self.num_qubits = self.num_qubits.max(q + 1);
        }
        if g.is_measurement() {
            self.num_measurements += inst.targets.len();
        }
        match g {
            Gate::Detector => self.num_detectors += 1,
            Gate::ObservableInclude => {
                let k = inst.args[0] as usize;
                self.num_observables = self.num_observables.max(k + 1);
            }
            _ => {}
        }
        self.instructions.push(inst);
        Ok(())
    }

    /// Convenience for builders whose output is valid by construction.
    pub(crate) fn push_unchecked(&mut self, inst: Instruction) {
        self.push(inst)
            .expect("builder emitted an invalid instruction");
    }

    pub fn tick(&mut self) {
        self.push_unchecked(Instruction::new(Gate::Tick, Vec::new(), Vec::new()));
    }

    /// Raise the qubit count (for qubits that are declared but unused).
    pub fn reserve_qubits(&mut self, n: usize) {
        self.num_qubits = self.num_qubits.max(n);
    }

    fn check(&self, inst: &Instruction) -> std::result::Result<(), String> {
        let g = inst.gate;
        let name = g.name();
        for t in &inst.targets {
            match t {
                Target::Rec(k) => {
                    if !g.takes_records() {
                        return Err(format!("{name} does not accept record targets"));
                    }
                    if *k == 0 || *k as usize > self.num_measurements {
                        return Err(format!(
                            "rec[-{k}] does not refer to an earlier measurement ({} so far)",
                            self.num_measurements
                        ));
                    }
                }
                Target::Qubit(_) => {
                    if g.takes_records() {
                        return Err(format!("{name} takes only record targets"));
                    }
                    if g == Gate::Tick {
                        return Err("TICK takes no targets".into());
                    }
                }
            }
        }
        if g.is_two_qubit() {
            if inst.targets.len() % 2 != 0 {
                return Err(format!("{name} needs an even number of targets"));
            }
            for pair in inst.targets.chunks(2) {
                if pair[0] == pair[1] {
                    return Err(format!("{name} applied to a qubit paired with itself"));
                }
            }
        }
        let nargs = inst.args.len();
        match g {
            _ if g.is_noise() => {
                if nargs != 1 {
                    return Err(format!("{name} takes exactly one probability"));
                }
            }
            _ if g.is_measurement() => {
                if nargs > 1 {
                    return Err(format!("{name} takes at most one probability"));
                }
            }
            Gate::ObservableInclude => {
                if nargs != 1 || inst.args[0] < 0.0 || inst.args[0].fract() != 0.0 {
                    return Err("OBSERVABLE_INCLUDE needs one non-negative integer index".into());
                }
            }
            Gate::Detector | Gate::QubitCoords => {}
            _ => {
                if nargs != 0 {
                    return Err(format!("{name} takes no arguments"));
                }
            }
        }
        if g.is_noise() || g.is_measurement() {
            if let Some(&p) = inst.args.first() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("probability {p} outside [0, 1]"));
                }
            }
        }
        if g.is_noise() && g == Gate::Depolarize1 && inst.args[0] > 0.75 {
            return Err("DEPOLARIZE1 probability above 3/4".into());
        }
        if g == Gate::Depolarize2 && inst.args[0] > 15.0 / 16.0 {
            return Err("DEPOLARIZE2 probability above 15/16".into());
        }
        Ok(())
    }

    pub fn has_noise(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| i.gate.is_noise() || (i.gate.is_measurement() && i.probability() > 0.0))
    }

    /// Copy with every noise channel and measurement-flip argument removed.
    pub fn without_noise(&self) -> Circuit {
        let mut out = Circuit::new();
        out.num_qubits = self.num_qubits;
        for inst in &self.instructions {
            if inst.gate.is_noise() {
                continue;
            }
            let mut inst = inst.clone();
            if inst.gate.is_measurement() {
                inst.args.clear();
            }
            out.push_unchecked(inst);
        }
        out
    }

    /// For each detector (in order), the absolute record indices it reads.
    pub fn detector_records(&self) -> Vec<Vec<usize>> {
        self.annotation_records(Gate::Detector)
            .into_iter()
            .map(|(_, r)| r)
            .collect()
    }

    /// Per observable, the absolute record indices it reads.
    pub fn observable_records(&self) -> Vec<Vec<usize>> {
        let mut obs = vec![Vec::new(); self.num_observables];
        for (k, recs) in self.annotation_records(Gate::ObservableInclude) {
            obs[k].extend(recs);
        }
        obs
    }

    /// Detector coordinate arguments, in order.
    pub fn detector_coords(&self) -> Vec<Vec<f64>> {
        self.instructions
            .iter()
            .filter(|i| i.gate == Gate::Detector)
            .map(|i| i.args.clone())
            .collect()
    }

    fn annotation_records(&self, gate: Gate) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        let mut m = 0usize;
        for inst in &self.instructions {
            if inst.gate.is_measurement() {
                m += inst.targets.len();
            } else if inst.gate == gate {
                let recs = inst
                    .targets
                    .iter()
                    .filter_map(|t| match t {
                        Target::Rec(k) => Some(m - *k as usize),
                        Target::Qubit(_) => None,
                    })
                    .collect();
                let idx = inst.args.first().copied().unwrap_or(0.0) as usize;
                out.push((idx, recs));
            }
        }
        out
    }

    /// Serialize to text; `parse` inverts this exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for inst in &self.instructions {
            s.push_str(&inst.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        let mut c = Circuit::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let inst = parse_line(line).map_err(err)?;
            c.check(&inst).map_err(err)?;
            c.push(inst).map_err(|e| err(e.to_string()))?;
        }
        Ok(c)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Circuit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Circuit> {
        Circuit::parse(s)
    }
}

fn parse_line(line: &str) -> std::result::Result<Instruction, String> {
    let (head, rest) = match line.find(|c: char| c.is_whitespace() || c == '(') {
        Some(i) => line.split_at(i),
        None => (line, ""),
    };
    let gate = Gate::from_name(head).ok_or_else(|| format!("unknown instruction {head:?}"))?;
    let mut rest = rest.trim_start();
    let mut args = Vec::new();
    if let Some(r) = rest.strip_prefix('(') {
        let close = r.find(')').ok_or("unclosed argument list")?;
        for a in r[..close].split(',') {
            let a = a.trim();
            if a.is_empty() {
                continue;
            }
            args.push(
                a.parse::<f64>()
                    .map_err(|_| format!("bad argument {a:?}"))?,
            );
        }
        rest = &r[close + 1..];
    }
    let mut targets = Vec::new();
    for tok in rest.split_whitespace() {
        if let Some(k) = tok.strip_prefix("rec[-").and_then(|t| t.strip_suffix(']')) {
            let k: u32 = k
                .parse()
                .map_err(|_| format!("bad record target {tok:?}"))?;
            targets.push(Target::Rec(k));
        } else {
            let q: u32 = tok.parse().map_err(|_| format!("bad target {tok:?}"))?;
            targets.push(Target::Qubit(q));
        }
    }
    Ok(Instruction::new(gate, args, targets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "R 0 1\nRX 2\nTICK\nCX 2 0 2 1\nDEPOLARIZE2(0.001) 2 0 2 1\nTICK\nMX(0.01) 2\nM 0 1\nDETECTOR(1, 2.5, 0) rec[-1] rec[-2]\nOBSERVABLE_INCLUDE(0) rec[-3]\n";
        let c = Circuit::parse(text).unwrap();
        assert_eq!(c.to_text(), text);
        assert_eq!(c.num_qubits(), 3);
        assert_eq!(c.num_measurements(), 3);
        assert_eq!(c.num_detectors(), 1);
        assert_eq!(c.num_observables(), 1);
        assert_eq!(c.detector_records(), vec![vec![2, 1]]);
        assert_eq!(c.observable_records(), vec![vec![0]]);
        assert!(c.has_noise());
        assert!(!c.without_noise().has_noise());
    }

    #[test]
    fn comments_and_aliases() {
        let c = Circuit::parse("# header\nCNOT 0 1  # trailing\n\nMZ 1\n").unwrap();
        assert_eq!(c.instructions()[0].gate, Gate::CX);
        assert_eq!(c.instructions()[1].gate, Gate::M);
    }

    #[test]
    fn parse_errors_carry_line() {
        let e = Circuit::parse("R 0\nFOO 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = Circuit::parse("R 0\nTICK\nX_ERROR(1.5) 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = Circuit::parse("M 0\nDETECTOR rec[-2]\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = Circuit::parse("CX 0 1 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        assert!(Circuit::parse("CZ 3 3\n").is_err());
        assert!(Circuit::parse("H(0.1) 0\n").is_err());
    }
}
