//! Gate and circuit types.
//!
//! The text format writes one gate per line as `NAME target [controls] [angle]`:
//!
//! ```text
//! H 0
//! X 1
//! P 1 [0] 3.141592653589793
//! P 0 0.5
//! MCX 2 [0,1]
//! ```
//!
//! `NAME` is one of `H`, `X`, `P` (controlled phase, any number of controls,
//! angle in radians) and `MCX` (multi-controlled NOT). The control list is
//! omitted when empty. Blank lines and lines starting with `#` are ignored by
//! the parser.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Reduce an angle to `[0, 2pi)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// True when `angle` is a multiple of 2pi within `tol`.
pub fn is_zero_angle(angle: f64, tol: f64) -> bool {
    let r = normalize_angle(angle);
    r <= tol || TAU - r <= tol
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    /// Phase `e^{i angle}` on basis states where every control and the target is 1.
    ControlledPhase(f64),
    MultiControlledX,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    target: usize,
    controls: Vec<usize>,
}

impl Gate {
    pub fn h(target: usize) -> Self {
        Gate {
            kind: GateKind::Hadamard,
            target,
            controls: Vec::new(),
        }
    }

    pub fn x(target: usize) -> Self {
        Gate {
            kind: GateKind::PauliX,
            target,
            controls: Vec::new(),
        }
    }

    /// Single-qubit `u1(angle)`.
    pub fn phase(target: usize, angle: f64) -> Self {
        Gate {
            kind: GateKind::ControlledPhase(normalize_angle(angle)),
            target,
            controls: Vec::new(),
        }
    }

    /// Multi-controlled `u1(angle)`. Controls are stored sorted.
    pub fn controlled_phase(controls: &[usize], target: usize, angle: f64) -> Result<Self> {
        let gate = Gate {
            kind: GateKind::ControlledPhase(normalize_angle(angle)),
            target,
            controls: sorted(controls),
        };
        gate.check_distinct()?;
        Ok(gate)
    }

    pub fn mcx(controls: &[usize], target: usize) -> Result<Self> {
        if controls.is_empty() {
            return Err(Error::InvalidGate(
                "multi-controlled X needs at least one control".into(),
            ));
        }
        let gate = Gate {
            kind: GateKind::MultiControlledX,
            target,
            controls: sorted(controls),
        };
        gate.check_distinct()?;
        Ok(gate)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    /// The inverse gate. H, X and MCX are self-inverse.
    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::ControlledPhase(angle) => GateKind::ControlledPhase(normalize_angle(-angle)),
            k => k,
        };
        Gate {
            kind,
            target: self.target,
            controls: self.controls.clone(),
        }
    }

    /// Bitmask of the control qubits.
    pub fn control_mask(&self) -> usize {
        self.controls.iter().fold(0, |m, &c| m | (1 << c))
    }

    /// Checks that every index is `< num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        for &q in std::iter::once(&self.target).chain(&self.controls) {
            if q >= num_qubits {
                return Err(Error::InvalidGate(format!(
                    "qubit {q} out of range for {num_qubits}-qubit register"
                )));
            }
        }
        Ok(())
    }

    fn check_distinct(&self) -> Result<()> {
        let dup = self.controls.windows(2).any(|w| w[0] == w[1])
            || self.controls.contains(&self.target);
        if dup {
            return Err(Error::InvalidGate(format!(
                "repeated qubit index in {self}"
            )));
        }
        Ok(())
    }
}

fn sorted(qubits: &[usize]) -> Vec<usize> {
    let mut v = qubits.to_vec();
    v.sort_unstable();
    v
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GateKind::Hadamard => "H",
            GateKind::PauliX => "X",
            GateKind::ControlledPhase(_) => "P",
            GateKind::MultiControlledX => "MCX",
        };
        write!(f, "{name} {}", self.target)?;
        if !self.controls.is_empty() {
            let list: Vec<String> = self.controls.iter().map(|c| c.to_string()).collect();
            write!(f, " [{}]", list.join(","))?;
        }
        if let GateKind::ControlledPhase(angle) = self.kind {
            write!(f, " {angle}")?;
        }
        Ok(())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::InvalidGate(format!("cannot parse gate line `{line}`"));
        let mut tokens = line.split_whitespace();
        let name = tokens.next().ok_or_else(bad)?;
        let target: usize = tokens.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let mut controls = Vec::new();
        let mut angle = None;
        for tok in tokens {
            if let Some(inner) = tok.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                for c in inner.split(',').filter(|c| !c.is_empty()) {
                    controls.push(c.parse::<usize>().map_err(|_| bad())?);
                }
            } else if angle.is_none() {
                angle = Some(tok.parse::<f64>().map_err(|_| bad())?);
            } else {
                return Err(bad());
            }
        }
        match (name, angle) {
            ("H", None) if controls.is_empty() => Ok(Gate::h(target)),
            ("X", None) if controls.is_empty() => Ok(Gate::x(target)),
            ("P", Some(a)) => Gate::controlled_phase(&controls, target, a),
            ("MCX", None) => Gate::mcx(&controls, target),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`, which must act on no more qubits than `self`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Circuit implementing the inverse unitary.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Text form, one gate per line. See the module docs.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {}\n", self.num_qubits);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses [`Circuit::to_text`] output. The `# qubits N` line is required.
    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut num_qubits = None;
        let mut gates = Vec::new();
        for line in text.lines().map(str::trim) {
            if let Some(rest) = line.strip_prefix("# qubits") {
                let n = rest.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidGate(format!("bad qubit count line `{line}`"))
                })?;
                num_qubits = Some(n);
            } else if line.is_empty() || line.starts_with('#') {
                continue;
            } else {
                gates.push(line.parse::<Gate>()?);
            }
        }
        let num_qubits =
            num_qubits.ok_or_else(|| Error::InvalidGate("missing `# qubits N` line".into()))?;
        let mut circuit = Circuit::new(num_qubits);
        for g in gates {
            circuit.push(g)?;
        }
        Ok(circuit)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles_are_normalized() {
        assert_eq!(normalize_angle(-PI), PI);
        assert_eq!(normalize_angle(TAU), 0.0);
        assert_eq!(normalize_angle(-1e-300), 0.0);
        let g = Gate::phase(0, -PI / 2.0);
        assert_eq!(g.kind(), GateKind::ControlledPhase(1.5 * PI));
    }

    #[test]
    fn zero_angle_detection_wraps() {
        assert!(is_zero_angle(0.0, 1e-12));
        assert!(is_zero_angle(TAU - 1e-13, 1e-12));
        assert!(is_zero_angle(-4.0 * PI, 1e-12));
        assert!(!is_zero_angle(1e-6, 1e-12));
    }

    #[test]
    fn mcx_needs_controls() {
        assert!(matches!(Gate::mcx(&[], 0), Err(Error::InvalidGate(_))));
    }

    #[test]
    fn repeated_indices_rejected() {
        assert!(Gate::mcx(&[1, 1], 0).is_err());
        assert!(Gate::controlled_phase(&[0, 2], 2, 1.0).is_err());
    }

    #[test]
    fn push_rejects_out_of_range() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::h(2)).is_err());
        assert!(c.push(Gate::mcx(&[0, 5], 1).unwrap()).is_err());
        assert!(c.push(Gate::h(1)).is_ok());
    }

    #[test]
    fn text_format() {
        let mut c = Circuit::new(3);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::x(1)).unwrap();
        c.push(Gate::controlled_phase(&[1, 0], 2, PI).unwrap()).unwrap();
        c.push(Gate::phase(0, 0.5)).unwrap();
        c.push(Gate::mcx(&[0, 1], 2).unwrap()).unwrap();
        let text = c.to_text();
        assert_eq!(
            text,
            "# qubits 3\nH 0\nX 1\nP 2 [0,1] 3.141592653589793\nP 0 0.5\nMCX 2 [0,1]\n"
        );
        assert_eq!(Circuit::from_text(&text).unwrap(), c);
    }

    #[test]
    fn parse_errors() {
        assert!("H".parse::<Gate>().is_err());
        assert!("P 0".parse::<Gate>().is_err());
        assert!("H 0 [1]".parse::<Gate>().is_err());
        assert!("FOO 0".parse::<Gate>().is_err());
        assert!(Circuit::from_text("H 0\n").is_err());
    }
}
