//! Circuit representation shared by every compilation stage.
//!
//! A [`Circuit`] is an ordered gate list over `num_qubits` wires. Circuits produced by routing
//! also carry a `layout`: the physical qubit id that each wire stands for.

mod metrics;
mod param;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use metrics::{compute_metrics, percent_change, CircuitMetrics, MetricDeltas};
pub use param::{normalize_angle, ParamExpr};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "param", rename_all = "lowercase")]
pub enum GateKind {
    X,
    SX,
    H,
    RX(ParamExpr),
    RY(ParamExpr),
    RZ(ParamExpr),
    CX,
    Swap,
    Measure,
    Barrier,
    Reset,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::SX => "sx",
            GateKind::H => "h",
            GateKind::RX(_) => "rx",
            GateKind::RY(_) => "ry",
            GateKind::RZ(_) => "rz",
            GateKind::CX => "cx",
            GateKind::Swap => "swap",
            GateKind::Measure => "measure",
            GateKind::Barrier => "barrier",
            GateKind::Reset => "reset",
        }
    }

    /// Number of qubits the gate acts on; `None` for barriers, which span any non-empty set.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::CX | GateKind::Swap => Some(2),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    pub fn param(&self) -> Option<&ParamExpr> {
        match self {
            GateKind::RX(p) | GateKind::RY(p) | GateKind::RZ(p) => Some(p),
            _ => None,
        }
    }

    pub fn param_mut(&mut self) -> Option<&mut ParamExpr> {
        match self {
            GateKind::RX(p) | GateKind::RY(p) | GateKind::RZ(p) => Some(p),
            _ => None,
        }
    }

    /// Unitary gates, i.e. everything but measure, reset and barrier.
    pub fn is_unitary(&self) -> bool {
        !matches!(
            self,
            GateKind::Measure | GateKind::Barrier | GateKind::Reset
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbit: Option<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self {
            kind,
            qubits,
            clbit: None,
        }
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q])
    }
    pub fn sx(q: usize) -> Self {
        Self::new(GateKind::SX, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }
    pub fn rx(q: usize, p: ParamExpr) -> Self {
        Self::new(GateKind::RX(p), vec![q])
    }
    pub fn ry(q: usize, p: ParamExpr) -> Self {
        Self::new(GateKind::RY(p), vec![q])
    }
    pub fn rz(q: usize, p: ParamExpr) -> Self {
        Self::new(GateKind::RZ(p), vec![q])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::CX, vec![control, target])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b])
    }
    pub fn measure(q: usize, c: usize) -> Self {
        Self {
            kind: GateKind::Measure,
            qubits: vec![q],
            clbit: Some(c),
        }
    }
    pub fn reset(q: usize) -> Self {
        Self::new(GateKind::Reset, vec![q])
    }
    pub fn barrier(qubits: Vec<usize>) -> Self {
        Self::new(GateKind::Barrier, qubits)
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.kind, GateKind::CX | GateKind::Swap)
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }
}

/// One invariant violation found by [`Circuit::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    ArityMismatch {
        gate: usize,
        expected: usize,
        found: usize,
    },
    EmptyBarrier {
        gate: usize,
    },
    DuplicateQubit {
        gate: usize,
        qubit: usize,
    },
    QubitOutOfRange {
        gate: usize,
        qubit: usize,
    },
    MissingClbit {
        gate: usize,
    },
    ClbitOutOfRange {
        gate: usize,
        clbit: usize,
    },
    GateAfterMeasure {
        gate: usize,
        qubit: usize,
    },
    LayoutLength {
        expected: usize,
        found: usize,
    },
    DuplicatePhysical {
        physical: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ArityMismatch {
                gate,
                expected,
                found,
            } => {
                write!(f, "gate {gate}: expected {expected} qubits, found {found}")
            }
            Violation::EmptyBarrier { gate } => write!(f, "gate {gate}: barrier without qubits"),
            Violation::DuplicateQubit { gate, qubit } => {
                write!(f, "gate {gate}: duplicate qubit {qubit}")
            }
            Violation::QubitOutOfRange { gate, qubit } => {
                write!(f, "gate {gate}: qubit index {qubit} out of range")
            }
            Violation::MissingClbit { gate } => write!(f, "gate {gate}: measure without clbit"),
            Violation::ClbitOutOfRange { gate, clbit } => {
                write!(f, "gate {gate}: clbit index {clbit} out of range")
            }
            Violation::GateAfterMeasure { gate, qubit } => {
                write!(
                    f,
                    "gate {gate}: acts on qubit {qubit} after its measurement"
                )
            }
            Violation::LayoutLength { expected, found } => {
                write!(
                    f,
                    "layout lists {found} physical qubits for {expected} wires"
                )
            }
            Violation::DuplicatePhysical { physical } => {
                write!(f, "physical qubit {physical} appears twice in the layout")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("invalid circuit: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub gates: Vec<Gate>,
    /// Physical qubit id per wire, present once the circuit is placed on a device.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<usize>>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Self {
            name: "circuit".into(),
            num_qubits,
            num_clbits,
            gates: Vec::new(),
            layout: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    /// Physical id of a wire (the wire index itself for unplaced circuits).
    pub fn physical(&self, wire: usize) -> usize {
        self.layout.as_ref().map_or(wire, |l| l[wire])
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::CX).count()
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for g in &self.gates {
            if let Some(p) = g.kind.param() {
                p.collect_symbols(&mut out);
            }
        }
        out
    }

    pub fn is_bound(&self) -> bool {
        self.gates
            .iter()
            .all(|g| g.kind.param().is_none_or(ParamExpr::is_bound))
    }

    /// Substitute every symbol. Literal angles come out normalized to `(-pi, pi]`.
    pub fn bind_parameters(&self, binding: &HashMap<String, f64>) -> Result<Circuit, CircuitError> {
        let mut out = self.clone();
        for g in &mut out.gates {
            if let Some(p) = g.kind.param_mut() {
                *p = p.bind(binding)?;
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut measured = vec![false; self.num_qubits];
        for (i, g) in self.gates.iter().enumerate() {
            match g.kind.arity() {
                Some(n) if n != g.qubits.len() => out.push(Violation::ArityMismatch {
                    gate: i,
                    expected: n,
                    found: g.qubits.len(),
                }),
                None if g.qubits.is_empty() => out.push(Violation::EmptyBarrier { gate: i }),
                _ => {}
            }
            for (k, &q) in g.qubits.iter().enumerate() {
                if q >= self.num_qubits {
                    out.push(Violation::QubitOutOfRange { gate: i, qubit: q });
                }
                if g.qubits[..k].contains(&q) {
                    out.push(Violation::DuplicateQubit { gate: i, qubit: q });
                }
            }
            if g.kind == GateKind::Measure {
                match g.clbit {
                    None => out.push(Violation::MissingClbit { gate: i }),
                    Some(c) if c >= self.num_clbits => {
                        out.push(Violation::ClbitOutOfRange { gate: i, clbit: c })
                    }
                    _ => {}
                }
            }
            for &q in g.qubits.iter().filter(|&&q| q < self.num_qubits) {
                match g.kind {
                    GateKind::Barrier => {}
                    GateKind::Reset => measured[q] = false,
                    _ if measured[q] => out.push(Violation::GateAfterMeasure { gate: i, qubit: q }),
                    GateKind::Measure => measured[q] = true,
                    _ => {}
                }
            }
        }
        if let Some(layout) = &self.layout {
            if layout.len() != self.num_qubits {
                out.push(Violation::LayoutLength {
                    expected: self.num_qubits,
                    found: layout.len(),
                });
            }
            let mut seen = BTreeSet::new();
            for &p in layout {
                if !seen.insert(p) {
                    out.push(Violation::DuplicatePhysical { physical: p });
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), CircuitError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CircuitError::Invalid(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_qubit_reported_at_index() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::cx(0, 0));
        assert_eq!(
            c.validate(),
            vec![Violation::DuplicateQubit { gate: 0, qubit: 0 }]
        );
    }

    #[test]
    fn out_of_range_qubit() {
        let mut c = Circuit::new(5, 0);
        c.push(Gate::x(7));
        assert_eq!(
            c.validate(),
            vec![Violation::QubitOutOfRange { gate: 0, qubit: 7 }]
        );
    }

    #[test]
    fn gate_after_measure_needs_reset() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::measure(0, 0)).push(Gate::x(0));
        assert_eq!(
            c.validate(),
            vec![Violation::GateAfterMeasure { gate: 1, qubit: 0 }]
        );
        let mut ok = Circuit::new(1, 1);
        ok.push(Gate::measure(0, 0))
            .push(Gate::reset(0))
            .push(Gate::x(0));
        assert!(ok.validate().is_empty());
    }

    #[test]
    fn binding_without_symbols_is_identity() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::rz(0, ParamExpr::literal(0.4)))
            .push(Gate::h(0));
        assert_eq!(c.bind_parameters(&HashMap::new()).unwrap(), c);
    }

    #[test]
    fn binding_is_idempotent() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::rz(0, ParamExpr::linear(3.0, "t", 1.0)));
        let b = HashMap::from([("t".to_string(), 2.9)]);
        let once = c.bind_parameters(&b).unwrap();
        assert!(once.is_bound());
        assert_eq!(once.bind_parameters(&HashMap::new()).unwrap(), once);
    }
}
