use serde::{Deserialize, Serialize};

use super::{CalibrationSnapshot, TopologyError};
use crate::circuit::{Circuit, GateKind};

/// Per-class fidelity products and their mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityBreakdown {
    pub single_qubit: f64,
    pub cx: f64,
    pub readout: f64,
    pub score: f64,
}

/// Effective average fidelity: the mean of the products of one-qubit gate, cx and readout
/// fidelities over every gate instance in `c`. Products are formed as `exp(sum ln f)`.
/// Barriers and resets are not scored; a swap scores as three cx on its edge.
pub fn score_breakdown(
    c: &Circuit,
    cal: &CalibrationSnapshot,
) -> Result<FidelityBreakdown, TopologyError> {
    let n = cal.single_qubit.len();
    let phys = |w: usize| -> Result<usize, TopologyError> {
        let p = c.physical(w);
        if p >= n {
            Err(TopologyError::QubitOutOfRange {
                qubit: p,
                num_qubits: n,
            })
        } else {
            Ok(p)
        }
    };
    let (mut log_u, mut log_cx, mut log_d) = (0.0f64, 0.0f64, 0.0f64);
    for (i, g) in c.gates.iter().enumerate() {
        match g.kind {
            GateKind::Barrier | GateKind::Reset => {}
            GateKind::Measure => log_d += cal.readout[phys(g.qubits[0])?].ln(),
            GateKind::CX | GateKind::Swap => {
                let (a, b) = (phys(g.qubits[0])?, phys(g.qubits[1])?);
                let f =
                    cal.cx_fidelity(a, b)
                        .ok_or(TopologyError::Connectivity { gate: i, a, b })?;
                let reps = if g.kind == GateKind::Swap { 3.0 } else { 1.0 };
                log_cx += reps * f.ln();
            }
            _ => log_u += cal.single_qubit[phys(g.qubits[0])?].ln(),
        }
    }
    let (single_qubit, cx, readout) = (log_u.exp(), log_cx.exp(), log_d.exp());
    Ok(FidelityBreakdown {
        single_qubit,
        cx,
        readout,
        score: (single_qubit + cx + readout) / 3.0,
    })
}

pub fn get_fidelity(c: &Circuit, cal: &CalibrationSnapshot) -> Result<f64, TopologyError> {
    Ok(score_breakdown(c, cal)?.score)
}

/// Relative-change threshold on the deployed circuit's score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftPolicy {
    delta: f64,
}

impl DriftPolicy {
    pub fn new(delta: f64) -> Result<Self, TopologyError> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Self { delta })
        } else {
            Err(TopologyError::BadThreshold(delta))
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl Default for DriftPolicy {
    fn default() -> Self {
        Self { delta: 0.01 }
    }
}

/// True when the deployed circuit's score under `new` moved by more than `delta` relative to
/// its score under `star`.
pub fn drift_check(
    c: &Circuit,
    star: &CalibrationSnapshot,
    new: &CalibrationSnapshot,
    policy: DriftPolicy,
) -> Result<bool, TopologyError> {
    let base = get_fidelity(c, star)?;
    if base == 0.0 {
        return Err(TopologyError::DegenerateBaseline);
    }
    let now = get_fidelity(c, new)?;
    Ok(exceeds(base, now, policy))
}

fn exceeds(base: f64, now: f64, policy: DriftPolicy) -> bool {
    ((now - base) / base).abs() > policy.delta
}
