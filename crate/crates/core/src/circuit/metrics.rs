use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, GateKind};

/// Size and depth of a circuit, optionally with percentage changes against a reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub depth: usize,
    pub gates: usize,
    pub cx: usize,
    pub measures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<MetricDeltas>,
}

/// `100 * (after - before) / before`; `None` where the reference value is zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricDeltas {
    pub depth_pct: Option<f64>,
    pub gates_pct: Option<f64>,
    pub cx_pct: Option<f64>,
}

pub fn percent_change(before: usize, after: usize) -> Option<f64> {
    (before > 0).then(|| 100.0 * (after as f64 - before as f64) / before as f64)
}

/// Barriers synchronise the wires they touch without adding a layer and are not counted as
/// gates. Measure and reset count as ordinary one-qubit gates.
pub fn compute_metrics(
    c: &Circuit,
    reference: Option<&Circuit>,
) -> Result<CircuitMetrics, CircuitError> {
    c.ensure_valid()?;
    let mut level = vec![0usize; c.num_qubits];
    let (mut gates, mut cx, mut measures) = (0, 0, 0);
    for g in &c.gates {
        let top = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
        let next = match g.kind {
            GateKind::Barrier => top,
            _ => {
                gates += 1;
                top + 1
            }
        };
        match g.kind {
            GateKind::CX => cx += 1,
            GateKind::Measure => measures += 1,
            _ => {}
        }
        for &q in &g.qubits {
            level[q] = next;
        }
    }
    let depth = level.into_iter().max().unwrap_or(0);
    let delta = match reference {
        Some(r) => {
            let base = compute_metrics(r, None)?;
            Some(MetricDeltas {
                depth_pct: percent_change(base.depth, depth),
                gates_pct: percent_change(base.gates, gates),
                cx_pct: percent_change(base.cx, cx),
            })
        }
        None => None,
    };
    Ok(CircuitMetrics {
        depth,
        gates,
        cx,
        measures,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, ParamExpr};

    #[test]
    fn empty_circuit_has_zero_metrics() {
        let m = compute_metrics(&Circuit::new(3, 0), None).unwrap();
        assert_eq!((m.depth, m.gates, m.cx, m.measures), (0, 0, 0, 0));
    }

    #[test]
    fn table_deltas_round_to_reported_values() {
        assert!((percent_change(19, 43).unwrap() - 126.315_789).abs() < 1e-5);
        assert!((percent_change(20, 26).unwrap() - 30.0).abs() < 1e-12);
        assert!((percent_change(50, 135).unwrap() - 170.0).abs() < 1e-12);
        assert_eq!(percent_change(0, 4), None);
    }

    #[test]
    fn barrier_cuts_layers_but_is_not_counted() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::x(0))
            .push(Gate::barrier(vec![0, 1]))
            .push(Gate::x(1));
        let m = compute_metrics(&c, None).unwrap();
        assert_eq!((m.depth, m.gates), (2, 2));
    }

    #[test]
    fn self_delta_is_zero() {
        let mut c = Circuit::new(2, 2);
        c.push(Gate::h(0))
            .push(Gate::cx(0, 1))
            .push(Gate::rz(1, ParamExpr::literal(0.2)))
            .push(Gate::measure(0, 0));
        let d = compute_metrics(&c, Some(&c)).unwrap().delta.unwrap();
        assert_eq!(
            (d.depth_pct, d.gates_pct, d.cx_pct),
            (Some(0.0), Some(0.0), Some(0.0))
        );
    }

    #[test]
    fn malformed_circuit_is_rejected() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::cx(0, 3));
        assert!(matches!(
            compute_metrics(&c, None),
            Err(CircuitError::Invalid(_))
        ));
    }
}
