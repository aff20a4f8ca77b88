use crate::circuit::{Circuit, GateKind};

fn keep_only(c: &Circuit, removed: &[bool]) -> Circuit {
    let gates = c
        .gates
        .iter()
        .zip(removed)
        .filter(|(_, r)| !**r)
        .map(|(g, _)| g.clone())
        .collect();
    Circuit { gates, ..c.clone() }
}

/// Remove identical cx pairs with nothing in between on either wire, to a fixpoint.
pub fn cx_cancellation(c: &Circuit) -> Circuit {
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits];
    let mut removed = vec![false; c.gates.len()];
    for (i, g) in c.gates.iter().enumerate() {
        if g.kind == GateKind::CX {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            if let (Some(&j), Some(&k)) = (stacks[a].last(), stacks[b].last()) {
                if j == k && c.gates[j] == *g {
                    stacks[a].pop();
                    stacks[b].pop();
                    removed[j] = true;
                    removed[i] = true;
                    continue;
                }
            }
        }
        for &q in &g.qubits {
            stacks[q].push(i);
        }
    }
    keep_only(c, &removed)
}

/// Drop rz gates that directly precede a measurement on the same wire.
pub fn remove_diagonal_before_measure(c: &Circuit) -> Circuit {
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits];
    let mut removed = vec![false; c.gates.len()];
    for (i, g) in c.gates.iter().enumerate() {
        if g.kind == GateKind::Measure {
            let q = g.qubits[0];
            while let Some(&j) = stacks[q].last() {
                if !matches!(c.gates[j].kind, GateKind::RZ(_)) {
                    break;
                }
                removed[j] = true;
                stacks[q].pop();
            }
        }
        for &q in &g.qubits {
            stacks[q].push(i);
        }
    }
    keep_only(c, &removed)
}

/// Drop resets on wires that have seen no operation yet. Barriers do not count as operations.
pub fn remove_reset_in_zero_state(c: &Circuit) -> Circuit {
    let mut touched = vec![false; c.num_qubits];
    let mut removed = vec![false; c.gates.len()];
    for (i, g) in c.gates.iter().enumerate() {
        match g.kind {
            GateKind::Barrier => {}
            GateKind::Reset if !touched[g.qubits[0]] => removed[i] = true,
            _ => g.qubits.iter().for_each(|&q| touched[q] = true),
        }
    }
    keep_only(c, &removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, ParamExpr};

    #[test]
    fn cx_chain_collapses() {
        let mut c = Circuit::new(2, 0);
        for _ in 0..4 {
            c.push(Gate::cx(0, 1));
        }
        assert!(cx_cancellation(&c).gates.is_empty());
        let mut d = Circuit::new(2, 0);
        d.push(Gate::cx(0, 1)).push(Gate::cx(1, 0));
        assert_eq!(cx_cancellation(&d), d);
    }

    #[test]
    fn nested_pairs_cancel_inside_out() {
        let mut c = Circuit::new(3, 0);
        c.push(Gate::cx(0, 1))
            .push(Gate::cx(1, 2))
            .push(Gate::cx(1, 2))
            .push(Gate::cx(0, 1));
        assert!(cx_cancellation(&c).gates.is_empty());
    }

    #[test]
    fn diagonal_before_measure() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::sx(0))
            .push(Gate::rz(0, ParamExpr::literal(0.1)))
            .push(Gate::rz(0, ParamExpr::literal(0.2)))
            .push(Gate::measure(0, 0));
        let r = remove_diagonal_before_measure(&c);
        assert_eq!(r.gates, vec![Gate::sx(0), Gate::measure(0, 0)]);
    }

    #[test]
    fn head_resets_only() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::reset(0))
            .push(Gate::reset(0))
            .push(Gate::x(1))
            .push(Gate::reset(1));
        let r = remove_reset_in_zero_state(&c);
        assert_eq!(r.gates, vec![Gate::x(1), Gate::reset(1)]);
    }
}
