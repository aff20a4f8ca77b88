use super::routing::RoutedCircuit;
use crate::circuit::{Gate, GateKind};
use crate::passes::cx_cancellation;

fn swap_label(q: usize, a: usize, b: usize) -> usize {
    if q == a {
        b
    } else if q == b {
        a
    } else {
        q
    }
}

/// Delete swaps followed only by measurements (and barriers) on both wires, moving those
/// measurements across. Returns the circuit and the number of swaps removed.
pub fn elide_final_swaps(rc: &RoutedCircuit) -> (RoutedCircuit, usize) {
    let mut out = rc.clone();
    let layout = out.circuit.layout.clone();
    let physical = |q: usize| layout.as_ref().map_or(q, |l| l[q]);
    let gates = &mut out.circuit.gates;
    let mut removed = 0;
    let mut i = gates.len();
    while i > 0 {
        i -= 1;
        if gates[i].kind != GateKind::Swap {
            continue;
        }
        let (a, b) = (gates[i].qubits[0], gates[i].qubits[1]);
        let terminal = gates[i + 1..]
            .iter()
            .filter(|g| g.acts_on(a) || g.acts_on(b))
            .all(|g| matches!(g.kind, GateKind::Measure | GateKind::Barrier));
        if !terminal {
            continue;
        }
        gates.remove(i);
        for g in gates[i..].iter_mut() {
            for q in g.qubits.iter_mut() {
                *q = swap_label(*q, a, b);
            }
        }
        let (pa, pb) = (physical(a), physical(b));
        for f in out.final_layout.iter_mut() {
            *f = swap_label(*f, pa, pb);
        }
        removed += 1;
    }
    (out, removed)
}

fn cx_on_pair(g: &Gate, a: usize, b: usize) -> Option<(usize, usize)> {
    let on_pair = (g.qubits == [a, b]) || (g.qubits == [b, a]);
    (g.kind == GateKind::CX && on_pair).then(|| (g.qubits[0], g.qubits[1]))
}

/// Expand every swap into three cx, oriented so that an outer cx meets an identical cx of a
/// neighbouring block when possible (earlier-indexed qubit as control otherwise), then cancel
/// adjacent identical cx pairs.
pub fn decompose_and_cancel(rc: &RoutedCircuit) -> RoutedCircuit {
    let src = &rc.circuit.gates;
    let mut gates: Vec<Gate> = Vec::with_capacity(src.len() + 2 * src.len() / 3);
    for (i, g) in src.iter().enumerate() {
        if g.kind != GateKind::Swap {
            gates.push(g.clone());
            continue;
        }
        let (a, b) = (g.qubits[0], g.qubits[1]);
        let prev_a = gates.iter().rposition(|x| x.acts_on(a));
        let prev_b = gates.iter().rposition(|x| x.acts_on(b));
        let before = match (prev_a, prev_b) {
            (Some(x), Some(y)) if x == y => cx_on_pair(&gates[x], a, b),
            _ => None,
        };
        let next_a = src[i + 1..].iter().position(|x| x.acts_on(a));
        let next_b = src[i + 1..].iter().position(|x| x.acts_on(b));
        let after = match (next_a, next_b) {
            (Some(x), Some(y)) if x == y => cx_on_pair(&src[i + 1 + x], a, b),
            _ => None,
        };
        let (c, t) = before.or(after).unwrap_or((a.min(b), a.max(b)));
        gates.extend([Gate::cx(c, t), Gate::cx(t, c), Gate::cx(c, t)]);
    }
    let mut out = rc.clone();
    out.circuit.gates = gates;
    out.circuit = cx_cancellation(&out.circuit);
    out
}

/// Drop wires that carry no gate other than barriers, keeping physical ids in the layout.
pub fn remove_idle_wires(rc: &RoutedCircuit) -> RoutedCircuit {
    let c = &rc.circuit;
    let mut busy = vec![false; c.num_qubits];
    for g in c.gates.iter().filter(|g| g.kind != GateKind::Barrier) {
        for &q in &g.qubits {
            busy[q] = true;
        }
    }
    let mut new_index = vec![usize::MAX; c.num_qubits];
    let mut layout = Vec::new();
    for q in (0..c.num_qubits).filter(|&q| busy[q]) {
        new_index[q] = layout.len();
        layout.push(c.physical(q));
    }
    let mut gates = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let mut g = g.clone();
        g.qubits = g
            .qubits
            .iter()
            .filter(|&&q| busy[q])
            .map(|&q| new_index[q])
            .collect();
        if !g.qubits.is_empty() {
            gates.push(g);
        }
    }
    let mut out = rc.clone();
    out.circuit.num_qubits = layout.len();
    out.circuit.layout = Some(layout);
    out.circuit.gates = gates;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::tapt::routing::RoutingStatus;

    fn rc(c: Circuit) -> RoutedCircuit {
        let n = c.num_qubits;
        RoutedCircuit {
            circuit: Circuit {
                layout: Some((0..n).collect()),
                ..c
            },
            initial_layout: (0..n).collect(),
            final_layout: (0..n).collect(),
            status: RoutingStatus::Optimal,
            steps: Vec::new(),
            block_depth: 0,
            proven_depth_bound: 0,
            states_explored: 0,
        }
    }

    #[test]
    fn final_swap_moves_measurements() {
        let mut c = Circuit::new(2, 2);
        c.push(Gate::swap(0, 1))
            .push(Gate::measure(0, 0))
            .push(Gate::measure(1, 1));
        let (r, n) = elide_final_swaps(&rc(c));
        assert_eq!(n, 1);
        assert_eq!(
            r.circuit.gates,
            vec![Gate::measure(1, 0), Gate::measure(0, 1)]
        );
        assert_eq!(r.final_layout, vec![1, 0]);
    }

    #[test]
    fn swap_with_successor_stays() {
        let mut c = Circuit::new(2, 2);
        c.push(Gate::swap(0, 1))
            .push(Gate::rz(0, crate::ParamExpr::literal(0.1)))
            .push(Gate::measure(0, 0));
        assert_eq!(elide_final_swaps(&rc(c)).1, 0);
    }

    #[test]
    fn stacked_final_swaps() {
        let mut c = Circuit::new(4, 4);
        c.push(Gate::swap(0, 1)).push(Gate::swap(2, 3));
        for q in 0..4 {
            c.push(Gate::measure(q, q));
        }
        let (r, n) = elide_final_swaps(&rc(c));
        assert_eq!(n, 2);
        assert!(r.circuit.gates.iter().all(|g| g.kind == GateKind::Measure));
    }

    #[test]
    fn swap_after_block_merges() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::cx(0, 1))
            .push(Gate::rz(1, crate::ParamExpr::literal(0.2)))
            .push(Gate::cx(0, 1));
        c.push(Gate::swap(0, 1));
        let r = decompose_and_cancel(&rc(c));
        assert_eq!(r.circuit.cx_count(), 3);
        let mut lone = Circuit::new(2, 0);
        lone.push(Gate::swap(1, 0));
        let r = decompose_and_cancel(&rc(lone));
        assert_eq!(
            r.circuit.gates,
            vec![Gate::cx(0, 1), Gate::cx(1, 0), Gate::cx(0, 1)]
        );
    }

    #[test]
    fn idle_wires_go() {
        let mut c = Circuit::new(4, 0);
        c.push(Gate::cx(1, 3)).push(Gate::barrier(vec![0, 1, 2, 3]));
        let r = remove_idle_wires(&rc(c));
        assert_eq!(r.circuit.num_qubits, 2);
        assert_eq!(r.circuit.layout, Some(vec![1, 3]));
        assert_eq!(
            r.circuit.gates,
            vec![Gate::cx(0, 1), Gate::barrier(vec![0, 1])]
        );
    }
}
