use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind};

/// Whether two gates that share at least one qubit commute under the rules used here:
/// diagonal gates pass a cx control, x/sx pass a cx target, and cx pairs commute unless a
/// control of one is a target of the other.
pub(crate) fn commutes(a: &Gate, b: &Gate) -> bool {
    use GateKind::*;
    match (&a.kind, &b.kind) {
        (RZ(_), RZ(_)) | (X | SX, X | SX) => true,
        (RZ(_), CX) => a.qubits[0] == b.qubits[0],
        (CX, RZ(_)) => b.qubits[0] == a.qubits[0],
        (X | SX, CX) => a.qubits[0] == b.qubits[1],
        (CX, X | SX) => b.qubits[0] == a.qubits[1],
        (CX, CX) => a.qubits[0] != b.qubits[1] && a.qubits[1] != b.qubits[0],
        _ => false,
    }
}

enum Merge {
    Cancel,
    Into(Gate),
}

fn merge(a: &Gate, b: &Gate, eps: f64) -> Option<Merge> {
    if a.qubits != b.qubits {
        return None;
    }
    match (&a.kind, &b.kind) {
        (GateKind::CX, GateKind::CX) | (GateKind::X, GateKind::X) => Some(Merge::Cancel),
        (GateKind::SX, GateKind::SX) => Some(Merge::Into(Gate::x(a.qubits[0]))),
        (GateKind::RZ(p), GateKind::RZ(q)) => {
            let sum = p.try_add(q)?;
            match sum.value() {
                Some(v) if v.abs() <= eps => Some(Merge::Cancel),
                _ => Some(Merge::Into(Gate::rz(a.qubits[0], sum))),
            }
        }
        _ => None,
    }
}

/// Move gates forward through commuting neighbours until they meet a partner they cancel or
/// merge with. Seed 0 scans in circuit order and merges into the earlier slot; other seeds
/// shuffle the scan order and pick the merge slot at random.
pub fn commutative_cancellation(c: &Circuit, seed: u64, eps: f64) -> Circuit {
    let mut slots: Vec<Option<Gate>> = c.gates.iter().cloned().map(Some).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut changed = false;
        let mut order: Vec<usize> = (0..slots.len()).collect();
        if seed != 0 {
            order.shuffle(&mut rng);
        }
        for i in order {
            let Some(gi) = slots[i].clone() else { continue };
            if !matches!(
                gi.kind,
                GateKind::CX | GateKind::X | GateKind::SX | GateKind::RZ(_)
            ) {
                continue;
            }
            for k in i + 1..slots.len() {
                let Some(gk) = &slots[k] else { continue };
                if !gk.qubits.iter().any(|q| gi.qubits.contains(q)) {
                    continue;
                }
                if let Some(m) = merge(&gi, gk, eps) {
                    match m {
                        Merge::Cancel => {
                            slots[i] = None;
                            slots[k] = None;
                        }
                        Merge::Into(g) => {
                            let keep_first = seed == 0 || rng.random_bool(0.5);
                            let (keep, drop) = if keep_first { (i, k) } else { (k, i) };
                            slots[keep] = Some(g);
                            slots[drop] = None;
                        }
                    }
                    changed = true;
                    break;
                }
                if !commutes(&gi, gk) {
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Circuit {
        gates: slots.into_iter().flatten().collect(),
        ..c.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ParamExpr;

    fn lit(v: f64) -> ParamExpr {
        ParamExpr::literal(v)
    }

    #[test]
    fn rz_on_control_lets_cx_pair_cancel() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::cx(0, 1))
            .push(Gate::rz(0, lit(0.4)))
            .push(Gate::cx(0, 1));
        let r = commutative_cancellation(&c, 0, 1e-9);
        assert_eq!(r.gates, vec![Gate::rz(0, lit(0.4))]);
    }

    #[test]
    fn rz_on_target_blocks() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::cx(0, 1))
            .push(Gate::rz(1, lit(0.4)))
            .push(Gate::cx(0, 1));
        assert_eq!(commutative_cancellation(&c, 0, 1e-9), c);
    }

    #[test]
    fn x_pair_across_target_cancels() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::x(1)).push(Gate::cx(0, 1)).push(Gate::x(1));
        assert_eq!(
            commutative_cancellation(&c, 0, 1e-9).gates,
            vec![Gate::cx(0, 1)]
        );
    }

    #[test]
    fn shared_control_cx_commute() {
        let mut c = Circuit::new(3, 0);
        c.push(Gate::cx(0, 1))
            .push(Gate::cx(0, 2))
            .push(Gate::cx(0, 1));
        assert_eq!(
            commutative_cancellation(&c, 3, 1e-9).gates,
            vec![Gate::cx(0, 2)]
        );
    }
}
