use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, Gate, GateKind, ParamExpr};

/// Lower to `{rz, sx, x, cx}` plus the non-unitary instructions. Symbolic angles stay
/// symbolic: every expansion only shifts the angle by a constant.
pub fn decompose_to_basis(c: &Circuit) -> Circuit {
    let mut out = Circuit {
        gates: Vec::with_capacity(c.gates.len()),
        ..c.clone()
    };
    let half = || ParamExpr::literal(FRAC_PI_2);
    for g in &c.gates {
        match &g.kind {
            GateKind::H => {
                let q = g.qubits[0];
                out.gates
                    .extend([Gate::rz(q, half()), Gate::sx(q), Gate::rz(q, half())]);
            }
            GateKind::RX(t) => {
                let q = g.qubits[0];
                out.gates.extend([
                    Gate::rz(q, half()),
                    Gate::sx(q),
                    Gate::rz(q, t.shifted(PI)),
                    Gate::sx(q),
                    Gate::rz(q, half()),
                ]);
            }
            GateKind::RY(t) => {
                let q = g.qubits[0];
                out.gates.extend([
                    Gate::sx(q),
                    Gate::rz(q, t.shifted(PI)),
                    Gate::sx(q),
                    Gate::rz(q, ParamExpr::literal(PI)),
                ]);
            }
            GateKind::Swap => {
                let (a, b) = (g.qubits[0], g.qubits[1]);
                out.gates
                    .extend([Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)]);
            }
            _ => out.gates.push(g.clone()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates::{self, phase_distance, single_qubit_matrix, IDENTITY};

    fn product(c: &Circuit) -> gates::Mat2 {
        c.gates.iter().fold(IDENTITY, |acc, g| {
            gates::mul(&single_qubit_matrix(&g.kind).unwrap().unwrap(), &acc)
        })
    }

    #[test]
    fn one_qubit_expansions_match_up_to_phase() {
        for g in [
            Gate::h(0),
            Gate::rx(0, ParamExpr::literal(0.73)),
            Gate::ry(0, ParamExpr::literal(-2.1)),
            Gate::rx(0, ParamExpr::literal(PI)),
        ] {
            let mut c = Circuit::new(1, 0);
            c.push(g.clone());
            let d = decompose_to_basis(&c);
            let want = single_qubit_matrix(&g.kind).unwrap().unwrap();
            assert!(phase_distance(&product(&d), &want) < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn h_expansion_shape() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::h(0));
        let names: Vec<_> = decompose_to_basis(&c)
            .gates
            .iter()
            .map(|g| g.kind.name())
            .collect();
        assert_eq!(names, ["rz", "sx", "rz"]);
    }

    #[test]
    fn swap_is_three_cx_and_symbols_pass_through() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::swap(0, 1))
            .push(Gate::rz(1, ParamExpr::symbol("t")));
        let d = decompose_to_basis(&c);
        assert_eq!(d.cx_count(), 3);
        assert_eq!(d.gates[3], Gate::rz(1, ParamExpr::symbol("t")));
    }
}
