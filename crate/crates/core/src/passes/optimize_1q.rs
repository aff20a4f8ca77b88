use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::normalize_angle;
use crate::circuit::{Circuit, Gate, GateKind, ParamExpr};
use crate::sim::gates::{self, phase_distance, Mat2, IDENTITY};

const MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Basic {
    Rz(f64),
    Sx,
    X,
}

fn to_gate(b: Basic, q: usize) -> Gate {
    match b {
        Basic::Rz(a) => Gate::rz(q, ParamExpr::literal(normalize_angle(a))),
        Basic::Sx => Gate::sx(q),
        Basic::X => Gate::x(q),
    }
}

fn matrix_of(seq: &[Basic]) -> Mat2 {
    seq.iter().fold(IDENTITY, |acc, b| {
        let m = match *b {
            Basic::Rz(a) => gates::rz(a),
            Basic::Sx => gates::SQRT_X,
            Basic::X => gates::PAULI_X,
        };
        gates::mul(&m, &acc)
    })
}

/// ZYZ angles `(theta, phi, lambda)` with `U ~ RZ(phi) RY(theta) RZ(lambda)`.
fn zyz(u: &Mat2) -> (f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let s = det.sqrt();
    let v = |i: usize, j: usize| u[i][j] / s;
    let theta = 2.0 * v(1, 0).norm().atan2(v(0, 0).norm());
    let sum = if v(1, 1).norm() > 1e-12 {
        2.0 * v(1, 1).arg()
    } else {
        0.0
    };
    let diff = if v(1, 0).norm() > 1e-12 {
        2.0 * v(1, 0).arg()
    } else {
        0.0
    };
    (theta, (sum + diff) / 2.0, (sum - diff) / 2.0)
}

fn drop_identity_rz(seq: Vec<Basic>, eps: f64) -> Vec<Basic> {
    seq.into_iter()
        .filter(|b| !matches!(b, Basic::Rz(a) if normalize_angle(*a).abs() <= eps))
        .collect()
}

/// Shortest verified basis sequence for `u`, in time order.
fn synthesize(u: &Mat2, eps: f64) -> Vec<Basic> {
    if phase_distance(u, &IDENTITY) <= MATCH_TOL {
        return Vec::new();
    }
    let (t, p, l) = zyz(u);
    let candidates = [
        vec![Basic::Rz(p + l)],
        vec![Basic::Sx],
        vec![Basic::X],
        vec![Basic::X, Basic::Rz(p - l - PI)],
        vec![
            Basic::Rz(l - FRAC_PI_2),
            Basic::Sx,
            Basic::Rz(p + FRAC_PI_2),
        ],
        vec![
            Basic::Rz(l),
            Basic::Sx,
            Basic::Rz(t + PI),
            Basic::Sx,
            Basic::Rz(p + PI),
        ],
    ];
    let mut best: Option<Vec<Basic>> = None;
    for cand in candidates {
        let cand = drop_identity_rz(cand, eps);
        if phase_distance(&matrix_of(&cand), u) > MATCH_TOL {
            continue;
        }
        if best.as_ref().is_none_or(|b| cand.len() < b.len()) {
            best = Some(cand);
        }
    }
    best.expect("general ZYZ form always matches")
}

fn basic_of(kind: &GateKind) -> Option<Basic> {
    match kind {
        GateKind::RZ(p) => p.value().map(Basic::Rz),
        GateKind::SX => Some(Basic::Sx),
        GateKind::X => Some(Basic::X),
        _ => None,
    }
}

/// Collapse every maximal run of bound single-qubit basis gates on a wire. A run is
/// rewritten only if the synthesized form is strictly shorter, so the pass is idempotent.
pub fn optimize_1q(c: &Circuit, eps: f64) -> Circuit {
    let n = c.num_qubits;
    // Runs as lists of gate indices; `open[q]` is the run currently accumulating on q.
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut open: Vec<Option<usize>> = vec![None; n];
    for (i, g) in c.gates.iter().enumerate() {
        if g.qubits.len() == 1 && basic_of(&g.kind).is_some() {
            let q = g.qubits[0];
            let r = *open[q].get_or_insert_with(|| {
                runs.push(Vec::new());
                runs.len() - 1
            });
            runs[r].push(i);
        } else {
            for &q in &g.qubits {
                open[q] = None;
            }
        }
    }
    // Replacement for the first gate of each rewritten run; other members are dropped.
    let mut replace: Vec<Option<Vec<Gate>>> = vec![None; c.gates.len()];
    let mut dropped = vec![false; c.gates.len()];
    for run in &runs {
        let q = c.gates[run[0]].qubits[0];
        let seq: Vec<Basic> = run
            .iter()
            .map(|&i| basic_of(&c.gates[i].kind).unwrap())
            .collect();
        let u = matrix_of(&seq);
        let new = synthesize(&u, eps);
        let trivially_smaller = drop_identity_rz(seq.clone(), eps).len() < seq.len();
        if new.len() < seq.len() || trivially_smaller {
            let chosen = if new.len() < seq.len() {
                new
            } else {
                drop_identity_rz(seq, eps)
            };
            for &i in run {
                dropped[i] = true;
            }
            replace[run[0]] = Some(chosen.into_iter().map(|b| to_gate(b, q)).collect());
        }
    }
    let mut out = Circuit {
        gates: Vec::with_capacity(c.gates.len()),
        ..c.clone()
    };
    for (i, g) in c.gates.iter().enumerate() {
        if let Some(r) = replace[i].take() {
            out.gates.extend(r);
        } else if !dropped[i] {
            out.gates.push(g.clone());
        }
    }
    out
}
