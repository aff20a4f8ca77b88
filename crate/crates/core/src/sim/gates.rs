use num_complex::Complex64 as C64;

use crate::circuit::{CircuitError, GateKind};

pub type Mat2 = [[C64; 2]; 2];

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const IDENTITY: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
pub const PAULI_X: Mat2 = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
pub const SQRT_X: Mat2 = [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]];

pub fn rz(theta: f64) -> Mat2 {
    let h = theta / 2.0;
    [
        [C64::from_polar(1.0, -h), c(0.0, 0.0)],
        [c(0.0, 0.0), C64::from_polar(1.0, h)],
    ]
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub fn hadamard() -> Mat2 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
}

/// `a * b` (apply `b` first).
pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Matrix of a bound single-qubit unitary gate; `Ok(None)` for non-unitary or two-qubit kinds.
pub fn single_qubit_matrix(kind: &GateKind) -> Result<Option<Mat2>, CircuitError> {
    let angle = |p: &crate::circuit::ParamExpr| {
        p.value()
            .ok_or_else(|| CircuitError::UnboundParameter(p.symbol_name().unwrap().into()))
    };
    Ok(Some(match kind {
        GateKind::X => PAULI_X,
        GateKind::SX => SQRT_X,
        GateKind::H => hadamard(),
        GateKind::RX(p) => rx(angle(p)?),
        GateKind::RY(p) => ry(angle(p)?),
        GateKind::RZ(p) => rz(angle(p)?),
        _ => return Ok(None),
    }))
}

/// Distance from `a` to `b` modulo a global phase: `max |a - e^{i phi} b|` for the best phase.
pub fn phase_distance(a: &Mat2, b: &Mat2) -> f64 {
    // Align phase on the entry of b with the largest modulus.
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for (i, row) in b.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if v.norm() > best {
                best = v.norm();
                (bi, bj) = (i, j);
            }
        }
    }
    let ratio = a[bi][bj] / b[bi][bj];
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        c(1.0, 0.0)
    };
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a[i][j] - phase * b[i][j]).norm());
        }
    }
    worst
}
