//! Dense density-matrix simulation with Pauli noise channels.

mod channel;
mod density;
mod fidelity;
pub mod gates;
mod sampling;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateKind};

pub use channel::{apply_channel, NoiseChannel, NoiseKind, Placement};
pub use density::DensityMatrix;
pub use fidelity::state_fidelity;
pub use sampling::{counts_to_bitstrings, sample_counts};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{0} qubits exceed the simulator limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("gate {0} acts on a measured qubit; only terminal measurement is supported")]
    MidCircuitMeasurement(usize),
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),
    #[error("noise rate {0} outside [0, 1]")]
    BadRate(f64),
    #[error("distribution is empty or not normalised")]
    BadDistribution,
}

/// Final state before measurement plus the outcome distribution over classical bits
/// (index bit `c` is clbit `c`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimResult {
    pub state: DensityMatrix,
    pub distribution: Vec<f64>,
}

/// Run a bound circuit, applying `channel` according to its placement policy.
pub fn simulate(c: &Circuit, channel: &NoiseChannel) -> Result<SimResult, SimError> {
    if c.num_qubits > MAX_QUBITS {
        return Err(SimError::TooManyQubits(c.num_qubits));
    }
    c.ensure_valid()?;
    let mut rho = DensityMatrix::zero_state(c.num_qubits);
    let mut measured: Vec<Option<usize>> = vec![None; c.num_qubits];
    let order = channel.placement.gate_order(c);
    for (layer_end, idx) in order {
        let g = &c.gates[idx];
        if g.kind != GateKind::Barrier {
            if g.qubits.iter().any(|&q| measured[q].is_some()) {
                return Err(SimError::MidCircuitMeasurement(idx));
            }
        }
        match g.kind {
            GateKind::Measure => measured[g.qubits[0]] = g.clbit,
            GateKind::Barrier => {}
            GateKind::Reset => rho.reset(g.qubits[0]),
            _ => rho.apply_gate(g)?,
        }
        channel.after_gate(&mut rho, g);
        if let Some(true) = layer_end {
            channel.after_layer(&mut rho);
        }
    }
    let probs = rho.probabilities();
    let mut distribution = vec![0.0; 1usize << c.num_clbits];
    for (i, p) in probs.iter().enumerate() {
        let mut out = 0usize;
        for (q, cl) in measured.iter().enumerate() {
            if let Some(cl) = cl {
                if i >> q & 1 == 1 {
                    out |= 1 << cl;
                }
            }
        }
        distribution[out] += p;
    }
    Ok(SimResult {
        state: rho,
        distribution,
    })
}

/// Total variation distance between two distributions of equal length.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(
        p.len(),
        q.len(),
        "distributions over different outcome spaces"
    );
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, ParamExpr};

    #[test]
    fn hadamard_measure_is_fair_coin() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::h(0)).push(Gate::measure(0, 0));
        let r = simulate(&c, &NoiseChannel::none()).unwrap();
        assert!((r.distribution[0] - 0.5).abs() < 1e-12);
        assert!((r.distribution[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bit_flip_after_x() {
        let lambda = 0.07;
        let mut c = Circuit::new(1, 1);
        c.push(Gate::x(0)).push(Gate::measure(0, 0));
        let r = simulate(&c, &NoiseChannel::new(NoiseKind::BitFlip, lambda).unwrap()).unwrap();
        assert!((r.distribution[1] - (1.0 - lambda)).abs() < 1e-12);
    }

    #[test]
    fn readout_follows_clbit_targets() {
        let mut c = Circuit::new(2, 2);
        c.push(Gate::x(0))
            .push(Gate::measure(0, 1))
            .push(Gate::measure(1, 0));
        let r = simulate(&c, &NoiseChannel::none()).unwrap();
        assert!((r.distribution[0b10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_symbols_and_large_registers() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::rz(0, ParamExpr::symbol("t")));
        assert!(matches!(
            simulate(&c, &NoiseChannel::none()),
            Err(SimError::Circuit(_))
        ));
        assert!(matches!(
            simulate(&Circuit::new(13, 0), &NoiseChannel::none()),
            Err(SimError::TooManyQubits(13))
        ));
    }

    #[test]
    fn reset_returns_to_zero() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::x(0))
            .push(Gate::reset(0))
            .push(Gate::measure(0, 0));
        let r = simulate(&c, &NoiseChannel::none()).unwrap();
        assert!((r.distribution[0] - 1.0).abs() < 1e-12);
    }
}
