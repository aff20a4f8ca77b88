use serde::{Deserialize, Serialize};

use super::{DensityMatrix, SimError};
use crate::circuit::{Circuit, Gate, GateKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    BitFlip,
    BitPhaseFlip,
    Depolarizing,
}

/// Where a channel is inserted during simulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// After every gate, on each qubit it acted on.
    #[default]
    PerGateActedQubits,
    /// After each depth layer, on every qubit.
    AllQubitsPerLayer,
    /// After two-qubit gates only, on both qubits.
    TwoQubitGatesOnly,
}

impl Placement {
    /// Execution order as `(layer_end, gate index)`. Layer ends are only reported for
    /// layer placement, where gates are regrouped by their depth level.
    pub fn gate_order(&self, c: &Circuit) -> Vec<(Option<bool>, usize)> {
        if *self != Placement::AllQubitsPerLayer {
            return (0..c.gates.len()).map(|i| (None, i)).collect();
        }
        let mut level = vec![0usize; c.num_qubits];
        let mut tagged: Vec<(usize, usize)> = Vec::with_capacity(c.gates.len());
        for (i, g) in c.gates.iter().enumerate() {
            let top = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
            let lv = if g.kind == GateKind::Barrier {
                top
            } else {
                top + 1
            };
            for &q in &g.qubits {
                level[q] = lv;
            }
            tagged.push((lv, i));
        }
        tagged.sort();
        let mut out = Vec::with_capacity(tagged.len());
        for (k, &(lv, i)) in tagged.iter().enumerate() {
            let end = tagged.get(k + 1).is_none_or(|&(next, _)| next != lv);
            out.push((Some(end && lv > 0), i));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    pub kind: NoiseKind,
    pub rate: f64,
    #[serde(default)]
    pub placement: Placement,
}

impl NoiseChannel {
    pub fn new(kind: NoiseKind, rate: f64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(SimError::BadRate(rate));
        }
        Ok(Self {
            kind,
            rate,
            placement: Placement::default(),
        })
    }

    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            rate: 0.0,
            placement: Placement::default(),
        }
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    pub(crate) fn after_gate(&self, rho: &mut DensityMatrix, g: &Gate) {
        let noisy = match self.placement {
            Placement::PerGateActedQubits => g.kind.is_unitary() || g.kind == GateKind::Reset,
            Placement::TwoQubitGatesOnly => g.is_two_qubit(),
            Placement::AllQubitsPerLayer => false,
        };
        if noisy {
            for &q in &g.qubits {
                apply_channel(rho, self, q);
            }
        }
    }

    pub(crate) fn after_layer(&self, rho: &mut DensityMatrix) {
        for q in 0..rho.num_qubits() {
            apply_channel(rho, self, q);
        }
    }
}

/// Apply the single-qubit channel to `qubit`.
pub fn apply_channel(rho: &mut DensityMatrix, ch: &NoiseChannel, qubit: usize) {
    let l = ch.rate;
    if l == 0.0 {
        return;
    }
    match ch.kind {
        NoiseKind::None => {}
        NoiseKind::BitFlip => {
            let t = rho.pauli_conjugated(qubit, 'X');
            rho.mix(1.0 - l, &[(l, t)]);
        }
        NoiseKind::BitPhaseFlip => {
            let t = rho.pauli_conjugated(qubit, 'Y');
            rho.mix(1.0 - l, &[(l, t)]);
        }
        NoiseKind::Depolarizing => {
            let terms: Vec<_> = ['X', 'Y', 'Z']
                .iter()
                .map(|&p| (l / 4.0, rho.pauli_conjugated(qubit, p)))
                .collect();
            rho.mix(1.0 - 3.0 * l / 4.0, &terms);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn depolarizing_ground_state_closed_form() {
        for l in [0.0, 0.25, 1.0] {
            let mut r = DensityMatrix::zero_state(1);
            apply_channel(
                &mut r,
                &NoiseChannel::new(NoiseKind::Depolarizing, l).unwrap(),
                0,
            );
            assert!((r.get(0, 0).re - (1.0 - l / 2.0)).abs() < 1e-12);
            assert!((r.get(1, 1).re - l / 2.0).abs() < 1e-12);
            assert_eq!(r.get(0, 1), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn rate_is_checked() {
        assert!(matches!(
            NoiseChannel::new(NoiseKind::BitFlip, 1.5),
            Err(SimError::BadRate(_))
        ));
    }

    #[test]
    fn layer_order_marks_ends() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::x(0))
            .push(Gate::x(1))
            .push(Gate::cx(0, 1))
            .push(Gate::x(0));
        let o = Placement::AllQubitsPerLayer.gate_order(&c);
        let ends: Vec<_> = o.iter().map(|(e, _)| e.unwrap()).collect();
        assert_eq!(ends, vec![false, true, true, true]);
    }
}
