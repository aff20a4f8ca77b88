//! Noise-aware matching: move a routed circuit onto an equivalent sub-graph of the device with
//! a better calibration score. Trials are relabelings, so gate counts never change.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{CircuitError, GateKind};
use crate::graph::{monomorphisms, UGraph};
use crate::tapt::RoutedCircuit;
use crate::topology::{
    score_breakdown, CalibrationSnapshot, CouplingMap, FidelityBreakdown, TopologyError,
};

/// Enumeration stops after this many embeddings; the seeded order is a shuffle of this prefix.
pub const ENUMERATION_LIMIT: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamConfig {
    pub trials: usize,
    pub seed: u64,
}

impl Default for NamConfig {
    fn default() -> Self {
        Self {
            trials: 15,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum NamError {
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("routed circuit has no physical layout")]
    NoLayout,
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub layout: Vec<usize>,
    pub score: f64,
    pub cx: usize,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// Physical qubit per wire of the routed circuit.
    pub layout: Vec<usize>,
    pub score: f64,
    pub breakdown: FidelityBreakdown,
    pub cx: usize,
    /// Trial that produced the result; `None` when the input placement was kept.
    pub trial: Option<usize>,
    pub identity_score: f64,
    pub trials: Vec<Trial>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamOutput {
    pub routed: RoutedCircuit,
    pub result: MatchResult,
}

/// Graph on the wires of `rc` with an edge for every pair coupled by a two-qubit gate.
pub fn active_subgraph(rc: &RoutedCircuit) -> UGraph {
    let edges = rc
        .circuit
        .gates
        .iter()
        .filter(|g| matches!(g.kind, GateKind::CX | GateKind::Swap))
        .map(|g| (g.qubits[0], g.qubits[1]));
    UGraph::new(rc.circuit.num_qubits, edges)
}

/// Every embedding of the active sub-graph of `rc` into `map`, as physical qubit per wire, in a
/// seeded shuffle of lexicographic order.
pub fn enumerate_placements(rc: &RoutedCircuit, map: &CouplingMap, seed: u64) -> Vec<Vec<usize>> {
    let mut all = monomorphisms(&active_subgraph(rc), map.graph(), ENUMERATION_LIMIT);
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    all
}

/// Move `rc` so that wire `w` sits on physical qubit `layout[w]`. Layouts and swap steps
/// follow; logical qubits without a wire keep their place unless it is taken, in which case
/// they move to the lowest free qubits.
pub fn relabel(
    rc: &RoutedCircuit,
    layout: &[usize],
    num_physical: usize,
) -> Result<RoutedCircuit, NamError> {
    let old = rc.circuit.layout.as_ref().ok_or(NamError::NoLayout)?;
    let mut sigma = vec![None; num_physical.max(old.iter().max().map_or(0, |m| m + 1))];
    for (w, &p) in old.iter().enumerate() {
        sigma[p] = Some(layout[w]);
    }
    let mut taken = vec![false; sigma.len().max(num_physical)];
    for &p in layout {
        taken[p] = true;
    }
    let mut spare = (0..taken.len())
        .filter(|&p| !taken[p])
        .collect::<Vec<_>>()
        .into_iter();
    let mut move_rest = |l: &[usize]| -> Vec<usize> {
        l.iter()
            .map(|&p| match sigma.get(p).copied().flatten() {
                Some(q) => q,
                None if !taken[p] => {
                    taken[p] = true;
                    p
                }
                None => spare.find(|&q| !taken[q]).unwrap_or(p),
            })
            .collect()
    };
    let initial = move_rest(&rc.initial_layout);
    let map_p = |p: usize| sigma.get(p).copied().flatten().unwrap_or(p);
    let final_layout = rc
        .final_layout
        .iter()
        .zip(&rc.initial_layout)
        .zip(&initial)
        .map(|((&f, &i0), &i1)| {
            if sigma.get(f).copied().flatten().is_some() {
                map_p(f)
            } else if f == i0 {
                i1
            } else {
                f
            }
        })
        .collect();
    let mut out = rc.clone();
    out.circuit.layout = Some(layout.to_vec());
    out.initial_layout = initial;
    out.final_layout = final_layout;
    for s in &mut out.steps {
        for sw in &mut s.swaps {
            *sw = (map_p(sw.0), map_p(sw.1));
        }
    }
    out.circuit.ensure_valid()?;
    Ok(out)
}

fn cx_count(rc: &RoutedCircuit) -> usize {
    rc.circuit
        .gates
        .iter()
        .map(|g| match g.kind {
            GateKind::CX => 1,
            GateKind::Swap => 3,
            _ => 0,
        })
        .sum()
}

/// Keep the input placement as incumbent and try up to `cfg.trials` other embeddings. A trial
/// replaces the incumbent only if it uses no more cx and scores strictly higher.
pub fn nam(
    rc: &RoutedCircuit,
    map: &CouplingMap,
    cal: &CalibrationSnapshot,
    cfg: &NamConfig,
) -> Result<NamOutput, NamError> {
    if cfg.trials == 0 {
        return Err(NamError::NoTrials);
    }
    let identity = rc.circuit.layout.clone().ok_or(NamError::NoLayout)?;
    let base = score_breakdown(&rc.circuit, cal)?;
    let candidates: Vec<Vec<usize>> = enumerate_placements(rc, map, cfg.seed)
        .into_iter()
        .filter(|l| *l != identity)
        .take(cfg.trials)
        .collect();
    let scored = candidates
        .par_iter()
        .map(|l| {
            let moved = relabel(rc, l, map.num_qubits())?;
            let b = score_breakdown(&moved.circuit, cal)?;
            Ok((moved, b))
        })
        .collect::<Result<Vec<_>, NamError>>()?;

    let mut best: (RoutedCircuit, FidelityBreakdown, Option<usize>) = (rc.clone(), base, None);
    let mut best_cx = cx_count(rc);
    let mut log = Vec::with_capacity(scored.len());
    for (i, (moved, b)) in scored.into_iter().enumerate() {
        let cx = cx_count(&moved);
        let accepted = cx <= best_cx && b.score > best.1.score;
        log.push(Trial {
            index: i,
            layout: candidates[i].clone(),
            score: b.score,
            cx,
            accepted,
        });
        if accepted {
            best_cx = cx;
            best = (moved, b, Some(i));
        }
    }
    let (routed, breakdown, trial) = best;
    let result = MatchResult {
        layout: routed
            .circuit
            .layout
            .clone()
            .expect("relabelled circuits carry a layout"),
        score: breakdown.score,
        breakdown,
        cx: best_cx,
        trial,
        identity_score: base.score,
        trials: log,
    };
    Ok(NamOutput { routed, result })
}
