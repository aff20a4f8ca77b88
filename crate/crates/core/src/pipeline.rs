//! The staged flow: place and route once, re-match whenever calibration drifts, then bind
//! and optimise each parameter set on the current placement.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{compute_metrics, Circuit, CircuitError, CircuitMetrics};
use crate::cost::StageTimes;
use crate::nam::{nam, MatchResult, NamConfig, NamError, NamOutput};
use crate::passes::{do_pipeline, PassConfig, PassError};
use crate::tapt::{tapt, TaptConfig, TaptError, TaptOutput};
use crate::topology::{
    drift_check, get_fidelity, CalibrationSnapshot, CouplingMap, DriftPolicy, TopologyError,
};

pub type Binding = HashMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub tapt: TaptConfig,
    pub nam: NamConfig,
    pub passes: PassConfig,
    pub drift_delta: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tapt: TaptConfig::default(),
            nam: NamConfig::default(),
            passes: PassConfig::default(),
            drift_delta: 0.01,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("at least one calibration snapshot is required")]
    NoSnapshots,
    #[error(transparent)]
    Tapt(#[from] TaptError),
    #[error(transparent)]
    Nam(#[from] NamError),
    #[error(transparent)]
    Passes(#[from] PassError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// What happened when a snapshot arrived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub index: usize,
    pub timestamp: String,
    /// `None` for the first snapshot, which is always matched.
    pub drift: Option<bool>,
    pub rematched: bool,
    /// Score of the deployed circuit under this snapshot, before any re-match.
    pub deployed_score: Option<f64>,
    pub score: f64,
    pub layout: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub binding: usize,
    pub snapshot: usize,
    pub layout: Vec<usize>,
    pub score: f64,
    pub metrics: CircuitMetrics,
}

/// Wall-clock seconds per stage invocation. Kept apart from the reproducible outputs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub tapt: Vec<f64>,
    pub nam: Vec<f64>,
    pub r#do: Vec<f64>,
}

impl StageTimings {
    pub fn means(&self) -> StageTimes {
        StageTimes::from_samples(&self.tapt, &self.nam, &self.r#do)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub tapt: TaptOutput,
    /// One entry per re-match, with the index of the snapshot that triggered it.
    pub matches: Vec<(usize, NamOutput)>,
    pub snapshots: Vec<SnapshotRecord>,
    pub finals: Vec<Circuit>,
    pub bound: Vec<BoundRecord>,
    pub timings: StageTimings,
}

impl PipelineOutput {
    pub fn match_results(&self) -> Vec<&MatchResult> {
        self.matches.iter().map(|(_, m)| &m.result).collect()
    }
}

/// Snapshot in force for binding `j` of `m` when `k` snapshots arrive evenly over the run.
pub fn snapshot_for(j: usize, m: usize, k: usize) -> usize {
    if m == 0 {
        0
    } else {
        (j * k / m).min(k - 1)
    }
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

/// Run the whole flow. Snapshots are taken in timestamp order; the first is always matched and
/// every later one re-matches only when the deployed circuit's score drifts by more than
/// `cfg.drift_delta` relative to the snapshot it was matched under. Binding `j` of `M` runs
/// on the placement in force at snapshot `snapshot_for(j, M, K)`.
pub fn transpile(
    c: &Circuit,
    map: &CouplingMap,
    snapshots: &[CalibrationSnapshot],
    bindings: &[Binding],
    cfg: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    if snapshots.is_empty() {
        return Err(PipelineError::NoSnapshots);
    }
    let policy = DriftPolicy::new(cfg.drift_delta)?;
    let mut snaps: Vec<&CalibrationSnapshot> = snapshots.iter().collect();
    snaps.sort_by_key(|s| s.timestamp);
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let pre = tapt(c, map, &cfg.tapt)?;
    timings.tapt.push(secs(t));

    let mut matches: Vec<(usize, NamOutput)> = Vec::new();
    let mut records = Vec::new();
    // Index into `matches` of the deployed placement after each snapshot.
    let mut deployed_at = Vec::with_capacity(snaps.len());
    let mut star = 0usize;
    for (k, snap) in snaps.iter().enumerate() {
        let (drift, deployed_score) = match matches.last() {
            None => (None, None),
            Some((_, d)) => {
                let circ = &d.routed.circuit;
                (
                    Some(drift_check(circ, snaps[star], snap, policy)?),
                    Some(get_fidelity(circ, snap)?),
                )
            }
        };
        let rematch = drift.is_none_or(|d| d);
        if rematch {
            let t = Instant::now();
            let out = nam(&pre.routed, map, snap, &cfg.nam)?;
            timings.nam.push(secs(t));
            matches.push((k, out));
            star = k;
        }
        let cur = &matches.last().expect("first snapshot is always matched").1;
        records.push(SnapshotRecord {
            index: k,
            timestamp: snap.timestamp.to_rfc3339(),
            drift,
            rematched: rematch,
            deployed_score,
            score: get_fidelity(&cur.routed.circuit, snap)?,
            layout: cur.result.layout.clone(),
        });
        deployed_at.push(matches.len() - 1);
    }

    let mut finals = Vec::with_capacity(bindings.len());
    let mut bound = Vec::with_capacity(bindings.len());
    for (j, b) in bindings.iter().enumerate() {
        let k = snapshot_for(j, bindings.len(), snaps.len());
        let deployed = &matches[deployed_at[k]].1;
        let t = Instant::now();
        let fin = do_pipeline(&deployed.routed.circuit, b, &cfg.passes)?;
        timings.r#do.push(secs(t));
        bound.push(BoundRecord {
            binding: j,
            snapshot: k,
            layout: deployed.result.layout.clone(),
            score: get_fidelity(&fin, snaps[k])?,
            metrics: compute_metrics(&fin, Some(c))?,
        });
        finals.push(fin);
    }
    Ok(PipelineOutput {
        tapt: pre,
        matches,
        snapshots: records,
        finals,
        bound,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qaoa::{binding, build_ansatz, PortfolioInstance};
    use chrono::DateTime;

    #[test]
    fn window_assignment() {
        let got: Vec<usize> = (0..6).map(|j| snapshot_for(j, 6, 3)).collect();
        assert_eq!(got, vec![0, 0, 1, 1, 2, 2]);
        assert_eq!(snapshot_for(4, 5, 1), 0);
    }

    #[test]
    fn identical_snapshots_match_once() {
        let map = CouplingMap::heavy_hex_27();
        let t0 = DateTime::parse_from_rfc3339("2024-01-01T00:00:00Z").unwrap();
        let t1 = DateTime::parse_from_rfc3339("2024-01-02T00:00:00Z").unwrap();
        let a = CalibrationSnapshot::uniform(&map, t0, 0.999, 0.99, 0.97);
        let b = CalibrationSnapshot {
            timestamp: t1,
            ..a.clone()
        };
        let ansatz = build_ansatz(&PortfolioInstance::bundled(), 1);
        let out = transpile(
            &ansatz,
            &map,
            &[b, a],
            &[binding(&[0.3], &[0.7])],
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(out.matches.len(), 1);
        assert_eq!(out.snapshots[1].drift, Some(false));
        assert_eq!(out.finals.len(), 1);
        assert_eq!(out.timings.nam.len(), 1);
    }
}
