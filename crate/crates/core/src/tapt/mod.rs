//! Noise-unaware placement and exact swap routing, run once per ansatz.
//!
//! The flow is: partition into two-qubit blocks, place the interacting qubits, insert swaps
//! between blocks with a depth-minimal search, elide trailing swaps, lower the remaining swaps
//! to cx with cancellation, and drop idle wires.

mod blocks;
mod finalize;
mod placement;
mod routing;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{compute_metrics, Circuit, CircuitError, CircuitMetrics};
use crate::topology::CouplingMap;

pub use blocks::{partition_blocks, Block, BlockKind, Op, Partition};
pub use finalize::{decompose_and_cancel, elide_final_swaps, remove_idle_wires};
pub use placement::{initial_mapping, placement_candidates, satisfied_edges, Mapping, Placements};
use routing::Windowed;
pub use routing::{route_optimal, RoutedCircuit, RoutingStatus, Step};

pub const DEFAULT_PLACEMENT_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaptConfig {
    /// Reject results whose cx increase (percent) exceeds this and retry with a new seed.
    pub cx_max_increase: Option<f64>,
    pub max_retries: usize,
    pub seed: u64,
    /// Wall-clock budget for the exact search per routing call.
    pub time_budget_secs: f64,
    /// Cap on expanded search states per routing call.
    pub max_states: usize,
    /// Increment of the depth bound between deepening rounds.
    pub depth_step: usize,
    /// Hops around the placed qubits that routing may also move through.
    pub region_margin: usize,
    /// Number of distinct optimal placements routed per attempt.
    pub placement_candidates: usize,
    pub placement_budget: usize,
}

impl Default for TaptConfig {
    fn default() -> Self {
        Self {
            cx_max_increase: None,
            max_retries: 20,
            seed: 0,
            time_budget_secs: 30.0,
            max_states: 2_000_000,
            depth_step: 1,
            region_margin: 1,
            placement_candidates: 4,
            placement_budget: DEFAULT_PLACEMENT_BUDGET,
        }
    }
}

impl TaptConfig {
    pub fn validate(&self) -> Result<(), TaptError> {
        if let Some(m) = self.cx_max_increase {
            if !(m >= 0.0) {
                return Err(TaptError::BadConfig(format!(
                    "cx increase bound {m} is negative"
                )));
            }
        }
        if !(self.time_budget_secs > 0.0) {
            return Err(TaptError::BadConfig("time budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaptReport {
    pub status: RoutingStatus,
    pub seed: u64,
    pub retries_used: usize,
    pub block_depth: usize,
    pub proven_depth_bound: usize,
    pub states_explored: usize,
    pub placements_tried: usize,
    pub placement_exact: bool,
    pub satisfied_edges: usize,
    pub swaps_inserted: usize,
    pub swaps_elided: usize,
    pub metrics: CircuitMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaptOutput {
    pub routed: RoutedCircuit,
    pub report: TaptReport,
}

#[derive(Debug, Error)]
pub enum TaptError {
    #[error("{logical} logical qubits do not fit on {physical} physical qubits")]
    Capacity { logical: usize, physical: usize },
    #[error("placed qubits {a} and {b} lie in different components of the coupling map")]
    Disconnected { a: usize, b: usize },
    #[error("routing failed: {0}")]
    RoutingFailed(String),
    #[error("no attempt met the cx increase bound of {bound}% (best {best_pct:.2}%)")]
    CxBoundUnsatisfiable {
        bound: f64,
        best_pct: f64,
        best: Box<TaptOutput>,
    },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

fn cx_increase(m: &CircuitMetrics) -> f64 {
    m.delta.as_ref().and_then(|d| d.cx_pct).unwrap_or(0.0)
}

/// Route every placement candidate with a shared depth bound that grows until at least one
/// candidate fits, so no candidate is searched deeper than the best one needs.
fn route_candidates(
    p: &Partition,
    mappings: &[Mapping],
    map: &CouplingMap,
    cfg: &TaptConfig,
) -> Result<Vec<(usize, RoutedCircuit)>, TaptError> {
    let mut routed: Vec<Option<RoutedCircuit>> = vec![None; mappings.len()];
    let mut states = vec![0usize; mappings.len()];
    let step = cfg.depth_step.max(1);
    let mut lo = 0;
    loop {
        let hi = lo + step - 1;
        let mut proven = false;
        for (i, m) in mappings.iter().enumerate() {
            if routed[i].is_some() {
                continue;
            }
            match routing::route_window(p, m, map, cfg, lo, hi)? {
                Windowed::Done(mut r) => {
                    states[i] += r.states_explored;
                    r.states_explored = states[i];
                    proven |= r.status == RoutingStatus::Optimal;
                    routed[i] = Some(r);
                }
                Windowed::Deeper(n) => states[i] += n,
            }
        }
        if proven || routed.iter().all(Option::is_some) {
            break;
        }
        lo = hi + 1;
    }
    Ok(routed
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .collect())
}

fn attempt(
    c: &Circuit,
    p: &Partition,
    map: &CouplingMap,
    cfg: &TaptConfig,
    seed: u64,
) -> Result<TaptOutput, TaptError> {
    let placements = placement_candidates(
        &p.interaction,
        map,
        seed,
        cfg.placement_candidates,
        cfg.placement_budget,
    )?;
    let mut best: Option<((usize, usize, usize), TaptOutput)> = None;
    for (_, routed) in route_candidates(p, &placements.mappings, map, cfg)? {
        let inserted = routed.steps.iter().map(|s| s.swaps.len()).sum();
        let (elided, n_elided) = elide_final_swaps(&routed);
        let out = remove_idle_wires(&decompose_and_cancel(&elided));
        let metrics = compute_metrics(&out.circuit, Some(c))?;
        let rank = (out.block_depth, metrics.cx, metrics.depth);
        if best.as_ref().is_none_or(|(r, _)| rank < *r) {
            let report = TaptReport {
                status: out.status,
                seed,
                retries_used: 0,
                block_depth: out.block_depth,
                proven_depth_bound: out.proven_depth_bound,
                states_explored: out.states_explored,
                placements_tried: placements.mappings.len(),
                placement_exact: placements.exact,
                satisfied_edges: placements.satisfied,
                swaps_inserted: inserted,
                swaps_elided: n_elided,
                metrics,
            };
            best = Some((
                rank,
                TaptOutput {
                    routed: out,
                    report,
                },
            ));
        }
    }
    Ok(best
        .expect("placement search returns at least one mapping")
        .1)
}

/// Place, route and clean up `c` for `map`. When a cx increase bound is set, results above
/// it are discarded and the whole flow reruns with the next seed, up to `max_retries` times.
pub fn tapt(c: &Circuit, map: &CouplingMap, cfg: &TaptConfig) -> Result<TaptOutput, TaptError> {
    cfg.validate()?;
    c.ensure_valid()?;
    let p = Partition::new(c);
    let mut best: Option<TaptOutput> = None;
    let tries = if cfg.cx_max_increase.is_some() {
        cfg.max_retries + 1
    } else {
        1
    };
    for k in 0..tries {
        let seed = cfg.seed.wrapping_add(k as u64);
        let mut out = attempt(c, &p, map, cfg, seed)?;
        out.report.retries_used = k;
        let inc = cx_increase(&out.report.metrics);
        match cfg.cx_max_increase {
            Some(bound) if inc > bound + 1e-9 => {
                if best
                    .as_ref()
                    .is_none_or(|b| inc < cx_increase(&b.report.metrics))
                {
                    best = Some(out);
                }
            }
            _ => return Ok(out),
        }
    }
    let best = best.expect("at least one attempt ran");
    Err(TaptError::CxBoundUnsatisfiable {
        bound: cfg.cx_max_increase.unwrap_or_default(),
        best_pct: cx_increase(&best.report.metrics),
        best: Box::new(best),
    })
}
