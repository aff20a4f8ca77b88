//! Basis lowering and peephole optimisation of bound circuits.

mod commute;
mod decompose;
mod optimize_1q;
mod simple;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::compute_metrics;
use crate::circuit::{Circuit, CircuitError};

pub use commute::commutative_cancellation;
pub use decompose::decompose_to_basis;
pub use optimize_1q::optimize_1q;
pub use simple::{cx_cancellation, remove_diagonal_before_measure, remove_reset_in_zero_state};

/// Safety cap on pass-sequence sweeps within one candidate.
const MAX_SWEEPS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pass {
    Decompose,
    Optimize1q,
    CommutativeCancellation,
    CxCancellation,
    RemoveDiagonalBeforeMeasure,
    RemoveResetInZeroState,
}

impl Pass {
    pub const DEFAULT_ORDER: [Pass; 6] = [
        Pass::Decompose,
        Pass::Optimize1q,
        Pass::CommutativeCancellation,
        Pass::CxCancellation,
        Pass::RemoveDiagonalBeforeMeasure,
        Pass::RemoveResetInZeroState,
    ];

    pub fn run(self, c: &Circuit, seed: u64, eps: f64) -> Circuit {
        match self {
            Pass::Decompose => decompose_to_basis(c),
            Pass::Optimize1q => optimize_1q(c, eps),
            Pass::CommutativeCancellation => commutative_cancellation(c, seed, eps),
            Pass::CxCancellation => cx_cancellation(c),
            Pass::RemoveDiagonalBeforeMeasure => remove_diagonal_before_measure(c),
            Pass::RemoveResetInZeroState => remove_reset_in_zero_state(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassConfig {
    pub repeats: usize,
    pub order: Vec<Pass>,
    pub angle_eps: f64,
    pub seed: u64,
}

impl Default for PassConfig {
    fn default() -> Self {
        Self {
            repeats: 15,
            order: Pass::DEFAULT_ORDER.to_vec(),
            angle_eps: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PassError {
    #[error("repeat count must be at least 1")]
    NoRepeats,
    #[error("angle tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

impl PassConfig {
    pub fn validate(&self) -> Result<(), PassError> {
        if self.repeats == 0 {
            return Err(PassError::NoRepeats);
        }
        if !(self.angle_eps > 0.0) {
            return Err(PassError::BadTolerance(self.angle_eps));
        }
        Ok(())
    }
}

/// Run the pass list until a full sweep changes nothing.
pub fn run_to_fixpoint(c: &Circuit, order: &[Pass], seed: u64, eps: f64) -> Circuit {
    let mut cur = c.clone();
    for _ in 0..MAX_SWEEPS {
        let next = order
            .iter()
            .fold(cur.clone(), |acc, p| p.run(&acc, seed, eps));
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn rank(c: &Circuit) -> Result<(usize, usize, usize), CircuitError> {
    let m = compute_metrics(c, None)?;
    Ok((m.cx, m.gates, m.depth))
}

/// Bind, lower and optimise. Each round runs `repeats` seeded candidates from the current
/// circuit and moves to the best one by `(cx, gates, depth, candidate index)` when it is
/// strictly smaller; the loop stops once no candidate improves, which makes the output a
/// fixpoint of this function.
pub fn do_pipeline(
    c: &Circuit,
    binding: &HashMap<String, f64>,
    cfg: &PassConfig,
) -> Result<Circuit, PassError> {
    cfg.validate()?;
    let bound = c.bind_parameters(binding)?;
    bound.ensure_valid()?;
    let mut cur = decompose_to_basis(&bound);
    let mut cur_rank = rank(&cur)?;
    loop {
        let candidates: Vec<Circuit> = (0..cfg.repeats as u64)
            .into_par_iter()
            .map(|r| run_to_fixpoint(&cur, &cfg.order, cfg.seed.wrapping_add(r), cfg.angle_eps))
            .collect();
        let mut best: Option<((usize, usize, usize), Circuit)> = None;
        for cand in candidates {
            let r = rank(&cand)?;
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                best = Some((r, cand));
            }
        }
        let (r, cand) = best.expect("at least one repeat");
        if r < cur_rank {
            cur = cand;
            cur_rank = r;
        } else {
            return Ok(cur);
        }
    }
}
