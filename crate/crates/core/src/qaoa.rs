//! Portfolio-selection QAOA: instance model, ansatz construction, scoring and grid search.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, ParamExpr};
use crate::sim::{sample_counts, simulate, state_fidelity, NoiseChannel, NoiseKind, SimError};

/// Two costs closer than this count as equal when picking optimal selections.
const COST_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum QaoaError {
    #[error("invalid instance: {0}")]
    BadInstance(String),
    #[error("bitstring has {found} entries, instance has {expected} assets")]
    LengthMismatch { expected: usize, found: usize },
    #[error("no counts to evaluate")]
    EmptyCounts,
    #[error("grid search supports depth 1 only, got {0}")]
    UnsupportedGrid(usize),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    #[serde(rename = "B")]
    budget: usize,
    q: f64,
    returns: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

/// Select `budget` of `n` assets minimising `q z'Sz - (1-q) mu'z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct PortfolioInstance {
    n: usize,
    budget: usize,
    q: f64,
    returns: Vec<f64>,
    covariance: Vec<Vec<f64>>,
    f_min: f64,
    f_max: f64,
}

impl From<PortfolioInstance> for RawInstance {
    fn from(p: PortfolioInstance) -> Self {
        RawInstance {
            n: p.n,
            budget: p.budget,
            q: p.q,
            returns: p.returns,
            covariance: p.covariance,
        }
    }
}

impl TryFrom<RawInstance> for PortfolioInstance {
    type Error = QaoaError;
    fn try_from(r: RawInstance) -> Result<Self, QaoaError> {
        PortfolioInstance::new(r.budget, r.q, r.returns, r.covariance)
    }
}

impl PortfolioInstance {
    pub fn new(
        budget: usize,
        q: f64,
        returns: Vec<f64>,
        covariance: Vec<Vec<f64>>,
    ) -> Result<Self, QaoaError> {
        let n = returns.len();
        let bad = |m: String| Err(QaoaError::BadInstance(m));
        if n == 0 || n > 20 {
            return bad(format!("{n} assets; supported range is 1..=20"));
        }
        if budget == 0 || budget > n {
            return bad(format!("budget {budget} outside 1..={n}"));
        }
        if !(0.0..=1.0).contains(&q) {
            return bad(format!("risk weight {q} outside [0, 1]"));
        }
        if covariance.len() != n || covariance.iter().any(|r| r.len() != n) {
            return bad("covariance must be n x n".into());
        }
        for i in 0..n {
            for j in 0..n {
                if (covariance[i][j] - covariance[j][i]).abs() > 1e-12 {
                    return bad(format!("covariance not symmetric at ({i}, {j})"));
                }
            }
        }
        let mut inst = PortfolioInstance {
            n,
            budget,
            q,
            returns,
            covariance,
            f_min: 0.0,
            f_max: 0.0,
        };
        let feasible: Vec<f64> = (0usize..1 << n)
            .filter(|z| z.count_ones() as usize == budget)
            .map(|z| inst.cost_index(z))
            .collect();
        inst.f_min = feasible.iter().copied().fold(f64::INFINITY, f64::min);
        inst.f_max = feasible.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(inst)
    }

    /// The five-asset instance shipped with the crate.
    pub fn bundled() -> Self {
        serde_json::from_str(include_str!("../data/portfolio_5.json"))
            .expect("bundled instance is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, QaoaError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    /// Cost of a selection given as an index whose bit `i` is `z_i`.
    pub fn cost_index(&self, z: usize) -> f64 {
        let on: Vec<usize> = (0..self.n).filter(|&i| z >> i & 1 == 1).collect();
        let risk: f64 = on
            .iter()
            .flat_map(|&i| on.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.covariance[i][j])
            .sum();
        let ret: f64 = on.iter().map(|&i| self.returns[i]).sum();
        self.q * risk - (1.0 - self.q) * ret
    }

    pub fn cost(&self, z: &[u8]) -> Result<f64, QaoaError> {
        Ok(self.cost_index(self.index_of(z)?))
    }

    fn index_of(&self, z: &[u8]) -> Result<usize, QaoaError> {
        if z.len() != self.n {
            return Err(QaoaError::LengthMismatch {
                expected: self.n,
                found: z.len(),
            });
        }
        Ok(z.iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as usize & 1) << i)))
    }

    fn feasible(&self, z: usize) -> bool {
        z.count_ones() as usize == self.budget
    }

    /// Approximation ratio of a selection index; 0 for the wrong cardinality and 1 for every
    /// feasible selection when all feasible costs coincide.
    pub fn approximation_ratio_index(&self, z: usize) -> f64 {
        if !self.feasible(z) {
            return 0.0;
        }
        let span = self.f_min - self.f_max;
        if span.abs() < COST_TOL {
            return 1.0;
        }
        ((self.cost_index(z) - self.f_max) / span).clamp(0.0, 1.0)
    }

    pub fn approximation_ratio(&self, z: &[u8]) -> Result<f64, QaoaError> {
        Ok(self.approximation_ratio_index(self.index_of(z)?))
    }

    pub fn is_optimal_index(&self, z: usize) -> bool {
        self.feasible(z) && (self.cost_index(z) - self.f_min).abs() <= COST_TOL
    }

    /// Ising coefficients `(J, h)` of the cost with `z_i = (1 - Z_i) / 2`, constant dropped.
    pub fn ising(&self) -> (Vec<(usize, usize, f64)>, Vec<f64>) {
        let n = self.n;
        let mut couplings = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.q * self.covariance[i][j] / 2.0;
                if w != 0.0 {
                    couplings.push((i, j, w));
                }
            }
        }
        let fields = (0..n)
            .map(|i| {
                let row: f64 = self.covariance[i].iter().sum();
                -self.q * row / 2.0 + (1.0 - self.q) * self.returns[i] / 2.0
            })
            .collect();
        (couplings, fields)
    }
}

/// Round-robin ordering of all pairs of `n` items: each round is a matching.
fn round_robin(n: usize) -> Vec<(usize, usize)> {
    let m = if n % 2 == 0 { n } else { n + 1 };
    let mut ring: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    for _ in 0..m.saturating_sub(1) {
        for k in 0..m / 2 {
            let (a, b) = (ring[k], ring[m - 1 - k]);
            if a < n && b < n {
                out.push((a.min(b), a.max(b)));
            }
        }
        ring[1..].rotate_right(1);
    }
    out
}

pub fn gamma_name(layer: usize) -> String {
    format!("gamma_{layer}")
}

pub fn beta_name(layer: usize) -> String {
    format!("beta_{layer}")
}

/// QAOA ansatz with symbols `gamma_1..p`, `beta_1..p`. Couplings are emitted in round-robin
/// order so each round of ZZ blocks acts on disjoint pairs.
pub fn build_ansatz(inst: &PortfolioInstance, p: usize) -> Circuit {
    let n = inst.n;
    let (couplings, fields) = inst.ising();
    let weight: HashMap<(usize, usize), f64> =
        couplings.iter().map(|&(i, j, w)| ((i, j), w)).collect();
    let mut c = Circuit::new(n, n).with_name(format!("qaoa_portfolio_n{n}_p{p}"));
    for q in 0..n {
        c.push(Gate::h(q));
    }
    for layer in 1..=p {
        let g = gamma_name(layer);
        for (i, j) in round_robin(n) {
            if let Some(&w) = weight.get(&(i, j)) {
                c.push(Gate::cx(i, j))
                    .push(Gate::rz(j, ParamExpr::linear(2.0 * w, &g, 0.0)))
                    .push(Gate::cx(i, j));
            }
        }
        for (q, &h) in fields.iter().enumerate() {
            if h != 0.0 {
                c.push(Gate::rz(q, ParamExpr::linear(2.0 * h, &g, 0.0)));
            }
        }
        for q in 0..n {
            c.push(Gate::rx(q, ParamExpr::linear(2.0, beta_name(layer), 0.0)));
        }
    }
    for q in 0..n {
        c.push(Gate::measure(q, q));
    }
    c
}

pub fn binding(gammas: &[f64], betas: &[f64]) -> HashMap<String, f64> {
    let mut b = HashMap::new();
    for (k, &g) in gammas.iter().enumerate() {
        b.insert(gamma_name(k + 1), g);
    }
    for (k, &x) in betas.iter().enumerate() {
        b.insert(beta_name(k + 1), x);
    }
    b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub expectation: f64,
    pub approximation_ratio: f64,
    pub success_probability: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, usize>,
}

/// Score an outcome distribution indexed by selection (bit `i` = asset `i`).
pub fn evaluate_distribution(
    inst: &PortfolioInstance,
    dist: &[f64],
) -> Result<EvaluationResult, QaoaError> {
    if dist.len() != 1 << inst.n {
        return Err(QaoaError::LengthMismatch {
            expected: 1 << inst.n,
            found: dist.len(),
        });
    }
    let total: f64 = dist.iter().sum();
    if !(total > 0.0) {
        return Err(QaoaError::EmptyCounts);
    }
    let (mut e, mut ar, mut sp) = (0.0, 0.0, 0.0);
    for (z, &p) in dist.iter().enumerate() {
        let p = p / total;
        e += p * inst.cost_index(z);
        ar += p * inst.approximation_ratio_index(z);
        if inst.is_optimal_index(z) {
            sp += p;
        }
    }
    Ok(EvaluationResult {
        expectation: e,
        approximation_ratio: ar,
        success_probability: sp.min(1.0),
        counts: BTreeMap::new(),
    })
}

pub fn evaluate_counts(
    inst: &PortfolioInstance,
    counts: &BTreeMap<usize, usize>,
) -> Result<EvaluationResult, QaoaError> {
    let shots: usize = counts.values().sum();
    if shots == 0 {
        return Err(QaoaError::EmptyCounts);
    }
    let mut dist = vec![0.0; 1 << inst.n];
    for (&z, &k) in counts {
        if z >= dist.len() {
            return Err(QaoaError::LengthMismatch {
                expected: inst.n,
                found: usize::BITS as usize - z.leading_zeros() as usize,
            });
        }
        dist[z] += k as f64;
    }
    let mut r = evaluate_distribution(inst, &dist)?;
    r.counts = crate::sim::counts_to_bitstrings(counts, inst.n);
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridAxis {
    /// Points `start + k*step` strictly below `stop`.
    pub fn points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let v = self.start + k as f64 * self.step;
            if v >= self.stop - 1e-12 {
                break;
            }
            out.push(v);
            k += 1;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    pub p: usize,
    pub gamma: GridAxis,
    pub beta: GridAxis,
    pub shots: usize,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            p: 1,
            gamma: GridAxis {
                start: 0.0,
                stop: 2.0 * PI,
                step: 0.1,
            },
            beta: GridAxis {
                start: 0.0,
                stop: PI,
                step: 0.1,
            },
            shots: 10_000,
        }
    }
}

impl QaoaConfig {
    pub fn validate(&self) -> Result<(), QaoaError> {
        if self.p == 0 {
            return Err(QaoaError::BadConfig("depth p must be at least 1".into()));
        }
        if !(self.gamma.step > 0.0 && self.beta.step > 0.0) {
            return Err(QaoaError::BadConfig("grid step must be positive".into()));
        }
        if self.shots == 0 {
            return Err(QaoaError::BadConfig("shot count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub gamma: f64,
    pub beta: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub gamma: f64,
    pub beta: f64,
    pub energy: f64,
    pub landscape: Vec<LandscapePoint>,
}

/// Exact outcome distribution of the bound ansatz under `channel`.
pub fn ansatz_distribution(
    ansatz: &Circuit,
    gammas: &[f64],
    betas: &[f64],
    channel: &NoiseChannel,
) -> Result<Vec<f64>, QaoaError> {
    let bound = ansatz
        .bind_parameters(&binding(gammas, betas))
        .map_err(SimError::from)?;
    Ok(simulate(&bound, channel)?.distribution)
}

/// Exhaustive depth-1 scan. The minimum energy wins; ties go to the first point in
/// (gamma, beta) order.
pub fn grid_search(
    inst: &PortfolioInstance,
    cfg: &QaoaConfig,
    channel: &NoiseChannel,
) -> Result<GridResult, QaoaError> {
    cfg.validate()?;
    if cfg.p != 1 {
        return Err(QaoaError::UnsupportedGrid(cfg.p));
    }
    let ansatz = build_ansatz(inst, 1);
    let cells: Vec<(f64, f64)> = cfg
        .gamma
        .points()
        .into_iter()
        .flat_map(|g| cfg.beta.points().into_iter().map(move |b| (g, b)))
        .collect();
    if cells.is_empty() {
        return Err(QaoaError::BadConfig("empty grid".into()));
    }
    let landscape = cells
        .par_iter()
        .map(|&(g, b)| {
            let dist = ansatz_distribution(&ansatz, &[g], &[b], channel)?;
            Ok(LandscapePoint {
                gamma: g,
                beta: b,
                energy: evaluate_distribution(inst, &dist)?.expectation,
            })
        })
        .collect::<Result<Vec<_>, QaoaError>>()?;
    let best = landscape.iter().fold(
        &landscape[0],
        |acc, x| if x.energy < acc.energy { x } else { acc },
    );
    Ok(GridResult {
        gamma: best.gamma,
        beta: best.beta,
        energy: best.energy,
        landscape: landscape.clone(),
    })
}

pub fn write_landscape_csv<W: Write>(w: W, landscape: &[LandscapePoint]) -> Result<(), QaoaError> {
    let mut out = csv::Writer::from_writer(w);
    for p in landscape {
        out.serialize(p)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub channel: NoiseKind,
    pub lambda: f64,
    pub fidelity: f64,
    pub approximation_ratio: f64,
    pub success_probability: f64,
}

/// Noise-rate sweep at fixed angles: state fidelity against the noiseless run plus AR and SP
/// estimated from `shots` samples.
pub fn noise_sweep(
    inst: &PortfolioInstance,
    gammas: &[f64],
    betas: &[f64],
    kinds: &[NoiseKind],
    lambdas: &[f64],
    shots: usize,
    seed: u64,
) -> Result<Vec<SweepRow>, QaoaError> {
    let ansatz = build_ansatz(inst, gammas.len());
    let bound = ansatz
        .bind_parameters(&binding(gammas, betas))
        .map_err(SimError::from)?;
    let ideal = simulate(&bound, &NoiseChannel::none())?;
    let jobs: Vec<(NoiseKind, f64)> = kinds
        .iter()
        .flat_map(|&k| lambdas.iter().map(move |&l| (k, l)))
        .collect();
    jobs.par_iter()
        .map(|&(kind, lambda)| {
            let noisy = simulate(&bound, &NoiseChannel::new(kind, lambda)?)?;
            let fidelity = state_fidelity(&ideal.state, &noisy.state)?;
            let counts = sample_counts(&noisy.distribution, shots, seed)?;
            let r = evaluate_counts(inst, &counts)?;
            Ok(SweepRow {
                channel: kind,
                lambda,
                fidelity,
                approximation_ratio: r.approximation_ratio,
                success_probability: r.success_probability,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<(), QaoaError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::compute_metrics;

    #[test]
    fn bundled_ansatz_shape() {
        let c = build_ansatz(&PortfolioInstance::bundled(), 1);
        let m = compute_metrics(&c, None).unwrap();
        assert_eq!((m.depth, m.gates, m.cx, m.measures), (19, 50, 20, 5));
    }

    #[test]
    fn round_robin_covers_pairs_in_matchings() {
        let pairs = round_robin(5);
        assert_eq!(pairs.len(), 10);
        for chunk in pairs.chunks(2) {
            let (a, b) = (chunk[0], chunk[1]);
            assert!(a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1);
        }
    }

    #[test]
    fn plug_in_cost() {
        let inst =
            PortfolioInstance::new(1, 0.5, vec![1.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
                .unwrap();
        assert_eq!(inst.cost(&[1, 0]).unwrap(), 0.0);
        assert_eq!(inst.cost(&[0, 0]).unwrap(), 0.0);
        assert!(matches!(
            inst.cost(&[1]),
            Err(QaoaError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn ratio_endpoints() {
        let inst = PortfolioInstance::bundled();
        let best = (0..32).find(|&z| inst.is_optimal_index(z)).unwrap();
        assert_eq!(inst.approximation_ratio_index(best), 1.0);
        assert_eq!(inst.approximation_ratio_index(0b111), 0.0);
        let worst = (0..32)
            .filter(|z: &usize| z.count_ones() == 2)
            .max_by(|a, b| inst.cost_index(*a).total_cmp(&inst.cost_index(*b)))
            .unwrap();
        assert_eq!(inst.approximation_ratio_index(worst), 0.0);
    }

    #[test]
    fn zero_angles_give_uniform_outcomes() {
        let inst = PortfolioInstance::bundled();
        let d = ansatz_distribution(
            &build_ansatz(&inst, 1),
            &[0.0],
            &[0.0],
            &NoiseChannel::none(),
        )
        .unwrap();
        assert!(d.iter().all(|p| (p - 1.0 / 32.0).abs() < 1e-9));
    }

    #[test]
    fn p2_doubles_the_layer() {
        let inst = PortfolioInstance::bundled();
        let g1 = build_ansatz(&inst, 1).gates.len();
        let g2 = build_ansatz(&inst, 2).gates.len();
        assert_eq!(g2 - 10, 2 * (g1 - 10));
    }

    #[test]
    fn grid_rejects_depth_two() {
        let cfg = QaoaConfig {
            p: 2,
            ..QaoaConfig::default()
        };
        let e =
            grid_search(&PortfolioInstance::bundled(), &cfg, &NoiseChannel::none()).unwrap_err();
        assert!(matches!(e, QaoaError::UnsupportedGrid(2)));
    }
}
