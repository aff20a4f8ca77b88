#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use catp_core::circuit::{Circuit, Gate, GateKind, ParamExpr};
use catp_core::topology::CalibrationSnapshot;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn angle(r: &mut ChaCha8Rng) -> f64 {
    r.random_range(-6.5..6.5)
}

/// Random bound circuit on `n` qubits from the full gate vocabulary, every qubit measured to
/// the clbit of the same index at the end.
pub fn random_bound_circuit(r: &mut ChaCha8Rng, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n, n);
    for _ in 0..len {
        let q = r.random_range(0..n);
        let g = match r.random_range(0..9) {
            0 => Gate::x(q),
            1 => Gate::sx(q),
            2 => Gate::h(q),
            3 => Gate::rx(q, ParamExpr::literal(angle(r))),
            4 => Gate::ry(q, ParamExpr::literal(angle(r))),
            5 => Gate::rz(q, ParamExpr::literal(angle(r))),
            k if n > 1 => {
                let mut t = r.random_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                match k {
                    6 => Gate::cx(q, t),
                    7 => Gate::swap(q, t),
                    _ => {
                        // A ZZ interaction so routing sees the block pattern too.
                        c.push(Gate::cx(q, t))
                            .push(Gate::rz(t, ParamExpr::literal(angle(r))));
                        Gate::cx(q, t)
                    }
                }
            }
            _ => Gate::h(q),
        };
        c.push(g);
    }
    for q in 0..n {
        c.push(Gate::measure(q, q));
    }
    c
}

const SYMBOLS: [&str; 5] = ["theta", "gamma_1", "beta_1", "phi2", "a"];

fn random_param(r: &mut ChaCha8Rng) -> ParamExpr {
    match r.random_range(0..4) {
        0 => ParamExpr::literal(angle(r)),
        1 => ParamExpr::symbol(SYMBOLS[r.random_range(0..SYMBOLS.len())]),
        _ => {
            let coeff = if r.random_bool(0.3) { 1.0 } else { angle(r) };
            let offset = if r.random_bool(0.5) { 0.0 } else { angle(r) };
            ParamExpr::linear(coeff, SYMBOLS[r.random_range(0..SYMBOLS.len())], offset)
        }
    }
}

/// Random valid circuit exercising everything the text format carries: symbolic angles,
/// barriers, resets, measurements, names and layouts.
pub fn random_valid_circuit(r: &mut ChaCha8Rng) -> Circuit {
    let n = r.random_range(1..=6);
    let nc = r.random_range(0..=n);
    let mut c = Circuit::new(n, nc);
    if r.random_bool(0.3) {
        c = c.with_name(format!("fuzz_{}", r.random_range(0..1000)));
    }
    if r.random_bool(0.3) {
        let mut phys: Vec<usize> = (0..27).collect();
        for i in 0..n {
            let j = r.random_range(i..27);
            phys.swap(i, j);
        }
        c.layout = Some(phys[..n].to_vec());
    }
    for _ in 0..r.random_range(0..30) {
        let q = r.random_range(0..n);
        let two = n > 1 && r.random_bool(0.3);
        let g = if two {
            let mut t = r.random_range(0..n - 1);
            if t >= q {
                t += 1;
            }
            if r.random_bool(0.7) {
                Gate::cx(q, t)
            } else {
                Gate::swap(q, t)
            }
        } else {
            match r.random_range(0..9) {
                0 => Gate::x(q),
                1 => Gate::sx(q),
                2 => Gate::h(q),
                3 => Gate::rx(q, random_param(r)),
                4 => Gate::ry(q, random_param(r)),
                5 => Gate::rz(q, random_param(r)),
                6 => Gate::reset(q),
                _ => {
                    let mut qs: Vec<usize> = (0..n).filter(|_| r.random_bool(0.5)).collect();
                    if qs.is_empty() {
                        qs.push(q);
                    }
                    Gate::barrier(qs)
                }
            }
        };
        c.push(g);
    }
    // Measurement is terminal, so measured qubits only see measurements afterwards.
    if nc > 0 {
        for q in 0..n {
            if r.random_bool(0.5) {
                c.push(Gate::measure(q, r.random_range(0..nc)));
            }
        }
    }
    c
}

/// Monomorphisms of a path on `k` vertices into `adj`, by direct depth-first extension of
/// walks without repeated vertices.
pub fn paths_in(adj: &[Vec<usize>], k: usize) -> Vec<Vec<usize>> {
    fn rec(adj: &[Vec<usize>], k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap();
        for &w in &adj[last] {
            if !cur.contains(&w) {
                cur.push(w);
                rec(adj, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..adj.len() {
        rec(adj, k, &mut vec![s], &mut out);
    }
    out
}

/// Calibration score computed gate by gate with plain products, independent of the crate's
/// log-sum implementation.
pub fn plain_score(c: &Circuit, cal: &CalibrationSnapshot) -> f64 {
    let layout = c
        .layout
        .clone()
        .unwrap_or_else(|| (0..c.num_qubits).collect());
    let (mut u, mut cx, mut d) = (1.0, 1.0, 1.0);
    for g in &c.gates {
        match g.kind {
            GateKind::Barrier | GateKind::Reset => {}
            GateKind::Measure => d *= cal.readout[layout[g.qubits[0]]],
            GateKind::CX => {
                let (a, b) = (layout[g.qubits[0]], layout[g.qubits[1]]);
                cx *= cal.cx[&(a.min(b), a.max(b))];
            }
            GateKind::Swap => {
                let (a, b) = (layout[g.qubits[0]], layout[g.qubits[1]]);
                cx *= cal.cx[&(a.min(b), a.max(b))].powi(3);
            }
            _ => u *= cal.single_qubit[layout[g.qubits[0]]],
        }
    }
    (u + cx + d) / 3.0
}

/// Two-qubit routing job for the brute-force scheduler.
#[derive(Clone, Debug)]
pub struct Job {
    pub pair: (usize, usize),
    /// Diagonal jobs commute with each other.
    pub diagonal: bool,
}

/// Fewest time steps to run `jobs` on a device with adjacency `adj`, starting with logical
/// qubit `l` on physical qubit `start[l]`. In one step every physical qubit takes part in at
/// most one action: a swap along an edge, or a job whose two logical qubits sit on the ends of
/// an edge. A job may run once every earlier job it shares a qubit with is done, unless both
/// are diagonal. Plain breadth-first search over (placement, finished set).
pub fn brute_force_depth(adj: &[Vec<usize>], start: &[usize], jobs: &[Job]) -> usize {
    let nv = adj.len();
    let edges: Vec<(usize, usize)> = (0..nv)
        .flat_map(|u| adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
        .collect();
    let all_done = (1u64 << jobs.len()) - 1;
    // occupant[p] = logical on p, or usize::MAX.
    let mut occ = vec![usize::MAX; nv];
    for (l, &p) in start.iter().enumerate() {
        occ[p] = l;
    }
    let ready = |done: u64, j: usize| {
        (0..j).all(|i| {
            done >> i & 1 == 1 || (jobs[i].diagonal && jobs[j].diagonal) || {
                let (a, b) = jobs[i].pair;
                let (c, d) = jobs[j].pair;
                a != c && a != d && b != c && b != d
            }
        })
    };
    let mut seen: HashSet<(Vec<usize>, u64)> = HashSet::new();
    let mut queue = VecDeque::from([(occ.clone(), 0u64, 0usize)]);
    seen.insert((occ, 0));
    while let Some((occ, done, depth)) = queue.pop_front() {
        if done == all_done {
            return depth;
        }
        // Every action available on each edge in this state.
        let mut actions: Vec<(usize, usize, Option<usize>)> = Vec::new();
        for &(u, v) in &edges {
            if occ[u] != usize::MAX || occ[v] != usize::MAX {
                actions.push((u, v, None));
            }
            for (j, job) in jobs.iter().enumerate() {
                if done >> j & 1 == 0 && ready(done, j) {
                    let (a, b) = job.pair;
                    if (occ[u] == a && occ[v] == b) || (occ[u] == b && occ[v] == a) {
                        actions.push((u, v, Some(j)));
                    }
                }
            }
        }
        // All sets of actions on pairwise disjoint edges.
        let mut stack: Vec<(usize, u64, Vec<usize>, u64)> = vec![(0, 0, occ.clone(), done)];
        while let Some((k, used, cur, dn)) = stack.pop() {
            if k == actions.len() {
                if (cur != occ || dn != done) && seen.insert((cur.clone(), dn)) {
                    queue.push_back((cur, dn, depth + 1));
                }
                continue;
            }
            stack.push((k + 1, used, cur.clone(), dn));
            let (u, v, job) = actions[k];
            if used >> u & 1 == 0 && used >> v & 1 == 0 {
                let mut next = cur.clone();
                let mut d2 = dn;
                match job {
                    None => next.swap(u, v),
                    Some(j) => d2 |= 1 << j,
                }
                stack.push((k + 1, used | 1 << u | 1 << v, next, d2));
            }
        }
    }
    unreachable!("jobs on a connected device always finish")
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

pub fn as_binding(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}
