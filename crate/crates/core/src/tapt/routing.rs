use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::blocks::{Op, Partition};
use super::{TaptConfig, TaptError};
use crate::circuit::{Circuit, Gate};
use crate::graph::UGraph;
use crate::topology::CouplingMap;

/// Largest block count and routing region the exact search handles (bitmask width).
const MASK_BITS: usize = 128;
/// How often the search checks its time budget, in expanded states.
const CLOCK_EVERY: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoutingStatus {
    Optimal,
    HeuristicFallback,
}

/// One time step: swaps on physical pairs and blocks, all on disjoint qubits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub swaps: Vec<(usize, usize)>,
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutedCircuit {
    /// Circuit whose wires are physical qubits (`layout[wire]`).
    pub circuit: Circuit,
    pub initial_layout: Vec<usize>,
    /// `final_layout[logical]`: physical qubit holding the logical state after all swaps.
    pub final_layout: Vec<usize>,
    pub status: RoutingStatus,
    pub steps: Vec<Step>,
    /// Number of block-level time steps.
    pub block_depth: usize,
    /// Largest depth for which the search proved no schedule exists, plus one.
    pub proven_depth_bound: usize,
    pub states_explored: usize,
}

impl RoutedCircuit {
    /// Wrap a circuit that already carries a physical layout, for example one read back from
    /// a file. Logical and physical wire order are taken to coincide at both ends.
    pub fn from_placed(circuit: Circuit) -> Option<RoutedCircuit> {
        let layout = circuit.layout.clone()?;
        Some(RoutedCircuit {
            circuit,
            initial_layout: layout.clone(),
            final_layout: layout,
            status: RoutingStatus::Optimal,
            steps: Vec::new(),
            block_depth: 0,
            proven_depth_bound: 0,
            states_explored: 0,
        })
    }
}

/// Physical qubits routing may use: the placed qubits, shortest connectors between otherwise
/// separate groups, and every qubit within `margin` hops of those.
pub(crate) struct Region {
    pub phys: Vec<usize>,
    pub local: Vec<usize>,
    pub graph: UGraph,
    pub dist: Vec<Vec<usize>>,
}

impl Region {
    pub fn new(images: &[usize], map: &CouplingMap, margin: usize) -> Result<Region, TaptError> {
        let g = map.graph();
        let mut set: Vec<usize> = images.to_vec();
        set.sort_unstable();
        set.dedup();
        loop {
            let sub = g.induced(&set);
            let comp = sub.components();
            if comp.iter().all(|&c| c == 0) {
                break;
            }
            // Connect component 0 to the nearest placed vertex outside it.
            let (inside, outside): (Vec<usize>, Vec<usize>) =
                (0..set.len()).partition(|&i| comp[i] == 0);
            let mut best: Option<Vec<usize>> = None;
            for &i in &inside {
                for &j in &outside {
                    if let Some(path) = g.shortest_path(set[i], set[j]) {
                        if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                            best = Some(path);
                        }
                    }
                }
            }
            let path = best.ok_or(TaptError::Disconnected {
                a: set[inside[0]],
                b: set[outside[0]],
            })?;
            set.extend(path);
            set.sort_unstable();
            set.dedup();
        }
        for _ in 0..margin {
            let ring: Vec<usize> = set
                .iter()
                .flat_map(|&v| g.neighbors(v).iter().copied())
                .collect();
            set.extend(ring);
            set.sort_unstable();
            set.dedup();
        }
        let mut local = vec![usize::MAX; map.num_qubits()];
        for (i, &p) in set.iter().enumerate() {
            local[p] = i;
        }
        let graph = g.induced(&set);
        let dist = graph.distance_matrix();
        Ok(Region {
            phys: set,
            local,
            graph,
            dist,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Mark {
    Other,
    Block(u8),
    SwapFree(u8),
    SwapUsed(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    /// Local position per logical qubit; `u8::MAX` once a qubit has no pending block.
    pos: Box<[u8]>,
    done: u128,
    marks: Box<[Mark]>,
}

#[derive(Clone, Copy, Debug)]
enum LocalOp {
    Block(usize, usize, usize),
    Swap(usize, usize),
}

struct Node {
    key: Key,
    cost: i32,
    parent: usize,
    ops: Vec<LocalOp>,
}

struct Problem<'a> {
    region: &'a Region,
    bq: Vec<(usize, usize)>,
    pred_mask: Vec<u128>,
    chain: Vec<usize>,
    blocks_of: Vec<u128>,
    cx_boundary: Vec<bool>,
    /// Needed carried gates that become emittable once a given block is done.
    t_after: Vec<Vec<usize>>,
    t_mask: HashMap<usize, u128>,
    t_qubits: HashMap<usize, Vec<usize>>,
    all: u128,
}

fn bit(i: usize) -> u128 {
    1u128 << i
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

impl<'a> Problem<'a> {
    fn new(p: &Partition, region: &'a Region) -> Problem<'a> {
        let nb = p.blocks.len();
        let mask = |v: &[usize]| v.iter().fold(0u128, |m, &b| m | bit(b));
        let mut blocks_of = vec![0u128; p.circuit.num_qubits];
        for (b, blk) in p.blocks.iter().enumerate() {
            blocks_of[blk.qubits.0] |= bit(b);
            blocks_of[blk.qubits.1] |= bit(b);
        }
        let mut t_after = vec![Vec::new(); nb];
        let mut t_mask = HashMap::new();
        let mut t_qubits = HashMap::new();
        for (j, op) in p.ops.iter().enumerate() {
            if let Op::Gate(_) = op {
                if p.needed[j] {
                    for &b in &p.block_preds[j] {
                        t_after[b].push(j);
                    }
                    t_mask.insert(j, mask(&p.block_preds[j]));
                    t_qubits.insert(j, p.op_qubits(*op));
                }
            }
        }
        Problem {
            region,
            bq: p.blocks.iter().map(|b| b.qubits).collect(),
            pred_mask: (0..nb).map(|b| mask(p.preds_of_block(b))).collect(),
            chain: p.chain_lengths(),
            blocks_of,
            cx_boundary: p.blocks.iter().map(|b| b.cx_boundary()).collect(),
            t_after,
            t_mask,
            t_qubits,
            all: if nb == MASK_BITS {
                u128::MAX
            } else {
                bit(nb) - 1
            },
        }
    }

    fn start(&self, mapping: &[usize]) -> Key {
        let pos = (0..mapping.len())
            .map(|l| {
                if self.blocks_of[l] != 0 {
                    self.region.local[mapping[l]] as u8
                } else {
                    u8::MAX
                }
            })
            .collect();
        Key {
            pos,
            done: 0,
            marks: vec![Mark::Other; self.region.phys.len()].into(),
        }
    }

    fn lower_bound(&self, k: &Key) -> usize {
        let pending = self.all & !k.done;
        let mut lb = self
            .blocks_of
            .iter()
            .map(|m| (m & pending).count_ones() as usize)
            .max()
            .unwrap_or(0);
        for b in bits(pending) {
            let (x, y) = self.bq[b];
            let d = self.region.dist[k.pos[x] as usize][k.pos[y] as usize];
            lb = lb.max(d / 2 + self.chain[b]);
        }
        lb
    }

    fn local_ops(&self, k: &Key) -> (Vec<LocalOp>, usize) {
        let pending = self.all & !k.done;
        let mut ops = Vec::new();
        for b in bits(pending) {
            if self.pred_mask[b] & !k.done != 0 {
                continue;
            }
            let (x, y) = self.bq[b];
            let (u, v) = (k.pos[x] as usize, k.pos[y] as usize);
            if self.region.dist[u][v] == 1 {
                ops.push(LocalOp::Block(b, u, v));
            }
        }
        let n_blocks = ops.len();
        let mut occupied = vec![false; self.region.phys.len()];
        for &p in k.pos.iter().filter(|&&p| p != u8::MAX) {
            occupied[p as usize] = true;
        }
        for &(u, v) in self.region.graph.edges() {
            if !occupied[u] && !occupied[v] {
                continue;
            }
            let undo = matches!(k.marks[u], Mark::SwapFree(w) | Mark::SwapUsed(w) if w as usize == v)
                && matches!(k.marks[v], Mark::SwapFree(w) | Mark::SwapUsed(w) if w as usize == u);
            if !undo {
                ops.push(LocalOp::Swap(u, v));
            }
        }
        (ops, n_blocks)
    }

    /// Every non-empty set of qubit-disjoint ops that leaves no executable block idle while
    /// its qubits are free.
    fn step_sets(ops: &[LocalOp], n_blocks: usize) -> Vec<Vec<usize>> {
        fn qubits(op: &LocalOp) -> u128 {
            match *op {
                LocalOp::Block(_, u, v) | LocalOp::Swap(u, v) => bit(u) | bit(v),
            }
        }
        fn rec(
            ops: &[LocalOp],
            n_blocks: usize,
            k: usize,
            used: u128,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if k == ops.len() {
                let idle = (0..n_blocks).any(|i| !cur.contains(&i) && qubits(&ops[i]) & used == 0);
                if !cur.is_empty() && !idle {
                    out.push(cur.clone());
                }
                return;
            }
            let q = qubits(&ops[k]);
            if q & used == 0 {
                cur.push(k);
                rec(ops, n_blocks, k + 1, used | q, cur, out);
                cur.pop();
            }
            rec(ops, n_blocks, k + 1, used, cur, out);
        }
        let mut out = Vec::new();
        rec(ops, n_blocks, 0, 0, &mut Vec::new(), &mut out);
        out
    }

    fn apply(&self, k: &Key, ops: &[LocalOp]) -> (Key, i32) {
        let mut pos = k.pos.clone();
        let mut marks = k.marks.clone();
        let mut done = k.done;
        let mut delta = 0i32;
        let mut block_at: Vec<(usize, usize, usize)> = Vec::new();
        for op in ops {
            match *op {
                LocalOp::Swap(u, v) => {
                    delta += 3;
                    let merged =
                        marks[u] == Mark::Block(v as u8) && marks[v] == Mark::Block(u as u8);
                    if merged {
                        delta -= 2;
                    }
                    let m = |w: usize| {
                        if merged {
                            Mark::SwapUsed(w as u8)
                        } else {
                            Mark::SwapFree(w as u8)
                        }
                    };
                    marks[u] = m(v);
                    marks[v] = m(u);
                    for p in pos.iter_mut() {
                        if *p as usize == u {
                            *p = v as u8;
                        } else if *p as usize == v {
                            *p = u as u8;
                        }
                    }
                }
                LocalOp::Block(b, u, v) => {
                    done |= bit(b);
                    if self.cx_boundary[b] {
                        if marks[u] == Mark::SwapFree(v as u8)
                            && marks[v] == Mark::SwapFree(u as u8)
                        {
                            delta -= 2;
                        }
                        marks[u] = Mark::Block(v as u8);
                        marks[v] = Mark::Block(u as u8);
                    } else {
                        marks[u] = Mark::Other;
                        marks[v] = Mark::Other;
                    }
                    block_at.push((b, u, v));
                }
            }
        }
        // Carried gates released by this step are emitted right after it.
        for &(b, u, v) in &block_at {
            for t in &self.t_after[b] {
                if self.t_mask[t] & !done != 0 {
                    continue;
                }
                for &l in &self.t_qubits[t] {
                    let (x, y) = self.bq[b];
                    let at = if l == x {
                        Some(u)
                    } else if l == y {
                        Some(v)
                    } else {
                        (pos[l] != u8::MAX).then_some(pos[l] as usize)
                    };
                    if let Some(at) = at {
                        marks[at] = Mark::Other;
                    }
                }
            }
        }
        for (l, p) in pos.iter_mut().enumerate() {
            if self.blocks_of[l] & !done == 0 {
                *p = u8::MAX;
            }
        }
        (Key { pos, done, marks }, delta)
    }
}

enum Outcome {
    Found(Vec<Vec<LocalOp>>),
    NotWithin,
    OutOfBudget,
}

struct Budget {
    start: Instant,
    secs: f64,
    max_states: usize,
    states: usize,
}

impl Budget {
    fn tick(&mut self) -> bool {
        self.states += 1;
        if self.states > self.max_states {
            return false;
        }
        self.states % CLOCK_EVERY != 0 || self.start.elapsed().as_secs_f64() <= self.secs
    }
}

fn layered_search(pr: &Problem, start: &Key, bound: usize, budget: &mut Budget) -> Outcome {
    let mut layers: Vec<Vec<Node>> = vec![vec![Node {
        key: start.clone(),
        cost: 0,
        parent: 0,
        ops: Vec::new(),
    }]];
    let mut seen: HashMap<Key, i32> = HashMap::new();
    seen.insert(start.clone(), 0);
    for t in 0.. {
        let layer = &layers[t];
        let mut best: Option<usize> = None;
        for (i, n) in layer.iter().enumerate() {
            if n.key.done == pr.all && best.is_none_or(|b| n.cost < layer[b].cost) {
                best = Some(i);
            }
        }
        if let Some(mut i) = best {
            let mut steps = Vec::new();
            for tt in (1..=t).rev() {
                steps.push(layers[tt][i].ops.clone());
                i = layers[tt][i].parent;
            }
            steps.reverse();
            return Outcome::Found(steps);
        }
        if t >= bound {
            return Outcome::NotWithin;
        }
        let mut next: Vec<Node> = Vec::new();
        let mut index: HashMap<Key, usize> = HashMap::new();
        for (pi, n) in layer.iter().enumerate() {
            if !budget.tick() {
                return Outcome::OutOfBudget;
            }
            let (ops, n_blocks) = pr.local_ops(&n.key);
            for set in Problem::step_sets(&ops, n_blocks) {
                let chosen: Vec<LocalOp> = set.iter().map(|&i| ops[i]).collect();
                let (key, delta) = pr.apply(&n.key, &chosen);
                if t + 1 + pr.lower_bound(&key) > bound {
                    continue;
                }
                let cost = n.cost + delta;
                if seen.get(&key).is_some_and(|&c| c <= cost) {
                    continue;
                }
                seen.insert(key.clone(), cost);
                match index.get(&key) {
                    Some(&j) => {
                        next[j] = Node {
                            key,
                            cost,
                            parent: pi,
                            ops: chosen,
                        }
                    }
                    None => {
                        index.insert(key.clone(), next.len());
                        next.push(Node {
                            key,
                            cost,
                            parent: pi,
                            ops: chosen,
                        });
                    }
                }
            }
        }
        if next.is_empty() {
            return Outcome::NotWithin;
        }
        layers.push(next);
    }
    unreachable!()
}

/// Greedy router: run every executable block, otherwise walk the lowest-index waiting block
/// one hop along a shortest path. Always terminates on a connected region.
fn heuristic_steps(
    p: &Partition,
    region: &Region,
    mapping: &[usize],
) -> Result<Vec<Step>, TaptError> {
    let nb = p.blocks.len();
    let nl = region.phys.len();
    let mut pos: Vec<usize> = mapping.iter().map(|&m| region.local[m]).collect();
    let mut occ: Vec<Option<usize>> = vec![None; nl];
    for (l, &q) in pos.iter().enumerate() {
        if q != usize::MAX {
            occ[q] = Some(l);
        }
    }
    let mut done = vec![false; nb];
    let mut left = nb;
    let mut steps = Vec::new();
    while left > 0 {
        let mut used = vec![false; nl];
        let mut step = Step::default();
        let ready: Vec<usize> = (0..nb)
            .filter(|&b| !done[b] && p.preds_of_block(b).iter().all(|&x| done[x]))
            .collect();
        for &b in &ready {
            let (x, y) = p.blocks[b].qubits;
            let (u, v) = (pos[x], pos[y]);
            if region.dist[u][v] == 1 && !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                step.blocks.push(b);
            }
        }
        for &b in &ready {
            if step.blocks.contains(&b) {
                continue;
            }
            let (x, y) = p.blocks[b].qubits;
            let (u, v) = (pos[x], pos[y]);
            if region.dist[u][v] == 1 || used[u] || used[v] {
                continue;
            }
            let path = region
                .graph
                .shortest_path(u, v)
                .expect("region is connected");
            let w = path[1];
            used[u] = true;
            used[v] = true;
            if used[w] && w != v {
                continue;
            }
            used[w] = true;
            step.swaps.push((region.phys[u], region.phys[w]));
            let (a, c) = (occ[u], occ[w]);
            occ[u] = c;
            occ[w] = a;
            if let Some(l) = occ[u] {
                pos[l] = u;
            }
            if let Some(l) = occ[w] {
                pos[l] = w;
            }
        }
        if step.blocks.is_empty() && step.swaps.is_empty() {
            return Err(TaptError::RoutingFailed(
                "greedy router made no progress".into(),
            ));
        }
        for &b in &step.blocks {
            done[b] = true;
            left -= 1;
        }
        steps.push(step);
    }
    Ok(steps)
}

/// Turn a step schedule into a circuit over the full device frame.
fn emit(
    p: &Partition,
    map: &CouplingMap,
    mapping: &[usize],
    steps: &[Step],
) -> (Circuit, Vec<usize>) {
    let nv = map.num_qubits();
    let src = &p.circuit;
    let mut out = Circuit::new(nv, src.num_clbits).with_name(src.name.clone());
    out.layout = Some((0..nv).collect());
    let mut phys: Vec<usize> = mapping.to_vec();
    let mut occ: Vec<Option<usize>> = vec![None; nv];
    for (l, &q) in phys.iter().enumerate() {
        occ[q] = Some(l);
    }
    let mut emitted = vec![false; p.ops.len()];
    let mut done = vec![false; p.blocks.len()];
    let place = |g: &Gate, phys: &[usize]| {
        let mut g = g.clone();
        for q in g.qubits.iter_mut() {
            *q = phys[*q];
        }
        g
    };
    let release = |out: &mut Circuit, emitted: &mut Vec<bool>, done: &[bool], phys: &[usize]| {
        for (j, op) in p.ops.iter().enumerate() {
            if let Op::Gate(g) = op {
                if p.needed[j] && !emitted[j] && p.block_preds[j].iter().all(|&b| done[b]) {
                    out.gates.push(place(&src.gates[*g], phys));
                    emitted[j] = true;
                }
            }
        }
    };
    release(&mut out, &mut emitted, &done, &phys);
    for step in steps {
        for &(u, v) in &step.swaps {
            out.gates.push(Gate::swap(u, v));
            let (a, b) = (occ[u], occ[v]);
            occ[u] = b;
            occ[v] = a;
            if let Some(l) = occ[u] {
                phys[l] = u;
            }
            if let Some(l) = occ[v] {
                phys[l] = v;
            }
        }
        for &b in &step.blocks {
            for g in &p.blocks[b].gates {
                out.gates.push(place(g, &phys));
            }
            done[b] = true;
            emitted[p.block_op[b]] = true;
        }
        release(&mut out, &mut emitted, &done, &phys);
    }
    for (j, op) in p.ops.iter().enumerate() {
        if let Op::Gate(g) = op {
            if !emitted[j] {
                out.gates.push(place(&src.gates[*g], &phys));
            }
        }
    }
    (out, phys)
}

/// Depth-minimal swap insertion between blocks. Iterative deepening over a layered search
/// whose states are (positions of qubits with pending blocks, finished blocks, last operation
/// per physical qubit); the bound grows by `cfg.depth_step` until a schedule exists. Among
/// minimum-depth schedules the one with the fewest cx after swap/block cancellation wins.
/// Falls back to the greedy router when the budget runs out.
pub fn route_optimal(
    p: &Partition,
    mapping: &[usize],
    map: &CouplingMap,
    cfg: &TaptConfig,
) -> Result<RoutedCircuit, TaptError> {
    match route_window(p, mapping, map, cfg, 0, usize::MAX)? {
        Windowed::Done(r) => Ok(r),
        Windowed::Deeper(_) => unreachable!("an unbounded window always ends in a schedule"),
    }
}

pub(crate) enum Windowed {
    Done(RoutedCircuit),
    /// No schedule within the window; carries the number of states explored.
    Deeper(usize),
}

/// As [`route_optimal`], but only tries depth bounds in `floor..=cap`. Bounds below `floor`
/// must already be known to fail.
pub(crate) fn route_window(
    p: &Partition,
    mapping: &[usize],
    map: &CouplingMap,
    cfg: &TaptConfig,
    floor: usize,
    cap: usize,
) -> Result<Windowed, TaptError> {
    let active = p.active_qubits();
    let images: Vec<usize> = active.iter().map(|&l| mapping[l]).collect();
    let region = Region::new(&images, map, cfg.region_margin)?;
    let finish = |steps: Vec<Step>, status, bound, states| {
        let (circuit, final_layout) = emit(p, map, mapping, &steps);
        RoutedCircuit {
            circuit,
            initial_layout: mapping.to_vec(),
            final_layout,
            status,
            block_depth: steps.len(),
            proven_depth_bound: bound,
            states_explored: states,
            steps,
        }
    };
    if p.blocks.is_empty() {
        return Ok(Windowed::Done(finish(
            Vec::new(),
            RoutingStatus::Optimal,
            0,
            0,
        )));
    }
    let fallback = |bound: usize, states: usize| -> Result<Windowed, TaptError> {
        let steps = heuristic_steps(p, &region, mapping)?;
        Ok(Windowed::Done(finish(
            steps,
            RoutingStatus::HeuristicFallback,
            bound,
            states,
        )))
    };
    if p.blocks.len() > MASK_BITS
        || region.phys.len() > MASK_BITS
        || mapping.len() >= u8::MAX as usize
    {
        return fallback(0, 0);
    }
    let pr = Problem::new(p, &region);
    let start = pr.start(mapping);
    let mut budget = Budget {
        start: Instant::now(),
        secs: cfg.time_budget_secs,
        max_states: cfg.max_states,
        states: 0,
    };
    let mut bound = pr.lower_bound(&start).max(floor);
    loop {
        if bound > cap {
            return Ok(Windowed::Deeper(budget.states));
        }
        match layered_search(&pr, &start, bound, &mut budget) {
            Outcome::Found(local) => {
                let steps = local
                    .into_iter()
                    .map(|ops| {
                        let mut s = Step::default();
                        for op in ops {
                            match op {
                                LocalOp::Block(b, _, _) => s.blocks.push(b),
                                LocalOp::Swap(u, v) => {
                                    s.swaps.push((region.phys[u], region.phys[v]))
                                }
                            }
                        }
                        s
                    })
                    .collect::<Vec<_>>();
                let depth = steps.len();
                return Ok(Windowed::Done(finish(
                    steps,
                    RoutingStatus::Optimal,
                    depth,
                    budget.states,
                )));
            }
            Outcome::NotWithin => bound += cfg.depth_step.max(1),
            Outcome::OutOfBudget => return fallback(bound, budget.states),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::blocks::Partition;
    use super::*;
    use crate::circuit::ParamExpr;

    fn zz(c: &mut Circuit, a: usize, b: usize) {
        c.push(Gate::cx(a, b))
            .push(Gate::rz(b, ParamExpr::literal(0.3)))
            .push(Gate::cx(a, b));
    }

    #[test]
    fn adjacent_blocks_need_no_swaps() {
        let mut c = Circuit::new(3, 0);
        zz(&mut c, 0, 1);
        zz(&mut c, 1, 2);
        let p = Partition::new(&c);
        let r = route_optimal(
            &p,
            &[0, 1, 2],
            &CouplingMap::line(3),
            &TaptConfig::default(),
        )
        .unwrap();
        assert_eq!(r.status, RoutingStatus::Optimal);
        assert!(r.steps.iter().all(|s| s.swaps.is_empty()));
        assert_eq!(r.block_depth, 2);
    }

    #[test]
    fn triangle_on_path_needs_one_swap() {
        let mut c = Circuit::new(3, 0);
        zz(&mut c, 0, 1);
        zz(&mut c, 1, 2);
        zz(&mut c, 0, 2);
        let p = Partition::new(&c);
        let r = route_optimal(
            &p,
            &[0, 1, 2],
            &CouplingMap::line(3),
            &TaptConfig::default(),
        )
        .unwrap();
        let swaps: usize = r.steps.iter().map(|s| s.swaps.len()).sum();
        assert_eq!(swaps, 1);
        // Every edge of a 3-path touches the middle qubit, so the four ops serialise.
        assert_eq!(r.block_depth, 4);
    }

    #[test]
    fn k5_on_a_path_matches_the_known_optimum() {
        let mut c = Circuit::new(5, 0);
        for a in 0..5 {
            for b in a + 1..5 {
                zz(&mut c, a, b);
            }
        }
        let p = Partition::new(&c);
        let r = route_optimal(
            &p,
            &[0, 1, 2, 3, 4],
            &CouplingMap::line(5),
            &TaptConfig::default(),
        )
        .unwrap();
        assert_eq!(r.status, RoutingStatus::Optimal);
        assert_eq!(r.block_depth, 8);
    }

    #[test]
    fn heuristic_completes() {
        let mut c = Circuit::new(4, 0);
        zz(&mut c, 0, 3);
        zz(&mut c, 1, 2);
        let p = Partition::new(&c);
        let region = Region::new(&[0, 1, 2, 3], &CouplingMap::line(4), 0).unwrap();
        let steps = heuristic_steps(&p, &region, &[0, 1, 2, 3]).unwrap();
        let blocks: usize = steps.iter().map(|s| s.blocks.len()).sum();
        assert_eq!(blocks, 2);
    }
}
