use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TaptError;
use crate::graph::UGraph;
use crate::topology::CouplingMap;

/// `mapping[logical] = physical`.
pub type Mapping = Vec<usize>;

/// Best placements found for an interaction graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Placements {
    /// Full mappings (every logical qubit placed), best first.
    pub mappings: Vec<Mapping>,
    /// Interaction edges landing on coupling edges under each mapping.
    pub satisfied: usize,
    /// False when the node budget ran out before the search finished.
    pub exact: bool,
}

pub fn satisfied_edges(interaction: &UGraph, mapping: &[usize], map: &CouplingMap) -> usize {
    interaction
        .edges()
        .iter()
        .filter(|&&(a, b)| map.has_edge(mapping[a], mapping[b]))
        .count()
}

/// Physical vertex preference order: ascending ids for seed 0, a seeded shuffle otherwise.
pub(crate) fn physical_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if seed != 0 {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order
}

struct Search<'a> {
    ig: &'a UGraph,
    tg: &'a UGraph,
    order: Vec<usize>,
    rank: Vec<usize>,
    phys: Vec<usize>,
    suffix_ub: Vec<usize>,
    pos: Vec<usize>,
    used: Vec<bool>,
    best: Option<usize>,
    sols: Vec<Mapping>,
    sigs: HashSet<(Vec<usize>, Vec<(usize, usize)>)>,
    limit: usize,
    nodes: usize,
    budget: usize,
    exhausted: bool,
    done: bool,
}

impl Search<'_> {
    fn signature(&self) -> (Vec<usize>, Vec<(usize, usize)>) {
        let images: Vec<usize> = self.order.iter().map(|&u| self.pos[u]).collect();
        let sub = self.tg.induced(&images);
        let mut degs: Vec<usize> = (0..images.len()).map(|i| sub.degree(i)).collect();
        degs.sort_unstable();
        let sat = self
            .ig
            .edges()
            .iter()
            .copied()
            .filter(|&(a, b)| self.tg.has_edge(self.pos[a], self.pos[b]))
            .collect();
        (degs, sat)
    }

    fn record(&mut self, score: usize) {
        if self.best.is_none_or(|b| score > b) {
            self.best = Some(score);
            self.sols.clear();
            self.sigs.clear();
        }
        if self.sols.len() < self.limit && self.sigs.insert(self.signature()) {
            self.sols.push(self.pos.clone());
        }
        if score == self.ig.edges().len() && self.sols.len() >= self.limit {
            self.done = true;
        }
    }

    fn dfs(&mut self, k: usize, score: usize) {
        if self.done {
            return;
        }
        if self.nodes >= self.budget {
            self.exhausted = true;
            self.done = true;
            return;
        }
        self.nodes += 1;
        if k == self.order.len() {
            self.record(score);
            return;
        }
        let u = self.order[k];
        let placed: Vec<usize> = self
            .ig
            .neighbors(u)
            .iter()
            .map(|&w| self.pos[w])
            .filter(|&p| p != usize::MAX)
            .collect();
        let mut near: Vec<usize> = placed
            .iter()
            .flat_map(|&p| self.tg.neighbors(p).iter().copied())
            .collect();
        near.sort_unstable_by_key(|&v| self.rank[v]);
        near.dedup();
        let rest = self.phys.iter().copied().filter(|v| !near.contains(v));
        let candidates: Vec<usize> = near.iter().copied().chain(rest).collect();
        for v in candidates {
            if self.used[v] {
                continue;
            }
            let gain = placed.iter().filter(|&&p| self.tg.has_edge(v, p)).count();
            let ub = score + gain + self.suffix_ub[k + 1];
            if let Some(b) = self.best {
                let full = self.sols.len() >= self.limit;
                if ub < b || (full && ub == b) {
                    continue;
                }
            }
            self.pos[u] = v;
            self.used[v] = true;
            self.dfs(k + 1, score + gain);
            self.pos[u] = usize::MAX;
            self.used[v] = false;
            if self.done {
                return;
            }
        }
    }
}

/// Order vertices so each one has as many earlier neighbours as possible.
fn search_order(ig: &UGraph, vertices: &[usize]) -> Vec<usize> {
    let mut order = Vec::with_capacity(vertices.len());
    let mut left: Vec<usize> = vertices.to_vec();
    while !left.is_empty() {
        let key = |u: usize| {
            let back = ig
                .neighbors(u)
                .iter()
                .filter(|w| order.contains(*w))
                .count();
            (back, ig.degree(u), std::cmp::Reverse(u))
        };
        let (i, _) = left
            .iter()
            .enumerate()
            .max_by_key(|(_, &u)| key(u))
            .unwrap();
        order.push(left.remove(i));
    }
    order
}

/// Branch-and-bound over injective placements of the qubits that interact, maximising the
/// number of interaction edges on coupling edges. Up to `limit` optimal placements with
/// distinct shapes are returned; qubits without interactions fill the lowest free vertices
/// in seed order.
pub fn placement_candidates(
    interaction: &UGraph,
    map: &CouplingMap,
    seed: u64,
    limit: usize,
    node_budget: usize,
) -> Result<Placements, TaptError> {
    let n = interaction.num_vertices();
    let nv = map.num_qubits();
    if n > nv {
        return Err(TaptError::Capacity {
            logical: n,
            physical: nv,
        });
    }
    let tg = map.graph();
    let active: Vec<usize> = (0..n).filter(|&u| interaction.degree(u) > 0).collect();
    let order = search_order(interaction, &active);
    let max_deg = (0..nv).map(|v| tg.degree(v)).max().unwrap_or(0);
    let mut suffix_ub = vec![0; order.len() + 1];
    for k in (0..order.len()).rev() {
        let back = interaction
            .neighbors(order[k])
            .iter()
            .filter(|w| order[..k].contains(w))
            .count();
        suffix_ub[k] = suffix_ub[k + 1] + back.min(max_deg);
    }
    let phys = physical_order(nv, seed);
    let mut rank = vec![0; nv];
    for (i, &v) in phys.iter().enumerate() {
        rank[v] = i;
    }
    let mut s = Search {
        ig: interaction,
        tg,
        order,
        rank,
        phys: phys.clone(),
        suffix_ub,
        pos: vec![usize::MAX; n],
        used: vec![false; nv],
        best: None,
        sols: Vec::new(),
        sigs: HashSet::new(),
        limit: limit.max(1),
        nodes: 0,
        budget: node_budget.max(1),
        exhausted: false,
        done: false,
    };
    s.dfs(0, 0);
    let exact = !s.exhausted;
    let satisfied = s.best.unwrap_or(0);
    let mappings = s
        .sols
        .into_iter()
        .map(|mut m| {
            let taken = m.clone();
            let mut free = phys.iter().copied().filter(|v| !taken.contains(v));
            for slot in m.iter_mut().filter(|x| **x == usize::MAX) {
                *slot = free.next().expect("capacity checked");
            }
            m
        })
        .collect();
    Ok(Placements {
        mappings,
        satisfied,
        exact,
    })
}

/// A monomorphism of the interaction graph into the map when one exists, else a placement
/// maximising satisfied interaction edges.
pub fn initial_mapping(
    interaction: &UGraph,
    map: &CouplingMap,
    seed: u64,
) -> Result<Mapping, TaptError> {
    let p = placement_candidates(interaction, map, seed, 1, super::DEFAULT_PLACEMENT_BUDGET)?;
    Ok(p.mappings
        .into_iter()
        .next()
        .expect("search always records a placement"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_embeds_in_heavy_hex() {
        let map = CouplingMap::heavy_hex_27();
        let p5 = UGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4)]);
        let m = initial_mapping(&p5, &map, 0).unwrap();
        assert_eq!(satisfied_edges(&p5, &m, &map), 4);
        let m7 = initial_mapping(&p5, &map, 7).unwrap();
        assert_eq!(satisfied_edges(&p5, &m7, &map), 4);
    }

    #[test]
    fn lone_qubit_goes_to_vertex_zero() {
        let map = CouplingMap::heavy_hex_27();
        assert_eq!(
            initial_mapping(&UGraph::new(1, []), &map, 0).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn k5_gets_a_tree_and_two_shapes() {
        let map = CouplingMap::heavy_hex_27();
        let k5 = UGraph::new(5, (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))));
        let p = placement_candidates(&k5, &map, 0, 4, 200_000).unwrap();
        assert_eq!(p.satisfied, 4);
        assert!(p.mappings.len() >= 2);
    }

    #[test]
    fn capacity() {
        let map = CouplingMap::line(3);
        let e = placement_candidates(&UGraph::new(4, []), &map, 0, 1, 10).unwrap_err();
        assert!(matches!(e, TaptError::Capacity { .. }));
    }
}
