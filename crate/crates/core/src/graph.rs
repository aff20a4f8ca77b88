//! Small undirected graphs: coupling maps, interaction graphs and the sub-graph searches over
//! them.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "GraphRepr", into = "GraphRepr")]
pub struct UGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl From<GraphRepr> for UGraph {
    fn from(r: GraphRepr) -> Self {
        UGraph::new(r.num_vertices, r.edges)
    }
}

impl From<UGraph> for GraphRepr {
    fn from(g: UGraph) -> Self {
        GraphRepr {
            num_vertices: g.n,
            edges: g.edges,
        }
    }
}

impl UGraph {
    /// Self-loops are dropped and duplicate edges merged; callers that must reject them
    /// check before constructing.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut es: Vec<(usize, usize)> = edges
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        es.sort_unstable();
        es.dedup();
        let mut adj = vec![Vec::new(); n];
        let mut matrix = vec![false; n * n];
        for &(u, v) in &es {
            assert!(u < n && v < n, "edge ({u}, {v}) outside a {n}-vertex graph");
            adj[u].push(v);
            adj[v].push(u);
            matrix[u * n + v] = true;
            matrix[v * n + u] = true;
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Self {
            n,
            edges: es,
            adj,
            matrix,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.matrix[u * self.n + v]
    }

    /// Hop distances from `src`; `usize::MAX` marks unreachable vertices.
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|v| self.distances_from(v)).collect()
    }

    /// One shortest path from `a` to `b`, inclusive, preferring low vertex ids on ties.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let dist = self.distances_from(b);
        if dist[a] == usize::MAX {
            return None;
        }
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = *self.adj[cur].iter().find(|&&w| dist[w] + 1 == dist[cur])?;
            path.push(cur);
        }
        Some(path)
    }

    /// Component id per vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = next;
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Sub-graph induced by `vertices`, relabelled to `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> UGraph {
        let mut es = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    es.push((i, j));
                }
            }
        }
        UGraph::new(vertices.len(), es)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().iter().all(|&c| c == 0)
    }
}

/// All monomorphisms of `pattern` into `target` (injective vertex maps sending every pattern
/// edge onto a target edge), as `map[pattern_vertex] = target_vertex`, in lexicographic order.
/// Stops after `limit` results.
pub fn monomorphisms(pattern: &UGraph, target: &UGraph, limit: usize) -> Vec<Vec<usize>> {
    let k = pattern.num_vertices();
    if k > target.num_vertices() {
        return Vec::new();
    }
    // Vertices are matched in lexicographic order so results come out sorted.
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; target.num_vertices()];
    extend(pattern, target, 0, &mut map, &mut used, &mut out, limit);
    out
}

fn extend(
    pattern: &UGraph,
    target: &UGraph,
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if depth == map.len() {
        out.push(map.to_vec());
        return;
    }
    let u = depth;
    // Restrict candidates through an already-mapped neighbour when there is one.
    let anchor = pattern.neighbors(u).iter().copied().find(|&w| w < u);
    let candidates: Vec<usize> = match anchor {
        Some(w) => target.neighbors(map[w]).to_vec(),
        None => (0..target.num_vertices()).collect(),
    };
    for t in candidates {
        if used[t] || target.degree(t) < pattern.degree(u) {
            continue;
        }
        let ok = pattern
            .neighbors(u)
            .iter()
            .filter(|&&w| w < u)
            .all(|&w| target.has_edge(map[w], t));
        if !ok {
            continue;
        }
        map[u] = t;
        used[t] = true;
        extend(pattern, target, depth + 1, map, used, out, limit);
        used[t] = false;
        map[u] = usize::MAX;
        if out.len() >= limit {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> UGraph {
        UGraph::new(n, (1..n).map(|i| (i - 1, i)))
    }

    #[test]
    fn normalizes_edges() {
        let g = UGraph::new(3, [(1, 0), (0, 1), (2, 2), (2, 1)]);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn path_distances_and_route() {
        let g = path(5);
        assert_eq!(g.distances_from(0), vec![0, 1, 2, 3, 4]);
        assert_eq!(g.shortest_path(4, 1), Some(vec![4, 3, 2, 1]));
    }

    #[test]
    fn triangle_has_no_monomorphism_into_path() {
        let tri = UGraph::new(3, [(0, 1), (1, 2), (0, 2)]);
        assert!(monomorphisms(&tri, &path(6), usize::MAX).is_empty());
    }

    #[test]
    fn path_into_ring_count() {
        // 6-ring: each directed 3-vertex path start and direction gives one map.
        let ring = UGraph::new(6, (0..6).map(|i| (i, (i + 1) % 6)));
        assert_eq!(monomorphisms(&path(3), &ring, usize::MAX).len(), 12);
    }

    #[test]
    fn results_sorted_and_limited() {
        let ring = UGraph::new(6, (0..6).map(|i| (i, (i + 1) % 6)));
        let all = monomorphisms(&path(3), &ring, usize::MAX);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(monomorphisms(&path(3), &ring, 5), all[..5].to_vec());
    }
}
