use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TopologyError;
use crate::graph::UGraph;

/// Undirected device connectivity; cx is native in both orientations on every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingMap {
    pub name: String,
    graph: UGraph,
}

#[derive(Serialize, Deserialize)]
struct CouplingFile {
    name: String,
    num_qubits: usize,
    edges: Vec<[usize; 2]>,
}

const HEAVY_HEX_27: &str = include_str!("../../data/heavy_hex_27.json");

impl CouplingMap {
    pub fn new(
        name: impl Into<String>,
        num_qubits: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, TopologyError> {
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(TopologyError::SelfLoop(u));
            }
            for q in [u, v] {
                if q >= num_qubits {
                    return Err(TopologyError::QubitOutOfRange {
                        qubit: q,
                        num_qubits,
                    });
                }
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(TopologyError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        Ok(Self {
            name: name.into(),
            graph: UGraph::new(num_qubits, edges.iter().copied()),
        })
    }

    /// The 27-qubit heavy-hex lattice of the Falcon-generation devices.
    pub fn heavy_hex_27() -> Self {
        Self::from_json(HEAVY_HEX_27).expect("bundled coupling map is valid")
    }

    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(format!("line_{n}"), n, &edges).expect("line is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, TopologyError> {
        let f: CouplingFile = serde_json::from_str(text)?;
        let edges: Vec<_> = f.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(f.name, f.num_qubits, &edges)
    }

    pub fn to_json(&self) -> String {
        let f = CouplingFile {
            name: self.name.clone(),
            num_qubits: self.num_qubits(),
            edges: self.edges().iter().map(|&(u, v)| [u, v]).collect(),
        };
        serde_json::to_string_pretty(&f).expect("serializable")
    }

    pub fn num_qubits(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.graph.edges()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.graph.has_edge(u, v)
    }

    pub fn graph(&self) -> &UGraph {
        &self.graph
    }
}

pub fn load_coupling(path: impl AsRef<Path>) -> Result<CouplingMap, TopologyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TopologyError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    CouplingMap::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_heavy_hex_shape() {
        let m = CouplingMap::heavy_hex_27();
        assert_eq!(m.num_qubits(), 27);
        assert_eq!(m.edges().len(), 28);
        for (u, v) in [(0, 1), (1, 4), (4, 7), (7, 6)] {
            assert!(m.has_edge(u, v));
        }
        assert!((0..27).all(|q| m.graph().degree(q) <= 3));
        assert!(m.graph().is_connected());
    }

    #[test]
    fn rejects_self_loop_and_duplicates() {
        assert!(matches!(
            CouplingMap::new("x", 3, &[(1, 1)]),
            Err(TopologyError::SelfLoop(1))
        ));
        assert!(matches!(
            CouplingMap::new("x", 3, &[(0, 1), (1, 0)]),
            Err(TopologyError::DuplicateEdge(0, 1))
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = CouplingMap::heavy_hex_27();
        assert_eq!(CouplingMap::from_json(&m.to_json()).unwrap(), m);
    }
}
