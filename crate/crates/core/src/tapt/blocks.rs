use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind, ParamExpr};
use crate::graph::UGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    /// `cx(a,b); rz(t) b; cx(a,b)`.
    ZZ,
    /// A lone cx.
    Cx,
    /// A swap present in the input.
    Swap,
}

/// Two-qubit unit of work for routing. Gates are stored on logical qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub qubits: (usize, usize),
    pub kind: BlockKind,
    pub gates: Vec<Gate>,
    /// Indices of the member gates in the source circuit.
    pub source: Vec<usize>,
    pub params: Vec<ParamExpr>,
}

impl Block {
    /// Whether the block starts and ends with a cx on its pair, so an adjacent swap on the
    /// same pair can cancel one cx against it.
    pub(crate) fn cx_boundary(&self) -> bool {
        matches!(self.kind, BlockKind::ZZ | BlockKind::Cx)
    }
}

/// A schedulable operation: a block, or one source gate that routing carries along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Block(usize),
    Gate(usize),
}

/// Blocks plus the dependency structure routing needs.
#[derive(Clone, Debug)]
pub struct Partition {
    pub circuit: Circuit,
    pub blocks: Vec<Block>,
    /// Operations in source order.
    pub ops: Vec<Op>,
    /// Nearest block ancestors of every op (reached through non-block ops only).
    pub block_preds: Vec<Vec<usize>>,
    /// Op index of each block.
    pub block_op: Vec<usize>,
    /// Non-block ops that some block depends on.
    pub needed: Vec<bool>,
    pub interaction: UGraph,
}

impl Partition {
    pub fn op_qubits(&self, op: Op) -> Vec<usize> {
        match op {
            Op::Block(b) => vec![self.blocks[b].qubits.0, self.blocks[b].qubits.1],
            Op::Gate(g) => self.circuit.gates[g].qubits.clone(),
        }
    }

    fn diagonal(&self, op: Op) -> bool {
        match op {
            Op::Block(b) => self.blocks[b].kind == BlockKind::ZZ,
            Op::Gate(g) => matches!(self.circuit.gates[g].kind, GateKind::RZ(_)),
        }
    }

    /// Logical qubits with at least one block.
    pub fn active_qubits(&self) -> Vec<usize> {
        (0..self.circuit.num_qubits)
            .filter(|&q| self.interaction.degree(q) > 0)
            .collect()
    }

    pub fn new(c: &Circuit) -> Partition {
        let blocks = find_blocks(c);
        let mut first_of = vec![None; c.gates.len()];
        let mut member = vec![false; c.gates.len()];
        for (b, blk) in blocks.iter().enumerate() {
            first_of[blk.source[0]] = Some(b);
            for &i in &blk.source {
                member[i] = true;
            }
        }
        let mut ops = Vec::new();
        for i in 0..c.gates.len() {
            if let Some(b) = first_of[i] {
                ops.push(Op::Block(b));
            } else if !member[i] {
                ops.push(Op::Gate(i));
            }
        }
        let interaction = UGraph::new(c.num_qubits, blocks.iter().map(|b| b.qubits));
        let mut p = Partition {
            circuit: c.clone(),
            blocks,
            ops,
            block_preds: Vec::new(),
            block_op: Vec::new(),
            needed: Vec::new(),
            interaction,
        };
        p.build_dependencies();
        p
    }

    fn build_dependencies(&mut self) {
        let n = self.ops.len();
        let mut on_wire: Vec<Vec<usize>> = vec![Vec::new(); self.circuit.num_qubits];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for j in 0..n {
            let qs = self.op_qubits(self.ops[j]);
            for &q in &qs {
                for &i in &on_wire[q] {
                    let commute = self.diagonal(self.ops[i]) && self.diagonal(self.ops[j]);
                    if !commute && !preds[j].contains(&i) {
                        preds[j].push(i);
                    }
                }
                on_wire[q].push(j);
            }
        }
        let mut block_preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for j in 0..n {
            let mut acc: Vec<usize> = Vec::new();
            for &i in &preds[j] {
                match self.ops[i] {
                    Op::Block(b) => acc.push(b),
                    Op::Gate(_) => acc.extend(block_preds[i].iter().copied()),
                }
            }
            acc.sort_unstable();
            acc.dedup();
            block_preds[j] = acc;
        }
        let mut needed = vec![false; n];
        for j in (0..n).rev() {
            if matches!(self.ops[j], Op::Block(_)) || needed[j] {
                for &i in &preds[j] {
                    if matches!(self.ops[i], Op::Gate(_)) {
                        needed[i] = true;
                    }
                }
            }
        }
        let mut block_op = vec![0; self.blocks.len()];
        for (j, op) in self.ops.iter().enumerate() {
            if let Op::Block(b) = op {
                block_op[*b] = j;
            }
        }
        self.block_preds = block_preds;
        self.needed = needed;
        self.block_op = block_op;
    }

    /// Block predecessors of block `b`.
    pub fn preds_of_block(&self, b: usize) -> &[usize] {
        &self.block_preds[self.block_op[b]]
    }

    /// Longest chain of blocks starting at each block (itself included).
    pub fn chain_lengths(&self) -> Vec<usize> {
        let nb = self.blocks.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nb];
        for b in 0..nb {
            for &p in self.preds_of_block(b) {
                succ[p].push(b);
            }
        }
        let mut chain = vec![1usize; nb];
        for b in (0..nb).rev() {
            for &s in &succ[b] {
                chain[b] = chain[b].max(1 + chain[s]);
            }
        }
        chain
    }
}

fn find_blocks(c: &Circuit) -> Vec<Block> {
    // next[i][k]: next gate on the k-th qubit of gate i.
    let mut last: Vec<Option<usize>> = vec![None; c.num_qubits];
    let mut next: Vec<Vec<Option<usize>>> =
        c.gates.iter().map(|g| vec![None; g.qubits.len()]).collect();
    for (i, g) in c.gates.iter().enumerate() {
        for &q in &g.qubits {
            if let Some(p) = last[q] {
                let k = c.gates[p].qubits.iter().position(|&x| x == q).unwrap();
                next[p][k] = Some(i);
            }
            last[q] = Some(i);
        }
    }
    let mut used = vec![false; c.gates.len()];
    let mut blocks = Vec::new();
    for (i, g) in c.gates.iter().enumerate() {
        if used[i] {
            continue;
        }
        let (a, b) = match g.kind {
            GateKind::CX | GateKind::Swap => (g.qubits[0], g.qubits[1]),
            _ => continue,
        };
        if g.kind == GateKind::CX {
            let zz = next[i][1].and_then(|r| {
                let rg = &c.gates[r];
                let is_rz = matches!(rg.kind, GateKind::RZ(_)) && rg.qubits == [b];
                let j = next[r][0]?;
                (is_rz && next[i][0] == Some(j) && c.gates[j] == *g).then_some((r, j))
            });
            if let Some((r, j)) = zz {
                used[r] = true;
                used[j] = true;
                blocks.push(Block {
                    qubits: (a, b),
                    kind: BlockKind::ZZ,
                    gates: vec![g.clone(), c.gates[r].clone(), c.gates[j].clone()],
                    source: vec![i, r, j],
                    params: c.gates[r].kind.param().into_iter().cloned().collect(),
                });
                continue;
            }
        }
        let kind = if g.kind == GateKind::CX {
            BlockKind::Cx
        } else {
            BlockKind::Swap
        };
        blocks.push(Block {
            qubits: (a, b),
            kind,
            gates: vec![g.clone()],
            source: vec![i],
            params: Vec::new(),
        });
    }
    blocks
}

/// Split `c` into two-qubit blocks and return them with the logical interaction graph.
pub fn partition_blocks(c: &Circuit) -> (Vec<Block>, UGraph) {
    let blocks = find_blocks(c);
    let g = UGraph::new(c.num_qubits, blocks.iter().map(|b| b.qubits));
    (blocks, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zz(c: &mut Circuit, a: usize, b: usize, s: &str) {
        c.push(Gate::cx(a, b))
            .push(Gate::rz(b, ParamExpr::symbol(s)))
            .push(Gate::cx(a, b));
    }

    #[test]
    fn single_zz_block() {
        let mut c = Circuit::new(2, 0);
        zz(&mut c, 0, 1, "g");
        let (b, g) = partition_blocks(&c);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kind, BlockKind::ZZ);
        assert_eq!(b[0].params, vec![ParamExpr::symbol("g")]);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn no_two_qubit_gates() {
        let mut c = Circuit::new(3, 0);
        c.push(Gate::h(0)).push(Gate::x(2));
        let (b, g) = partition_blocks(&c);
        assert!(b.is_empty() && g.edges().is_empty());
    }

    #[test]
    fn interleaved_gate_breaks_pattern() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::cx(0, 1))
            .push(Gate::x(0))
            .push(Gate::rz(1, ParamExpr::literal(0.1)))
            .push(Gate::cx(0, 1));
        let (b, _) = partition_blocks(&c);
        assert_eq!(
            b.iter().map(|x| x.kind).collect::<Vec<_>>(),
            vec![BlockKind::Cx, BlockKind::Cx]
        );
    }

    #[test]
    fn zz_blocks_commute_with_each_other_and_rz() {
        let mut c = Circuit::new(3, 0);
        zz(&mut c, 0, 1, "a");
        c.push(Gate::rz(1, ParamExpr::literal(0.2)));
        zz(&mut c, 1, 2, "b");
        c.push(Gate::x(1));
        zz(&mut c, 0, 1, "c");
        let p = Partition::new(&c);
        assert!(p.preds_of_block(1).is_empty());
        assert_eq!(p.preds_of_block(2), &[0, 1]);
        assert_eq!(p.chain_lengths(), vec![2, 2, 1]);
        // The x feeds block 2 and the rz must precede the x.
        let needed: Vec<_> = p
            .ops
            .iter()
            .zip(&p.needed)
            .filter(|(_, n)| **n)
            .map(|(o, _)| *o)
            .collect();
        assert_eq!(needed, vec![Op::Gate(3), Op::Gate(7)]);
    }
}
