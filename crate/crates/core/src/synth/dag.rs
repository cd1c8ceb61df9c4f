use std::collections::{BTreeMap, HashMap};

use crate::codes::BooleanForm;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DagNode {
    Input(usize),
    Xor(usize, usize),
}

/// Shared XOR network computing every codeword bit from the message bits.
///
/// Nodes `0..n_inputs` are the message inputs; every XOR node lists its
/// operands by node index, smaller index first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorDag {
    nodes: Vec<DagNode>,
    depth: Vec<u32>,
    outputs: Vec<usize>,
}

impl XorDag {
    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    /// Clocked stages between the inputs and node `i`.
    pub fn node_depth(&self, i: usize) -> u32 {
        self.depth[i]
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn n_inputs(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, DagNode::Input(_)))
            .count()
    }

    pub fn xor_count(&self) -> usize {
        self.nodes.len() - self.n_inputs()
    }

    pub fn depth(&self) -> u32 {
        self.outputs
            .iter()
            .map(|&o| self.depth[o])
            .max()
            .unwrap_or(0)
    }

    /// Output bits for a packed message.
    pub fn evaluate(&self, message: u64) -> u64 {
        let mut value = vec![0u8; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            value[i] = match *node {
                DagNode::Input(m) => ((message >> m) & 1) as u8,
                DagNode::Xor(a, b) => value[a] ^ value[b],
            };
        }
        self.outputs
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &o)| acc | (u64::from(value[o]) << j))
    }
}

struct DagBuilder {
    nodes: Vec<DagNode>,
    depth: Vec<u32>,
    memo: HashMap<(usize, usize), usize>,
}

impl DagBuilder {
    fn xor(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&id) = self.memo.get(&key) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(DagNode::Xor(key.0, key.1));
        self.depth.push(self.depth[a].max(self.depth[b]) + 1);
        self.memo.insert(key, id);
        id
    }
}

/// Builds a shared XOR network for the forms.
///
/// Repeatedly takes the pair of raw inputs that co-occurs in the most forms
/// (ties go to the lexicographically smallest pair) and replaces it by one
/// shared XOR everywhere it appears. Whatever operands remain in a form are
/// then combined shallowest-first.
pub fn build_dag(forms: &[BooleanForm], n_inputs: usize) -> Result<XorDag> {
    let mut b = DagBuilder {
        nodes: (0..n_inputs).map(DagNode::Input).collect(),
        depth: vec![0; n_inputs],
        memo: HashMap::new(),
    };
    let mut operands: Vec<Vec<usize>> = Vec::with_capacity(forms.len());
    for f in forms {
        if f.inputs.is_empty() {
            return Err(Error::invalid(format!(
                "output c{} has an empty XOR form",
                f.output + 1
            )));
        }
        if let Some(&bad) = f.inputs.iter().find(|&&i| i >= n_inputs) {
            return Err(Error::invalid(format!(
                "form references input m{}",
                bad + 1
            )));
        }
        let mut ops = f.inputs.clone();
        ops.sort_unstable();
        ops.dedup();
        operands.push(ops);
    }

    loop {
        let mut freq: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for ops in &operands {
            let raw: Vec<usize> = ops.iter().copied().filter(|&o| o < n_inputs).collect();
            for (i, &x) in raw.iter().enumerate() {
                for &y in &raw[i + 1..] {
                    *freq.entry((x, y)).or_default() += 1;
                }
            }
        }
        // BTreeMap iterates in lexicographic order; keep the first maximum.
        let Some((&(x, y), _)) = freq.iter().fold(
            None,
            |best: Option<(&(usize, usize), &usize)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            },
        ) else {
            break;
        };
        let shared = b.xor(x, y);
        for ops in operands.iter_mut() {
            if ops.contains(&x) && ops.contains(&y) {
                ops.retain(|&o| o != x && o != y);
                ops.push(shared);
            }
        }
    }

    let mut outputs = Vec::with_capacity(operands.len());
    for mut ops in operands {
        while ops.len() > 1 {
            ops.sort_by_key(|&o| (b.depth[o], o));
            let (p, q) = (ops[0], ops[1]);
            let merged = b.xor(p, q);
            ops.drain(..2);
            ops.push(merged);
        }
        outputs.push(ops[0]);
    }
    Ok(XorDag {
        nodes: b.nodes,
        depth: b.depth,
        outputs,
    })
}
