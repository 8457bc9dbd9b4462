//! Circuit intermediate representation shared by every downstream stage.
//!
//! A [`CircuitModel`] is a list of gate instances ordered by their global
//! insertion timestamp. Each gate remembers the chain of semantic-tree frames
//! that were active when it was emitted: the node ids (`tree_path`), the
//! dynamic occurrence of each node (`occ_path`) and, for loop nodes, the
//! 1-based iteration index (`iter_path`, 0 for non-loop nodes).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dsl::tree::{NodeId, SemanticTree};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub u32);

impl QubitId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for QubitId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "q[{}]", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateName {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Rx,
    Ry,
    Rz,
    Ryy,
    Cx,
    Cz,
    Cry,
    Crz,
    Swap,
    Cswap,
    Ccx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Control,
    Target,
    Plain,
}

impl GateName {
    pub const ALL: [GateName; 17] = [
        GateName::H,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::S,
        GateName::T,
        GateName::Rx,
        GateName::Ry,
        GateName::Rz,
        GateName::Ryy,
        GateName::Cx,
        GateName::Cz,
        GateName::Cry,
        GateName::Crz,
        GateName::Swap,
        GateName::Cswap,
        GateName::Ccx,
    ];

    pub fn from_name(name: &str) -> Option<GateName> {
        GateName::ALL.iter().copied().find(|g| g.name() == name)
    }

    /// Lower-case DSL spelling.
    pub fn name(self) -> &'static str {
        match self {
            GateName::H => "h",
            GateName::X => "x",
            GateName::Y => "y",
            GateName::Z => "z",
            GateName::S => "s",
            GateName::T => "t",
            GateName::Rx => "rx",
            GateName::Ry => "ry",
            GateName::Rz => "rz",
            GateName::Ryy => "ryy",
            GateName::Cx => "cx",
            GateName::Cz => "cz",
            GateName::Cry => "cry",
            GateName::Crz => "crz",
            GateName::Swap => "swap",
            GateName::Cswap => "cswap",
            GateName::Ccx => "ccx",
        }
    }

    /// Upper-case label drawn in diagrams.
    pub fn label(self) -> String {
        self.name().to_ascii_uppercase()
    }

    /// Operand role signature; its length is the arity.
    pub fn roles(self) -> &'static [Role] {
        use Role::*;
        match self {
            GateName::H
            | GateName::X
            | GateName::Y
            | GateName::Z
            | GateName::S
            | GateName::T
            | GateName::Rx
            | GateName::Ry
            | GateName::Rz => &[Plain],
            GateName::Ryy => &[Plain, Plain],
            GateName::Cx | GateName::Cz | GateName::Cry | GateName::Crz => &[Control, Target],
            GateName::Swap => &[Target, Target],
            GateName::Cswap => &[Control, Target, Target],
            GateName::Ccx => &[Control, Control, Target],
        }
    }

    pub fn arity(self) -> usize {
        self.roles().len()
    }

    pub fn param_count(self) -> usize {
        match self {
            GateName::Rx | GateName::Ry | GateName::Rz | GateName::Ryy | GateName::Cry | GateName::Crz => 1,
            _ => 0,
        }
    }

    pub fn is_multi_qubit(self) -> bool {
        self.arity() > 1
    }
}

impl std::fmt::Display for GateName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operand {
    pub q: QubitId,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateInstance {
    pub id: u32,
    pub kind: GateName,
    pub operands: Vec<Operand>,
    /// Angle expressions as written in the source; never evaluated.
    pub params: Vec<String>,
    #[serde(rename = "t")]
    pub timestamp: u32,
    #[serde(rename = "treePath")]
    pub tree_path: Vec<NodeId>,
    /// Occurrence of the owning (last) tree node.
    pub occ: u32,
    #[serde(rename = "occPath")]
    pub occ_path: Vec<u32>,
    #[serde(rename = "iterPath")]
    pub iter_path: Vec<u32>,
}

impl GateInstance {
    pub fn qubits(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.operands.iter().map(|o| o.q)
    }

    pub fn touches(&self, q: QubitId) -> bool {
        self.operands.iter().any(|o| o.q == q)
    }

    pub fn leaf(&self) -> NodeId {
        *self.tree_path.last().expect("tree path is never empty")
    }

    /// Position of `node` on the tree path, if present.
    pub fn depth_of(&self, node: NodeId) -> Option<usize> {
        self.tree_path.iter().position(|n| *n == node)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitModel {
    #[serde(rename = "qubits")]
    pub qubit_count: u32,
    pub gates: Vec<GateInstance>,
    pub tree: SemanticTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Rule {
    OperandsNotDistinct,
    OperandOutOfRange,
    TimestampNotUnique,
    TimestampsNotSorted,
    ArityMismatch,
    EmptyTreePath,
    TreePathNotRooted,
    UnknownTreeNode,
    PathLengthMismatch,
    OccurrenceMismatch,
    ZeroQubits,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Offending gate id; `None` for model-level rules.
    pub gate: Option<u32>,
    pub rule: Rule,
}

impl CircuitModel {
    pub fn empty(qubit_count: u32) -> Self {
        CircuitModel {
            qubit_count,
            gates: Vec::new(),
            tree: SemanticTree::new(),
        }
    }

    pub fn check_qubit(&self, q: QubitId) -> Result<()> {
        if q.0 >= self.qubit_count {
            return Err(Error::QubitOutOfRange {
                qubit: q.0,
                count: self.qubit_count,
            });
        }
        Ok(())
    }

    /// Gates touching `q`, in timestamp order.
    pub fn gates_on_qubit(&self, q: QubitId) -> Result<Vec<&GateInstance>> {
        self.check_qubit(q)?;
        Ok(self.gates.iter().filter(|g| g.touches(q)).collect())
    }

    pub fn gate(&self, id: u32) -> Option<&GateInstance> {
        // ids are assigned densely by the compiler, fall back to a scan for imported models
        match self.gates.get(id as usize) {
            Some(g) if g.id == id => Some(g),
            _ => self.gates.iter().find(|g| g.id == id),
        }
    }

    /// Invariant check; an empty list means the model is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.qubit_count == 0 {
            out.push(Violation {
                gate: None,
                rule: Rule::ZeroQubits,
            });
        }
        let mut seen_t = HashSet::new();
        let mut prev_t: Option<u32> = None;
        for g in &self.gates {
            let mut push = |rule| out.push(Violation { gate: Some(g.id), rule });
            if g.operands.len() != g.kind.arity() {
                push(Rule::ArityMismatch);
            }
            let distinct: HashSet<_> = g.qubits().collect();
            if distinct.len() != g.operands.len() {
                push(Rule::OperandsNotDistinct);
            }
            if g.qubits().any(|q| q.0 >= self.qubit_count) {
                push(Rule::OperandOutOfRange);
            }
            if !seen_t.insert(g.timestamp) {
                push(Rule::TimestampNotUnique);
            } else if prev_t.is_some_and(|p| g.timestamp < p) {
                push(Rule::TimestampsNotSorted);
            }
            prev_t = Some(prev_t.map_or(g.timestamp, |p| p.max(g.timestamp)));
            if g.tree_path.is_empty() {
                push(Rule::EmptyTreePath);
                continue;
            }
            if g.tree_path[0] != NodeId::ROOT {
                push(Rule::TreePathNotRooted);
            }
            // an unknown id, or a path that does not follow parent links
            let broken = g.tree_path.iter().any(|n| !self.tree.contains(*n))
                || g.tree_path
                    .windows(2)
                    .any(|w| self.tree.node(w[1]).parent != Some(w[0]));
            if broken {
                push(Rule::UnknownTreeNode);
            }
            if g.occ_path.len() != g.tree_path.len() || g.iter_path.len() != g.tree_path.len() {
                push(Rule::PathLengthMismatch);
            } else if g.occ_path.last() != Some(&g.occ) {
                push(Rule::OccurrenceMismatch);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Parses model JSON and checks the embedded tree's structure.
    pub fn from_json(text: &str) -> Result<Self> {
        let model: CircuitModel = serde_json::from_str(text)?;
        model.tree.check()?;
        Ok(model)
    }
}
