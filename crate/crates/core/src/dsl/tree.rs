//! Semantic structure tree: the function/loop hierarchy gates are aligned to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Root,
    Function,
    Loop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Vertical,
    Horizontal,
    Diagonal,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Vertical => "vertical",
            Direction::Horizontal => "horizontal",
            Direction::Diagonal => "diagonal",
        })
    }
}

/// Repetition annotation attached to a loop node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RepetitionKind {
    pub direction: Direction,
    /// Gates emitted per iteration.
    pub unit_size: u32,
    pub iterations: u32,
    /// Qubit shift between consecutive iterations (0 for horizontal).
    pub stride: i64,
    /// Fewer than four iterations cannot be shortened by keeping 1, 2 and last.
    pub abstractable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeNode {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Source line of the call site or loop header (0 for the root).
    pub line: u32,
    pub pattern: Option<RepetitionKind>,
    /// Byte offset of the statement that created this node; used to align
    /// dynamic execution with static structure.
    #[serde(skip)]
    pub site: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticTree {
    pub nodes: Vec<TreeNode>,
}

impl Default for SemanticTree {
    fn default() -> Self {
        Self::new()
    }
}

impl SemanticTree {
    /// A tree holding only the root node.
    pub fn new() -> Self {
        SemanticTree {
            nodes: vec![TreeNode {
                id: NodeId::ROOT,
                label: "root".to_string(),
                kind: NodeKind::Root,
                parent: None,
                children: Vec::new(),
                line: 0,
                pattern: None,
                site: None,
            }],
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.index()]
    }

    pub fn get(&self, id: NodeId) -> Result<&TreeNode> {
        self.nodes.get(id.index()).ok_or(Error::UnknownNode(id.0))
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut TreeNode {
        &mut self.nodes[id.index()]
    }

    pub fn add_child(
        &mut self,
        parent: NodeId,
        label: impl Into<String>,
        kind: NodeKind,
        line: u32,
        site: Option<u32>,
    ) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(TreeNode {
            id,
            label: label.into(),
            kind,
            parent: Some(parent),
            children: Vec::new(),
            line,
            pattern: None,
            site,
        });
        self.nodes[parent.index()].children.push(id);
        id
    }

    /// Depth of a node; the root has depth 0.
    pub fn depth(&self, id: NodeId) -> usize {
        let mut depth = 0;
        let mut cur = self.node(id).parent;
        while let Some(p) = cur {
            depth += 1;
            cur = self.node(p).parent;
        }
        depth
    }

    /// Path from the root down to `id`, inclusive.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = self.node(id).parent;
        while let Some(p) = cur {
            path.push(p);
            cur = self.node(p).parent;
        }
        path.reverse();
        path
    }

    /// True when `anc` lies on the path from the root to `id` (a node is its own ancestor).
    pub fn is_ancestor(&self, anc: NodeId, id: NodeId) -> bool {
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = self.node(c).parent;
        }
        false
    }

    /// Pre-order traversal starting at the root.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![NodeId::ROOT];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.node(id).children.iter().rev().copied());
        }
        out
    }

    /// Nodes with the given label, in pre-order.
    pub fn find_all(&self, label: &str) -> Vec<NodeId> {
        self.preorder()
            .into_iter()
            .filter(|id| self.node(*id).label == label)
            .collect()
    }

    /// Post-order traversal (children before parents).
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = self.preorder();
        out.reverse();
        out
    }

    /// Structural checks used by model validation and JSON loading.
    pub fn check(&self) -> Result<()> {
        if self.nodes.is_empty() || self.nodes[0].kind != NodeKind::Root {
            return Err(Error::Domain("tree has no root node".into()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id.index() != i {
                return Err(Error::Domain(format!("tree node {i} has id {}", n.id)));
            }
            if i > 0 {
                let Some(p) = n.parent else {
                    return Err(Error::Domain(format!("tree node {i} has no parent")));
                };
                if !self.contains(p) || !self.node(p).children.contains(&n.id) {
                    return Err(Error::Domain(format!("tree node {i} detached from parent")));
                }
            }
            for c in &n.children {
                if !self.contains(*c) || self.node(*c).parent != Some(n.id) {
                    return Err(Error::Domain(format!("tree node {i} has bad child {c}")));
                }
            }
        }
        if self.preorder().len() != self.nodes.len() {
            return Err(Error::Domain("tree is not connected".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SemanticTree {
        let mut t = SemanticTree::new();
        let main = t.add_child(NodeId::ROOT, "main", NodeKind::Function, 1, None);
        let f = t.add_child(main, "f", NodeKind::Function, 2, Some(10));
        t.add_child(f, "for@3", NodeKind::Loop, 3, Some(20));
        t.add_child(main, "g", NodeKind::Function, 4, Some(30));
        t
    }

    #[test]
    fn traversal_orders() {
        let t = sample();
        assert_eq!(
            t.preorder(),
            vec![NodeId(0), NodeId(1), NodeId(2), NodeId(3), NodeId(4)]
        );
        assert_eq!(t.depth(NodeId(3)), 3);
        assert_eq!(t.path_to(NodeId(3)), vec![NodeId(0), NodeId(1), NodeId(2), NodeId(3)]);
        assert!(t.is_ancestor(NodeId(1), NodeId(3)));
        assert!(!t.is_ancestor(NodeId(4), NodeId(3)));
        t.check().unwrap();
    }

    #[test]
    fn detached_node_fails_check() {
        let mut t = sample();
        t.nodes[1].children.clear();
        assert!(t.check().is_err());
    }
}
