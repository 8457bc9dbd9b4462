//! Component view: fold-driven gate grouping, provenance-based qubit bundling
//! and the bottom-up semantic-preserving layout.
//!
//! Layout works on *frames*, one per dynamic entry `(node, occurrence)` of an
//! unfolded tree node. Inside a frame, the frame's own primitive gates are
//! placed in timestamp order at the leftmost column after the last use of
//! each of their wires. Child frames and folded components are appended as
//! blocks after everything placed so far, and later gates of the frame may
//! not move left of a block.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::dsl::tree::{NodeId, NodeKind, SemanticTree};
use crate::error::{Error, Result};
use crate::model::{CircuitModel, GateName, Operand, QubitId};

/// Set of unfolded tree nodes. The root is always treated as unfolded.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FoldState {
    pub unfolded: BTreeSet<NodeId>,
}

impl FoldState {
    /// Everything below the root collapsed.
    pub fn collapsed() -> Self {
        FoldState::default()
    }

    pub fn expanded(tree: &SemanticTree) -> Self {
        FoldState {
            unfolded: tree.nodes.iter().map(|n| n.id).collect(),
        }
    }

    /// Unfolds every node whose depth is below `depth` (root has depth 0).
    pub fn to_depth(tree: &SemanticTree, depth: usize) -> Self {
        let mut unfolded = BTreeSet::new();
        let mut stack = vec![(NodeId::ROOT, 0usize)];
        while let Some((id, d)) = stack.pop() {
            if d >= depth {
                continue;
            }
            unfolded.insert(id);
            stack.extend(tree.node(id).children.iter().map(|c| (*c, d + 1)));
        }
        FoldState { unfolded }
    }

    pub fn with_unfolded(ids: impl IntoIterator<Item = NodeId>) -> Self {
        FoldState {
            unfolded: ids.into_iter().collect(),
        }
    }

    pub fn is_unfolded(&self, id: NodeId) -> bool {
        id == NodeId::ROOT || self.unfolded.contains(&id)
    }

    pub fn check(&self, tree: &SemanticTree) -> Result<()> {
        match self.unfolded.iter().find(|id| !tree.contains(**id)) {
            Some(id) => Err(Error::UnknownNode(id.0)),
            None => Ok(()),
        }
    }

    pub fn fold(&mut self, id: NodeId) {
        self.unfolded.remove(&id);
    }

    pub fn unfold(&mut self, id: NodeId) {
        self.unfolded.insert(id);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuperKind {
    Primitive,
    Component,
}

/// Loop iteration a super-gate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LoopStep {
    pub node: NodeId,
    pub occ: u32,
    pub iter: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperGate {
    pub id: u32,
    pub label: String,
    pub kind: SuperKind,
    pub col: u32,
    /// Exactly touched qubits, ascending.
    pub qubits: Vec<QubitId>,
    pub node: NodeId,
    pub occ: u32,
    /// Earliest member timestamp.
    pub t: u32,
    pub members: Vec<u32>,
    /// Gate kind and operands for primitive super-gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateName>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operands: Vec<Operand>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<String>,
    /// Enclosing loop iterations, outermost first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iters: Vec<LoopStep>,
    /// Depth of `node` in the tree path (the frame nesting level).
    #[serde(skip)]
    pub depth: usize,
}

impl SuperGate {
    /// Full wire interval a component box covers.
    pub fn span(&self) -> (QubitId, QubitId) {
        (self.qubits[0], *self.qubits.last().expect("nonempty"))
    }

    pub fn touches(&self, q: QubitId) -> bool {
        self.qubits.binary_search(&q).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperBit {
    pub id: u32,
    pub from: QubitId,
    pub to: QubitId,
}

impl SuperBit {
    pub fn len(&self) -> u32 {
        self.to.0 - self.from.0 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.from <= q && q <= self.to
    }

    pub fn label(&self) -> String {
        if self.from == self.to {
            format!("q[{}]", self.from.0)
        } else {
            format!("q[{}..{}]", self.from.0, self.to.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentDiagram {
    pub qubits: u32,
    pub super_bits: Vec<SuperBit>,
    pub super_gates: Vec<SuperGate>,
    pub width: u32,
}

impl ComponentDiagram {
    /// Index of the super-bit holding `q`.
    pub fn row_of(&self, q: QubitId) -> usize {
        self.super_bits
            .binary_search_by(|b| {
                if b.to < q {
                    std::cmp::Ordering::Less
                } else if b.from > q {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .expect("super-bits cover every qubit")
    }

    pub fn gate(&self, id: u32) -> Option<&SuperGate> {
        self.super_gates.get(id as usize).filter(|g| g.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagram serializes")
    }
}

/// Groups gates by their shallowest folded ancestor and occurrence.
pub fn group_gates(model: &CircuitModel, fold: &FoldState) -> Vec<SuperGate> {
    #[derive(Hash, PartialEq, Eq)]
    enum Key {
        Component(NodeId, u32),
        Primitive(u32),
    }
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut out: Vec<SuperGate> = Vec::new();
    for g in &model.gates {
        let folded_at = g.tree_path.iter().position(|n| !fold.is_unfolded(*n));
        let (key, depth) = match folded_at {
            Some(p) => (Key::Component(g.tree_path[p], g.occ_path[p]), p),
            None => (Key::Primitive(g.id), g.tree_path.len() - 1),
        };
        let slot = *index.entry(key).or_insert_with(|| {
            let node = g.tree_path[depth];
            // loop steps strictly above the grouping node; a primitive gate
            // also belongs to the iteration of its own loop
            let limit = if folded_at.is_some() { depth } else { depth + 1 };
            let iters = (0..limit)
                .filter(|p| g.iter_path[*p] > 0 && model.tree.node(g.tree_path[*p]).kind == NodeKind::Loop)
                .map(|p| LoopStep {
                    node: g.tree_path[p],
                    occ: g.occ_path[p],
                    iter: g.iter_path[p],
                })
                .collect();
            out.push(SuperGate {
                id: 0,
                label: model.tree.node(node).label.clone(),
                kind: SuperKind::Component,
                col: 0,
                qubits: Vec::new(),
                node,
                occ: g.occ_path[depth],
                t: g.timestamp,
                members: Vec::new(),
                gate: None,
                operands: Vec::new(),
                params: Vec::new(),
                iters,
                depth,
            });
            out.len() - 1
        });
        let sg = &mut out[slot];
        sg.members.push(g.id);
        sg.t = sg.t.min(g.timestamp);
        sg.qubits.extend(g.qubits());
    }
    for sg in &mut out {
        sg.qubits.sort_unstable();
        sg.qubits.dedup();
        if sg.members.len() == 1 {
            let g = model.gate(sg.members[0]).expect("member exists");
            sg.kind = SuperKind::Primitive;
            sg.label = g.kind.label();
            sg.gate = Some(g.kind);
            sg.operands = g.operands.clone();
            sg.params = g.params.clone();
        }
    }
    out.sort_by_key(|sg| sg.t);
    for (i, sg) in out.iter_mut().enumerate() {
        sg.id = i as u32;
    }
    out
}

/// Bundles maximal contiguous runs of qubits that pass through the same
/// super-gate sequence.
pub fn bundle_qubits(model: &CircuitModel, super_gates: &[SuperGate]) -> Vec<SuperBit> {
    let n = model.qubit_count as usize;
    let mut seqs: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut order: Vec<&SuperGate> = super_gates.iter().collect();
    order.sort_by_key(|sg| sg.t);
    for sg in order {
        for q in &sg.qubits {
            seqs[q.index()].push(sg.id);
        }
    }
    let mut out = Vec::new();
    let mut start = 0;
    for q in 1..=n {
        if q == n || seqs[q] != seqs[start] {
            out.push(SuperBit {
                id: out.len() as u32,
                from: QubitId(start as u32),
                to: QubitId(q as u32 - 1),
            });
            start = q;
        }
    }
    out
}

enum Item {
    Direct(usize),
    Block(usize),
    Frame(usize),
}

#[derive(Default)]
struct Frame {
    items: Vec<Item>,
}

/// Bottom-up semantic-preserving layout; writes `col` into each super-gate
/// and returns the total width.
pub fn assign_columns(model: &CircuitModel, super_gates: &mut [SuperGate]) -> u32 {
    let mut frames: Vec<Frame> = vec![Frame::default()];
    // frame key: (depth, node, occurrence); depth 0 is the root frame
    let mut keys: HashMap<(usize, NodeId, u32), usize> = HashMap::new();
    keys.insert((0, NodeId::ROOT, 1), 0);

    let mut order: Vec<usize> = (0..super_gates.len()).collect();
    order.sort_by_key(|i| super_gates[*i].t);
    for i in order {
        let sg = &super_gates[i];
        let g = model.gate(sg.members[0]).expect("member exists");
        let is_block = sg.depth < g.tree_path.len() - 1 || sg.kind == SuperKind::Component;
        // frame chain: path positions [1, depth) hold enclosing unfolded frames;
        // a primitive sits inside the frame at `depth` itself
        let frame_end = if is_block { sg.depth } else { sg.depth + 1 };
        let mut parent = 0usize;
        for p in 1..frame_end {
            let key = (p, g.tree_path[p], g.occ_path[p]);
            parent = match keys.get(&key) {
                Some(f) => *f,
                None => {
                    frames.push(Frame::default());
                    let f = frames.len() - 1;
                    frames[parent].items.push(Item::Frame(f));
                    keys.insert(key, f);
                    f
                }
            };
        }
        frames[parent]
            .items
            .push(if is_block { Item::Block(i) } else { Item::Direct(i) });
    }
    let mut cols = vec![0u32; super_gates.len()];
    let width = place(&frames, 0, 0, super_gates, &mut cols);
    for (sg, c) in super_gates.iter_mut().zip(cols) {
        sg.col = c;
    }
    width
}

fn place(frames: &[Frame], frame: usize, origin: u32, sgs: &[SuperGate], cols: &mut [u32]) -> u32 {
    let mut width = 0u32;
    let mut base = 0u32;
    let mut wire_next: HashMap<QubitId, u32> = HashMap::new();
    for item in &frames[frame].items {
        match item {
            Item::Direct(i) => {
                let sg = &sgs[*i];
                let col = sg
                    .qubits
                    .iter()
                    .map(|q| wire_next.get(q).copied().unwrap_or(0))
                    .fold(base, u32::max);
                cols[*i] = origin + col;
                for q in &sg.qubits {
                    wire_next.insert(*q, col + 1);
                }
                width = width.max(col + 1);
            }
            Item::Block(i) => {
                cols[*i] = origin + width;
                width += 1;
                base = width;
            }
            Item::Frame(f) => {
                width += place(frames, *f, origin + width, sgs, cols);
                base = width;
            }
        }
    }
    width
}

/// Full segmentation: group, lay out, bundle.
pub fn segment(model: &CircuitModel, fold: &FoldState) -> ComponentDiagram {
    let mut super_gates = group_gates(model, fold);
    let width = assign_columns(model, &mut super_gates);
    let super_bits = bundle_qubits(model, &super_gates);
    ComponentDiagram {
        qubits: model.qubit_count,
        super_bits,
        super_gates,
        width,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::compile_source;

    fn ghz(n: i64) -> CircuitModel {
        compile_source(
            "circuit main(n) { h q[0]; for i in 0..n-1 { cx q[i], q[i+1]; } }",
            &[("n", n)],
        )
        .unwrap()
    }

    #[test]
    fn fold_all_gives_one_component() {
        let m = ghz(4);
        let d = segment(&m, &FoldState::collapsed());
        assert_eq!(d.super_gates.len(), 1);
        let sg = &d.super_gates[0];
        assert_eq!(sg.kind, SuperKind::Component);
        assert_eq!(sg.label, "main");
        assert_eq!(sg.members.len(), 4);
        assert_eq!(d.width, 1);
        assert_eq!(d.super_bits.len(), 1);
    }

    #[test]
    fn unfold_all_is_identity() {
        let m = ghz(4);
        let d = segment(&m, &FoldState::expanded(&m.tree));
        assert_eq!(d.super_gates.len(), 4);
        assert!(d.super_gates.iter().all(|s| s.kind == SuperKind::Primitive));
        // every qubit sees a different gate sequence
        assert_eq!(d.super_bits.len(), 4);
        assert_eq!(
            d.super_gates.iter().map(|s| s.col).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn folded_function_in_loop_splits_by_occurrence() {
        let src = "def f() { h q[0]; x q[1]; }\ncircuit main(2) { for i in 0..2 { f(); } }";
        let m = compile_source(src, &[]).unwrap();
        let f_node = m.gates[0].leaf();
        let mut fold = FoldState::expanded(&m.tree);
        fold.fold(f_node);
        let sgs = group_gates(&m, &fold);
        assert_eq!(sgs.len(), 2);
        assert_eq!(sgs[0].label, sgs[1].label);
        assert_eq!((sgs[0].occ, sgs[1].occ), (1, 2));
        assert!(sgs.iter().all(|s| s.kind == SuperKind::Component && s.node == f_node));
    }

    #[test]
    fn two_call_sites_folded() {
        let src = "def f() { h q[0]; x q[1]; }\ncircuit main(2) { f(); f(); }";
        let m = compile_source(src, &[]).unwrap();
        let d = segment(&m, &FoldState::to_depth(&m.tree, 2));
        assert_eq!(d.super_gates.len(), 2);
        assert_eq!(d.super_gates[0].label, "f");
        assert_ne!(d.super_gates[0].node, d.super_gates[1].node);
        assert_eq!(d.width, 2);
        // both qubits pass through the same two components
        assert_eq!(d.super_bits.len(), 1);
    }

    #[test]
    fn inert_unfold_under_folded_ancestor() {
        let src = "def g() { h q[0]; h q[1]; }\ndef f() { g(); }\ncircuit main(2) { f(); }";
        let m = compile_source(src, &[]).unwrap();
        let g_node = m.gates[0].leaf();
        let f_node = m.tree.node(g_node).parent.unwrap();
        let fold = FoldState::with_unfolded([NodeId(1), g_node]);
        let sgs = group_gates(&m, &fold);
        assert_eq!(sgs.len(), 1);
        assert_eq!(sgs[0].node, f_node);
    }

    #[test]
    fn singleton_group_is_primitive() {
        let src = "def f() { h q[0]; }\ncircuit main(1) { f(); }";
        let m = compile_source(src, &[]).unwrap();
        let sgs = group_gates(&m, &FoldState::to_depth(&m.tree, 2));
        assert_eq!(sgs.len(), 1);
        assert_eq!(sgs[0].kind, SuperKind::Primitive);
        assert_eq!(sgs[0].label, "H");
    }

    #[test]
    fn bundling_requires_contiguity() {
        // q0 and q2 share a sequence, q1 differs
        let m = compile_source("circuit main(3) { cx q[0], q[2]; x q[1]; }", &[]).unwrap();
        let d = segment(&m, &FoldState::expanded(&m.tree));
        assert_eq!(d.super_bits.len(), 3);
    }

    #[test]
    fn bundle_shared_provenance() {
        // all qubits pass S1 -> S2 -> S1 (distinct occurrences)
        let src = "def s1() { for i in 0..3 { h q[i]; } }\ndef s2() { cx q[0], q[1]; cx q[1], q[2]; }\n\
                   circuit main(3) { for k in 0..2 { s1(); s2(); } }";
        let m = compile_source(src, &[]).unwrap();
        let mut fold = FoldState::to_depth(&m.tree, 3);
        fold.fold(NodeId(3));
        fold.fold(NodeId(5));
        let d = segment(&m, &fold);
        assert_eq!(d.super_gates.len(), 4);
        assert_eq!(
            d.super_bits,
            vec![SuperBit {
                id: 0,
                from: QubitId(0),
                to: QubitId(2)
            }]
        );
    }

    #[test]
    fn leftmost_placement() {
        let m = compile_source("circuit main(2) { h q[0]; x q[1]; }", &[]).unwrap();
        let d = segment(&m, &FoldState::expanded(&m.tree));
        assert_eq!(d.super_gates.iter().map(|s| s.col).collect::<Vec<_>>(), vec![0, 0]);
        let m = compile_source("circuit main(1) { h q[0]; x q[0]; }", &[]).unwrap();
        let d = segment(&m, &FoldState::expanded(&m.tree));
        assert_eq!(d.super_gates.iter().map(|s| s.col).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn sibling_blocks_concatenate() {
        // A is 3 columns wide on q0, B is 2 columns wide on q1
        let src = "def a() { h q[0]; x q[0]; z q[0]; }\ndef b() { h q[1]; x q[1]; }\n\
                   circuit main(2) { a(); b(); }";
        let m = compile_source(src, &[]).unwrap();
        let d = segment(&m, &FoldState::expanded(&m.tree));
        let cols: Vec<u32> = d.super_gates.iter().map(|s| s.col).collect();
        assert_eq!(cols, vec![0, 1, 2, 3, 4]);
        assert_eq!(d.width, 5);
    }

    #[test]
    fn gates_after_block_stay_right_of_it() {
        let src = "def a() { h q[0]; x q[0]; }\ncircuit main(2) { a(); z q[1]; }";
        let m = compile_source(src, &[]).unwrap();
        let d = segment(&m, &FoldState::expanded(&m.tree));
        assert_eq!(d.super_gates[2].col, 2);
    }

    #[test]
    fn folding_never_widens() {
        let src = "def a() { h q[0]; x q[0]; z q[0]; }\ncircuit main(2) { a(); h q[1]; a(); }";
        let m = compile_source(src, &[]).unwrap();
        let full = segment(&m, &FoldState::expanded(&m.tree)).width;
        for id in m.tree.preorder() {
            let mut f = FoldState::expanded(&m.tree);
            f.fold(id);
            assert!(segment(&m, &f).width <= full);
        }
    }

    #[test]
    fn fold_state_depth_and_check() {
        let m = ghz(3);
        assert_eq!(FoldState::to_depth(&m.tree, 1).unfolded, [NodeId(0)].into());
        assert_eq!(FoldState::to_depth(&m.tree, 2).unfolded, [NodeId(0), NodeId(1)].into());
        assert!(FoldState::with_unfolded([NodeId(9)]).check(&m.tree).is_err());
    }
}
