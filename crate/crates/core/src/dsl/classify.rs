//! Loop-level repetition classification from per-iteration qubit footprints.
//!
//! For every dynamic execution of a loop the gates are split by iteration.
//! A run is uniform when each iteration emits the same gate-kind sequence and
//! touches the same number of qubits. Consecutive footprints then decide:
//! identical sets are horizontal; sets shifted by a constant non-zero stride
//! are vertical when disjoint and diagonal when overlapping.

use std::collections::BTreeMap;

use super::tree::{Direction, NodeId, NodeKind, RepetitionKind, SemanticTree};
use crate::model::{CircuitModel, GateInstance, GateName};

/// Minimum iteration count for which keeping iterations 1, 2 and last hides anything.
pub const MIN_ABSTRACTABLE_ITERATIONS: u32 = 4;

/// Classification of a single loop execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunPattern {
    pub direction: Direction,
    pub unit_size: u32,
    pub iterations: u32,
    pub stride: i64,
}

/// Returns the model's tree with the `pattern` field of every loop node filled.
pub fn classify_loops(model: &CircuitModel) -> SemanticTree {
    let mut tree = model.tree.clone();
    let runs = loop_runs(model);
    for id in tree.postorder() {
        if tree.node(id).kind != NodeKind::Loop {
            continue;
        }
        tree.node_mut(id).pattern = classify_node(id, &runs);
    }
    tree
}

/// Gates of every loop execution keyed by `(loop node, occurrence)`, split by iteration.
pub fn loop_runs(model: &CircuitModel) -> BTreeMap<(NodeId, u32), BTreeMap<u32, Vec<&GateInstance>>> {
    let mut runs: BTreeMap<(NodeId, u32), BTreeMap<u32, Vec<&GateInstance>>> = BTreeMap::new();
    for g in &model.gates {
        for (p, node) in g.tree_path.iter().enumerate() {
            let iter = g.iter_path.get(p).copied().unwrap_or(0);
            if iter == 0 || model.tree.node(*node).kind != NodeKind::Loop {
                continue;
            }
            runs.entry((*node, g.occ_path[p]))
                .or_default()
                .entry(iter)
                .or_default()
                .push(g);
        }
    }
    runs
}

fn classify_node(
    id: NodeId,
    runs: &BTreeMap<(NodeId, u32), BTreeMap<u32, Vec<&GateInstance>>>,
) -> Option<RepetitionKind> {
    let mut agreed: Option<RunPattern> = None;
    let mut max_iterations = 0;
    for (_, iters) in runs.range((id, 0)..=(id, u32::MAX)) {
        if iters.len() < 2 {
            continue;
        }
        let units: Vec<&[&GateInstance]> = iters.values().map(|v| v.as_slice()).collect();
        // iterations that emitted nothing make the run non-uniform
        let contiguous = iters.keys().copied().eq(1..=iters.len() as u32);
        let pattern = if contiguous { classify_run(&units)? } else { return None };
        match agreed {
            None => agreed = Some(pattern),
            Some(a) if a.direction == pattern.direction && a.unit_size == pattern.unit_size => {}
            Some(_) => return None,
        }
        max_iterations = max_iterations.max(pattern.iterations);
    }
    agreed.map(|p| RepetitionKind {
        direction: p.direction,
        unit_size: p.unit_size,
        iterations: max_iterations,
        stride: p.stride,
        abstractable: max_iterations >= MIN_ABSTRACTABLE_ITERATIONS,
    })
}

/// Classifies one loop execution given its gates split by iteration.
pub fn classify_run(units: &[&[&GateInstance]]) -> Option<RunPattern> {
    if units.len() < 2 {
        return None;
    }
    let kinds = |u: &[&GateInstance]| u.iter().map(|g| g.kind).collect::<Vec<GateName>>();
    let first_kinds = kinds(units[0]);
    if first_kinds.is_empty() || units.iter().any(|u| kinds(u) != first_kinds) {
        return None;
    }
    let footprints: Vec<Vec<i64>> = units
        .iter()
        .map(|u| {
            let mut f: Vec<i64> = u.iter().flat_map(|g| g.qubits()).map(|q| q.0 as i64).collect();
            f.sort_unstable();
            f.dedup();
            f
        })
        .collect();
    if footprints.iter().any(|f| f.len() != footprints[0].len()) {
        return None;
    }
    let base = RunPattern {
        direction: Direction::Horizontal,
        unit_size: first_kinds.len() as u32,
        iterations: units.len() as u32,
        stride: 0,
    };
    if footprints.windows(2).all(|w| w[0] == w[1]) {
        return Some(base);
    }
    let stride = footprints[1][0] - footprints[0][0];
    if stride == 0 {
        return None;
    }
    let shifted = footprints
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b - a == stride));
    if !shifted {
        return None;
    }
    let disjoint = footprints[0].iter().all(|q| footprints[1].binary_search(q).is_err());
    Some(RunPattern {
        direction: if disjoint {
            Direction::Vertical
        } else {
            Direction::Diagonal
        },
        stride,
        ..base
    })
}
