//! Context perspectives: qubit provenance, gate placement (parallelism and
//! idle space), qubit connectivity and structural entanglement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dsl::tree::NodeId;
use crate::error::{Error, Result};
use crate::model::{CircuitModel, QubitId};
use crate::segment::ComponentDiagram;

/// Number of discrete parallelism levels.
pub const PARALLELISM_LEVELS: u8 = 5;
/// Levels strictly below this index are on the low (light-load) side.
pub const LOW_LEVELS: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProvenanceEvent {
    pub super_gate: u32,
    pub label: String,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceTimeline {
    pub qubit: QubitId,
    pub span: u32,
    pub events: Vec<ProvenanceEvent>,
}

/// Super-gates touching `q`, at their layout columns.
pub fn provenance(model: &CircuitModel, diagram: &ComponentDiagram, q: QubitId) -> Result<ProvenanceTimeline> {
    model.check_qubit(q)?;
    let mut events: Vec<ProvenanceEvent> = diagram
        .super_gates
        .iter()
        .filter(|sg| sg.touches(q))
        .map(|sg| ProvenanceEvent {
            super_gate: sg.id,
            label: sg.label.clone(),
            column: sg.col,
        })
        .collect();
    events.sort_by_key(|e| (e.column, e.super_gate));
    Ok(ProvenanceTimeline {
        qubit: q,
        span: diagram.width,
        events,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdleSpan {
    pub gate: u32,
    pub wire: QubitId,
    /// Empty columns on the wire immediately before the gate.
    pub before: u32,
    /// Empty columns on the wire immediately after the gate.
    pub after: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlacementContext {
    pub threshold: u32,
    pub parallelism: Vec<u32>,
    pub levels: Vec<u8>,
    pub idle_extent: Vec<f64>,
    pub idle: Vec<IdleSpan>,
    /// Super-gate ids per column; highlighting one gate's idle space also
    /// highlights these same-column gates.
    pub parallel: Vec<Vec<u32>>,
}

/// Bins a column's parallelism into one of five levels. Values below the
/// threshold fall into levels 0–1, values at or above it into levels 2–4.
pub fn parallelism_level(p: u32, threshold: u32, max: u32) -> u8 {
    if p == 0 {
        return 0;
    }
    let threshold = threshold.max(1);
    if p < threshold {
        let span = (threshold - 1).max(1);
        (((p - 1) * LOW_LEVELS as u32) / span).min(LOW_LEVELS as u32 - 1) as u8
    } else {
        let high = (PARALLELISM_LEVELS - LOW_LEVELS) as u32;
        let span = max.max(threshold) - threshold + 1;
        LOW_LEVELS + (((p - threshold) * high) / span).min(high - 1) as u8
    }
}

/// Per-wire sorted columns of super-gates touching it, as `(column, gate id)`.
fn wire_columns(model: &CircuitModel, diagram: &ComponentDiagram) -> Vec<Vec<(u32, u32)>> {
    let mut wires: Vec<Vec<(u32, u32)>> = vec![Vec::new(); model.qubit_count as usize];
    for sg in &diagram.super_gates {
        for q in &sg.qubits {
            wires[q.index()].push((sg.col, sg.id));
        }
    }
    for w in &mut wires {
        w.sort_unstable();
    }
    wires
}

pub fn placement_context(model: &CircuitModel, diagram: &ComponentDiagram, threshold: u32) -> Result<PlacementContext> {
    if threshold < 1 {
        return Err(Error::Domain("threshold must be at least 1".into()));
    }
    let width = diagram.width as usize;
    let mut parallelism = vec![0u32; width];
    let mut parallel = vec![Vec::new(); width];
    for sg in &diagram.super_gates {
        parallelism[sg.col as usize] += 1;
        parallel[sg.col as usize].push(sg.id);
    }
    let max = parallelism.iter().copied().max().unwrap_or(0);
    let levels = parallelism
        .iter()
        .map(|p| parallelism_level(*p, threshold, max))
        .collect();

    let wires = wire_columns(model, diagram);
    let mut idle = Vec::new();
    let mut idle_extent = Vec::with_capacity(wires.len());
    for (q, cols) in wires.iter().enumerate() {
        let busy = {
            let mut c: Vec<u32> = cols.iter().map(|(c, _)| *c).collect();
            c.dedup();
            c.len()
        };
        idle_extent.push(if width == 0 {
            0.0
        } else {
            (width - busy) as f64 / width as f64
        });
        for (k, (col, id)) in cols.iter().enumerate() {
            let prev = if k == 0 { None } else { Some(cols[k - 1].0) };
            let next = cols.get(k + 1).map(|c| c.0);
            idle.push(IdleSpan {
                gate: *id,
                wire: QubitId(q as u32),
                before: prev.map_or(*col, |p| col - p - 1),
                after: next.map_or(diagram.width - col - 1, |n| n - col - 1),
            });
        }
    }
    idle.sort_by_key(|s| (s.gate, s.wire));
    Ok(PlacementContext {
        threshold,
        parallelism,
        levels,
        idle_extent,
        idle,
        parallel,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub column: u32,
    pub parallelism: u32,
}

/// Columns a super-gate could move to without changing per-wire gate order,
/// least loaded first.
pub fn suggest_placements(model: &CircuitModel, diagram: &ComponentDiagram, gate: u32) -> Result<Vec<Suggestion>> {
    let sg = diagram
        .gate(gate)
        .ok_or_else(|| Error::Domain(format!("unknown super-gate {gate}")))?;
    let wires = wire_columns(model, diagram);
    let mut lo = 0u32;
    let mut hi = diagram.width;
    for q in &sg.qubits {
        let cols = &wires[q.index()];
        let k = cols.iter().position(|(_, id)| *id == sg.id).expect("gate on its wire");
        if k > 0 {
            lo = lo.max(cols[k - 1].0 + 1);
        }
        if let Some(next) = cols.get(k + 1) {
            hi = hi.min(next.0);
        }
    }
    let mut parallelism = vec![0u32; diagram.width as usize];
    for g in &diagram.super_gates {
        parallelism[g.col as usize] += 1;
    }
    let mut out: Vec<Suggestion> = (lo..hi)
        .filter(|c| *c != sg.col)
        .map(|c| Suggestion {
            column: c,
            parallelism: parallelism[c as usize],
        })
        .collect();
    out.sort_by_key(|s| (s.parallelism, s.column));
    Ok(out)
}

/// Symmetric qubit-pair counts of multi-qubit gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityMatrix {
    pub n: u32,
    counts: Vec<u32>,
}

impl ConnectivityMatrix {
    pub fn zeros(n: u32) -> Self {
        ConnectivityMatrix {
            n,
            counts: vec![0; (n as usize) * (n as usize)],
        }
    }

    pub fn get(&self, i: u32, j: u32) -> u32 {
        self.counts[i as usize * self.n as usize + j as usize]
    }

    fn bump(&mut self, i: u32, j: u32) {
        let n = self.n as usize;
        self.counts[i as usize * n + j as usize] += 1;
        self.counts[j as usize * n + i as usize] += 1;
    }

    /// Nonzero cells as `[i, j, count]`, row-major, both halves.
    pub fn cells(&self) -> Vec<[u32; 3]> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let c = self.get(i, j);
                if c > 0 {
                    out.push([i, j, c]);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "n": self.n, "cells": self.cells() })
    }
}

/// Counts over multi-qubit gates whose tree path contains `scope` (all gates when `None`).
pub fn connectivity(model: &CircuitModel, scope: Option<NodeId>) -> Result<ConnectivityMatrix> {
    if let Some(s) = scope {
        model.tree.get(s)?;
    }
    let mut m = ConnectivityMatrix::zeros(model.qubit_count);
    for g in &model.gates {
        if g.operands.len() < 2 || scope.is_some_and(|s| !g.tree_path.contains(&s)) {
            continue;
        }
        for (a, oa) in g.operands.iter().enumerate() {
            for ob in &g.operands[a + 1..] {
                m.bump(oa.q.0, ob.q.0);
            }
        }
    }
    Ok(m)
}

/// Union-find over qubit indices with union by size and path halving.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Returns true when two different sets were merged.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }

    /// Groups sorted by their smallest member; members ascending.
    pub fn groups(&mut self) -> Vec<Vec<u32>> {
        let mut by_root: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for x in 0..self.parent.len() as u32 {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        let mut groups: Vec<Vec<u32>> = by_root.into_values().collect();
        groups.sort_by_key(|g| g[0]);
        groups
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    /// Timestamp of the gate that produced this partition; `None` for the initial state.
    pub t: Option<u32>,
    pub groups: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntanglementHistory {
    pub snapshots: Vec<Snapshot>,
}

impl EntanglementHistory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("initial snapshot")
    }
}

/// Structural entanglement: groups merge whenever a multi-qubit gate joins them.
pub fn entanglement_history(model: &CircuitModel) -> EntanglementHistory {
    let mut sets = DisjointSets::new(model.qubit_count as usize);
    let mut snapshots = vec![Snapshot {
        t: None,
        groups: sets.groups(),
    }];
    for g in &model.gates {
        let mut changed = false;
        for w in g.operands.windows(2) {
            changed |= sets.union(w[0].q.0, w[1].q.0);
        }
        if changed {
            snapshots.push(Snapshot {
                t: Some(g.timestamp),
                groups: sets.groups(),
            });
        }
    }
    EntanglementHistory { snapshots }
}
