//! Abstraction view: gridify → abbreviate → complete → represent.
//!
//! Rows of the grid are rendered wires (super-bits) and columns are layout
//! columns. Abbreviation marks the rows and columns of the first two and the
//! last iteration of every abstractable repetition visible, together with
//! everything outside repetitions. Completion keeps a gate when all of its
//! rows and its column are visible. Representation compacts the visible grid
//! and collapses each maximal invisible run into one ellipsis band.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dsl::classify::MIN_ABSTRACTABLE_ITERATIONS;
use crate::dsl::tree::{Direction, NodeId, SemanticTree};
use crate::model::{GateName, Role};
use crate::segment::{ComponentDiagram, LoopStep, SuperKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireLabel {
    pub from: u32,
    pub to: u32,
}

impl WireLabel {
    pub fn text(&self) -> String {
        if self.from == self.to {
            format!("q[{}]", self.from)
        } else {
            format!("q[{}..{}]", self.from, self.to)
        }
    }

    pub fn bundled(&self) -> bool {
        self.from != self.to
    }
}

/// One unit box on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridGate {
    pub id: u32,
    pub label: String,
    pub kind: SuperKind,
    pub gate: Option<GateName>,
    /// Number of primitive gates the box stands for.
    pub size: u32,
    pub col: usize,
    /// Touched rows, ascending.
    pub rows: Vec<usize>,
    /// Operand rows with roles, for primitive gates.
    pub operands: Vec<(usize, Role)>,
    pub iters: Vec<LoopStep>,
}

/// A repetition run `(loop node, occurrence)` that abbreviation shortened.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveRun {
    pub node: NodeId,
    pub occ: u32,
    pub direction: Direction,
    pub keep: Vec<u32>,
    pub iterations: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub wires: Vec<WireLabel>,
    pub cols: usize,
    pub gates: Vec<GridGate>,
    /// `cells[r * cols + c]` is an index into `gates`.
    pub cells: Vec<Option<usize>>,
    pub row_visible: Vec<bool>,
    pub col_visible: Vec<bool>,
    pub gate_visible: Vec<bool>,
    pub runs: Vec<ActiveRun>,
    /// Loop nodes carrying a repetition annotation: (label, direction, iterations).
    pub patterns: BTreeMap<NodeId, (String, Direction, u32)>,
}

impl Grid {
    pub fn rows(&self) -> usize {
        self.wires.len()
    }

    pub fn cell(&self, r: usize, c: usize) -> Option<usize> {
        self.cells[r * self.cols + c]
    }

    /// Fresh grid holding only visible rows, columns and gates, with all
    /// visibility reset.
    pub fn visible_subgrid(&self) -> Grid {
        let row_map = compact(&self.row_visible);
        let col_map = compact(&self.col_visible);
        let wires = self
            .wires
            .iter()
            .zip(&self.row_visible)
            .filter(|(_, v)| **v)
            .map(|(w, _)| w.clone())
            .collect();
        let gates = self
            .gates
            .iter()
            .zip(&self.gate_visible)
            .filter(|(_, v)| **v)
            .map(|(g, _)| GridGate {
                col: col_map[g.col].expect("visible"),
                rows: g.rows.iter().map(|r| row_map[*r].expect("visible")).collect(),
                operands: g
                    .operands
                    .iter()
                    .map(|(r, role)| (row_map[*r].expect("visible"), *role))
                    .collect(),
                ..g.clone()
            })
            .collect();
        let cols = self.col_visible.iter().filter(|v| **v).count();
        build_grid(wires, cols, gates, self.patterns.clone())
    }
}

fn compact(visible: &[bool]) -> Vec<Option<usize>> {
    let mut next = 0;
    visible
        .iter()
        .map(|v| {
            v.then(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

fn build_grid(
    wires: Vec<WireLabel>,
    cols: usize,
    gates: Vec<GridGate>,
    patterns: BTreeMap<NodeId, (String, Direction, u32)>,
) -> Grid {
    let rows = wires.len();
    let mut cells = vec![None; rows * cols];
    for (i, g) in gates.iter().enumerate() {
        for r in &g.rows {
            let cell = &mut cells[r * cols + g.col];
            debug_assert!(cell.is_none(), "two unit boxes in one cell");
            *cell = Some(i);
        }
    }
    Grid {
        wires,
        cols,
        cells,
        row_visible: vec![false; rows],
        col_visible: vec![false; cols],
        gate_visible: vec![false; gates.len()],
        gates,
        runs: Vec::new(),
        patterns,
    }
}

/// STEP 1: one row per rendered wire, one column per layout column; all invisible.
pub fn gridify(diagram: &ComponentDiagram) -> Grid {
    let wires = diagram
        .super_bits
        .iter()
        .map(|b| WireLabel {
            from: b.from.0,
            to: b.to.0,
        })
        .collect();
    let gates = diagram
        .super_gates
        .iter()
        .map(|sg| {
            let mut rows: Vec<usize> = sg.qubits.iter().map(|q| diagram.row_of(*q)).collect();
            rows.dedup();
            GridGate {
                id: sg.id,
                label: sg.label.clone(),
                kind: sg.kind,
                gate: sg.gate,
                size: sg.members.len() as u32,
                col: sg.col as usize,
                rows,
                operands: sg.operands.iter().map(|o| (diagram.row_of(o.q), o.role)).collect(),
                iters: sg.iters.clone(),
            }
        })
        .collect();
    build_grid(wires, diagram.width as usize, gates, BTreeMap::new())
}

/// STEP 2: mark rows and columns of kept repetition units (iterations 1, 2
/// and last) and of everything outside abstractable repetitions.
pub fn abbreviate(mut grid: Grid, tree: &SemanticTree) -> Grid {
    let pattern_of = |node: NodeId| tree.get(node).ok().and_then(|n| n.pattern.as_ref());
    let mut present: BTreeMap<(NodeId, u32), BTreeSet<u32>> = BTreeMap::new();
    for g in &grid.gates {
        for step in &g.iters {
            if let Some(p) = pattern_of(step.node) {
                grid.patterns.insert(
                    step.node,
                    (tree.node(step.node).label.clone(), p.direction, p.iterations),
                );
                present.entry((step.node, step.occ)).or_default().insert(step.iter);
            }
        }
    }
    let mut keep: BTreeMap<(NodeId, u32), BTreeSet<u32>> = BTreeMap::new();
    grid.runs.clear();
    for ((node, occ), iters) in present {
        if iters.len() < MIN_ABSTRACTABLE_ITERATIONS as usize {
            continue;
        }
        let v: Vec<u32> = iters.iter().copied().collect();
        let kept: BTreeSet<u32> = [v[0], v[1], v[v.len() - 1]].into();
        grid.runs.push(ActiveRun {
            node,
            occ,
            direction: pattern_of(node).expect("annotated").direction,
            keep: kept.iter().copied().collect(),
            iterations: v.len() as u32,
        });
        keep.insert((node, occ), kept);
    }

    let mut row_used = vec![false; grid.rows()];
    let mut col_used = vec![false; grid.cols];
    grid.row_visible.iter_mut().for_each(|v| *v = false);
    grid.col_visible.iter_mut().for_each(|v| *v = false);
    for g in &grid.gates {
        let marked = g.iters.iter().all(|s| match keep.get(&(s.node, s.occ)) {
            Some(k) => k.contains(&s.iter),
            None => true,
        });
        for r in &g.rows {
            row_used[*r] = true;
            if marked {
                grid.row_visible[*r] = true;
            }
        }
        col_used[g.col] = true;
        if marked {
            grid.col_visible[g.col] = true;
        }
    }
    // empty wires and columns belong to no repetition
    for (v, used) in grid.row_visible.iter_mut().zip(row_used) {
        *v |= !used;
    }
    for (v, used) in grid.col_visible.iter_mut().zip(col_used) {
        *v |= !used;
    }
    grid
}

/// STEP 3: a gate is visible iff all its rows and its column are visible.
pub fn complete(mut grid: Grid) -> Grid {
    grid.gate_visible = grid
        .gates
        .iter()
        .map(|g| grid.col_visible[g.col] && g.rows.iter().all(|r| grid.row_visible[*r]))
        .collect();
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Col,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Band {
    pub axis: Axis,
    /// Original (uncompacted) inclusive index range.
    pub from: u32,
    pub to: u32,
    pub count: u32,
    /// Compacted index the band occupies.
    pub at: u32,
    /// Whether the band hides any gate.
    pub dot_mark: bool,
    /// Compacted cross-axis positions where hidden cells meet visible lines.
    pub dots: Vec<u32>,
}

/// A row band and column band (indices into `bands`) whose intersection hides gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BandCross {
    pub row_band: u32,
    pub col_band: u32,
    pub diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsGate {
    pub id: u32,
    pub label: String,
    pub kind: SuperKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateName>,
    pub size: u32,
    pub row: u32,
    pub col: u32,
    pub rows: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operands: Vec<(u32, Role)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LegendEntry {
    pub node: NodeId,
    pub label: String,
    pub direction: Direction,
    pub iterations: u32,
    pub abstracted: bool,
}

/// A compacted row: a wire, or the position of a row band.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum AbsRow {
    Wire { from: u32, to: u32 },
    Band { band: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractionDiagram {
    pub rows: Vec<AbsRow>,
    /// Compacted column count including band columns.
    pub width: u32,
    /// Compacted index of each column band.
    #[serde(rename = "bandCols")]
    pub band_cols: Vec<u32>,
    pub gates: Vec<AbsGate>,
    pub bands: Vec<Band>,
    pub crosses: Vec<BandCross>,
    pub legend: Vec<LegendEntry>,
}

impl AbstractionDiagram {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagram serializes")
    }

    pub fn visible_ids(&self) -> BTreeSet<u32> {
        self.gates.iter().map(|g| g.id).collect()
    }
}

/// Maps an axis to compacted positions; bands occupy one slot each.
struct AxisMap {
    pos: Vec<u32>,
    /// Band index for invisible entries.
    band_of: Vec<Option<usize>>,
    bands: Vec<(u32, u32, u32)>,
    len: u32,
}

fn axis_map(visible: &[bool]) -> AxisMap {
    let mut pos = Vec::with_capacity(visible.len());
    let mut band_of = Vec::with_capacity(visible.len());
    let mut bands: Vec<(u32, u32, u32)> = Vec::new();
    let mut next = 0u32;
    for (i, v) in visible.iter().enumerate() {
        if *v {
            pos.push(next);
            band_of.push(None);
            next += 1;
        } else {
            match bands.last_mut() {
                Some(b) if b.1 + 1 == i as u32 => b.1 = i as u32,
                _ => {
                    bands.push((i as u32, i as u32, next));
                    next += 1;
                }
            }
            pos.push(bands.last().expect("band").2);
            band_of.push(Some(bands.len() - 1));
        }
    }
    AxisMap {
        pos,
        band_of,
        bands,
        len: next,
    }
}

/// STEP 4: compact visible rows/columns and collapse invisible runs.
pub fn represent(grid: &Grid) -> AbstractionDiagram {
    let rm = axis_map(&grid.row_visible);
    let cm = axis_map(&grid.col_visible);

    let mut row_dots: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); rm.bands.len()];
    let mut col_dots: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); cm.bands.len()];
    let mut row_marked = vec![false; rm.bands.len()];
    let mut col_marked = vec![false; cm.bands.len()];
    let mut crosses: BTreeMap<(u32, u32), bool> = BTreeMap::new();
    let diagonal_runs: BTreeSet<(NodeId, u32)> = grid
        .runs
        .iter()
        .filter(|r| r.direction == Direction::Diagonal)
        .map(|r| (r.node, r.occ))
        .collect();

    let mut gates = Vec::new();
    for (g, visible) in grid.gates.iter().zip(&grid.gate_visible) {
        if *visible {
            let rows: Vec<u32> = g.rows.iter().map(|r| rm.pos[*r]).collect();
            gates.push(AbsGate {
                id: g.id,
                label: g.label.clone(),
                kind: g.kind,
                gate: g.gate,
                size: g.size,
                row: rows[0],
                col: cm.pos[g.col],
                rows,
                operands: g.operands.iter().map(|(r, role)| (rm.pos[*r], *role)).collect(),
            });
            continue;
        }
        let diagonal = g.iters.iter().any(|s| diagonal_runs.contains(&(s.node, s.occ)));
        let cb = cm.band_of[g.col];
        for r in &g.rows {
            match (rm.band_of[*r], cb) {
                (Some(rb), Some(cb)) => {
                    row_marked[rb] = true;
                    col_marked[cb] = true;
                    *crosses.entry((rb as u32, cb as u32)).or_default() |= diagonal;
                }
                (Some(rb), None) => {
                    row_marked[rb] = true;
                    row_dots[rb].insert(cm.pos[g.col]);
                }
                (None, Some(cb)) => {
                    col_marked[cb] = true;
                    col_dots[cb].insert(rm.pos[*r]);
                }
                // hidden only because another of its rows is hidden
                (None, None) => {}
            }
        }
    }

    let mut bands = Vec::new();
    for (i, (from, to, at)) in rm.bands.iter().enumerate() {
        bands.push(Band {
            axis: Axis::Row,
            from: *from,
            to: *to,
            count: to - from + 1,
            at: *at,
            dot_mark: row_marked[i],
            dots: row_dots[i].iter().copied().collect(),
        });
    }
    for (i, (from, to, at)) in cm.bands.iter().enumerate() {
        bands.push(Band {
            axis: Axis::Col,
            from: *from,
            to: *to,
            count: to - from + 1,
            at: *at,
            dot_mark: col_marked[i],
            dots: col_dots[i].iter().copied().collect(),
        });
    }

    let mut rows = Vec::with_capacity(rm.len as usize);
    let mut last_band = None;
    for (r, w) in grid.wires.iter().enumerate() {
        match rm.band_of[r] {
            None => rows.push(AbsRow::Wire { from: w.from, to: w.to }),
            Some(b) if last_band != Some(b) => {
                rows.push(AbsRow::Band { band: b as u32 });
                last_band = Some(b);
            }
            Some(_) => {}
        }
    }

    let abstracted: BTreeSet<NodeId> = grid.runs.iter().map(|r| r.node).collect();
    let legend = grid
        .patterns
        .iter()
        .map(|(node, (label, direction, iterations))| LegendEntry {
            node: *node,
            label: label.clone(),
            direction: *direction,
            iterations: *iterations,
            abstracted: abstracted.contains(node),
        })
        .collect();

    AbstractionDiagram {
        rows,
        width: cm.len,
        band_cols: cm.bands.iter().map(|b| b.2).collect(),
        gates,
        bands,
        crosses: crosses
            .into_iter()
            .map(|((rb, cb), diagonal)| BandCross {
                row_band: rb,
                col_band: rm.bands.len() as u32 + cb,
                diagonal,
            })
            .collect(),
        legend,
    }
}

/// The whole four-step pipeline.
pub fn abstract_diagram(diagram: &ComponentDiagram, tree: &SemanticTree) -> AbstractionDiagram {
    represent(&complete(abbreviate(gridify(diagram), tree)))
}
