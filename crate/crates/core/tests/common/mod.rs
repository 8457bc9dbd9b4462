//! Random program generator and brute-force oracles shared by the
//! acceptance and property suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use qcvine::context::EntanglementHistory;
use qcvine::dsl::{compile_source, NodeId, NodeKind};
use qcvine::model::{CircuitModel, GateInstance};
use qcvine::segment::{ComponentDiagram, FoldState};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_QUBITS: u32 = 12;
pub const MAX_GATES: usize = 50;

const ONE_Q: &[&str] = &["h", "x", "y", "z", "s", "t", "rx(0.1)", "ry(a)", "rz(pi/4)"];
const TWO_Q: &[&str] = &["cx", "cz", "swap", "ryy(0.2)", "cry(b)", "crz(0.3)"];
const THREE_Q: &[&str] = &["ccx", "cswap"];

/// A generated program and its source text.
pub struct Generated {
    pub seed: u64,
    pub qubits: u32,
    pub source: String,
}

impl Generated {
    pub fn compile(&self) -> CircuitModel {
        compile_source(&self.source, &[]).unwrap_or_else(|e| panic!("seed {}: {e}\n{}", self.seed, self.source))
    }
}

struct Gen {
    rng: ChaCha8Rng,
    n: u32,
    budget: usize,
    defs: Vec<String>,
}

/// Random program with at most `MAX_QUBITS` qubits and `MAX_GATES` gates,
/// mixing plain gates, function calls (some called twice) and loops with
/// vertical, horizontal, diagonal and irregular footprints.
pub fn random_program(seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=MAX_QUBITS);
    let budget = rng.gen_range(1..=MAX_GATES);
    let mut g = Gen {
        rng,
        n,
        budget,
        defs: Vec::new(),
    };
    let body = g.block(0, 1);
    let mut source = g.defs.join("\n");
    source.push_str(&format!("\ncircuit main({n}) {{\n{body}}}\n"));
    Generated {
        seed,
        qubits: n,
        source,
    }
}

impl Gen {
    fn qubits(&mut self, k: usize) -> Vec<u32> {
        let mut all: Vec<u32> = (0..self.n).collect();
        all.shuffle(&mut self.rng);
        all.truncate(k);
        all
    }

    fn gate(&mut self) -> String {
        let arity = match self.n {
            1 => 1,
            2 => self.rng.gen_range(1..=2),
            _ => *[1, 1, 2, 2, 3].choose(&mut self.rng).unwrap(),
        };
        let name = match arity {
            1 => ONE_Q.choose(&mut self.rng),
            2 => TWO_Q.choose(&mut self.rng),
            _ => THREE_Q.choose(&mut self.rng),
        }
        .unwrap();
        let ops: Vec<String> = self.qubits(arity).iter().map(|q| format!("q[{q}]")).collect();
        format!("{name} {};", ops.join(", "))
    }

    /// A statement sequence costing at most the remaining budget.
    fn block(&mut self, depth: usize, indent: usize) -> String {
        let pad = "    ".repeat(indent);
        let mut out = String::new();
        let stmts = self.rng.gen_range(1..=6);
        for _ in 0..stmts {
            if self.budget == 0 {
                break;
            }
            let choice = self.rng.gen_range(0..10);
            let stmt = match choice {
                0..=3 => {
                    self.budget -= 1;
                    Some(self.gate())
                }
                4..=6 => self.pattern_loop(),
                7 => self.irregular_loop(),
                _ if depth < 2 => self.call(depth),
                _ => None,
            };
            if let Some(s) = stmt {
                for line in s.lines() {
                    out.push_str(&pad);
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        out
    }

    fn pattern_loop(&mut self) -> Option<String> {
        let n = self.n;
        let v = "i";
        let kind = self.rng.gen_range(0..6);
        let (k, body) = match kind {
            // vertical single-qubit
            0 if n >= 2 => {
                let k = self.rng.gen_range(2..=n);
                let s = self.rng.gen_range(0..=n - k);
                let g = ONE_Q.choose(&mut self.rng).unwrap();
                (k, format!("{g} q[{s}+{v}];"))
            }
            // vertical pairs with stride 2
            1 if n >= 4 => {
                let k = self.rng.gen_range(2..=n / 2);
                let s = self.rng.gen_range(0..=n - 2 * k);
                (k, format!("cx q[{s}+2*{v}], q[{s}+2*{v}+1];"))
            }
            // horizontal
            2 => {
                let k = self.rng.gen_range(2..=6);
                let q = self.qubits(1)[0];
                (k, format!("rz(0.5) q[{q}];"))
            }
            3 if n >= 2 => {
                let k = self.rng.gen_range(2..=6);
                let q = self.qubits(2);
                (k, format!("cx q[{}], q[{}];\nh q[{}];", q[0], q[1], q[0]))
            }
            // diagonal chain
            4 if n >= 3 => {
                let k = self.rng.gen_range(2..=n - 1);
                let s = self.rng.gen_range(0..=n - 1 - k);
                (k, format!("cx q[{s}+{v}], q[{s}+{v}+1];"))
            }
            // reversed vertical
            _ => {
                if n < 2 {
                    return None;
                }
                let k = self.rng.gen_range(2..=n);
                (k, format!("x q[{}-{v}];", k - 1))
            }
        };
        let unit = body.lines().count();
        let cost = k as usize * unit;
        if cost > self.budget || k < 2 {
            return None;
        }
        self.budget -= cost;
        let body: Vec<String> = body.lines().map(|l| format!("    {l}")).collect();
        Some(format!("for {v} in 0..{k} {{\n{}\n}}", body.join("\n")))
    }

    /// Triangular nest: iteration `i` emits `i + 1` gates.
    fn irregular_loop(&mut self) -> Option<String> {
        let k = self.rng.gen_range(2..=4).min(self.n);
        let cost = (k * (k + 1) / 2) as usize;
        if k < 2 || cost > self.budget {
            return None;
        }
        self.budget -= cost;
        Some(format!(
            "for i in 0..{k} {{\n    for j in 0..i+1 {{\n        h q[j];\n    }}\n}}"
        ))
    }

    fn call(&mut self, depth: usize) -> Option<String> {
        let calls = self.rng.gen_range(1..=2);
        let before = self.budget;
        // the body may run twice, so give it half the budget
        self.budget /= calls;
        if self.budget == 0 {
            self.budget = before;
            return None;
        }
        let body = self.block(depth + 1, 1);
        let spent = before / calls - self.budget;
        if spent == 0 {
            self.budget = before;
            return None;
        }
        self.budget = before - spent * calls;
        let name = format!("f{}", self.defs.len());
        self.defs.push(format!("def {name}() {{\n{body}}}\n"));
        Some(vec![format!("{name}();"); calls].join("\n"))
    }
}

/// Width of a greedy as-soon-as-possible schedule of `gates` in order.
pub fn asap_width(gates: &[&GateInstance]) -> u32 {
    let mut next: HashMap<u32, u32> = HashMap::new();
    let mut width = 0;
    for g in gates {
        let col = g
            .qubits()
            .map(|q| next.get(&q.0).copied().unwrap_or(0))
            .max()
            .unwrap_or(0);
        for q in g.qubits() {
            next.insert(q.0, col + 1);
        }
        width = width.max(col + 1);
    }
    width
}

/// Path position at which a gate is grouped: the first folded node, or its leaf.
pub fn grouping_position(g: &GateInstance, fold: &FoldState) -> (usize, bool) {
    match g.tree_path.iter().position(|n| !fold.is_unfolded(*n)) {
        Some(p) => (p, true),
        None => (g.tree_path.len() - 1, false),
    }
}

type InstanceKey = Vec<(NodeId, u32)>;

#[derive(Default)]
struct Interval {
    min_col: u32,
    max_col: u32,
    first_t: u32,
    gates: Vec<u32>,
    all_direct: bool,
}

/// Checks the layout invariants of `diagram` against `model` under `fold`.
/// Returns a description of every violation found.
pub fn layout_violations(model: &CircuitModel, fold: &FoldState, diagram: &ComponentDiagram) -> Vec<String> {
    let mut out = Vec::new();
    let mut col_of_gate: HashMap<u32, (u32, u32)> = HashMap::new();
    for sg in &diagram.super_gates {
        for m in &sg.members {
            col_of_gate.insert(*m, (sg.col, sg.id));
        }
    }
    if col_of_gate.len() != model.gates.len() {
        out.push("not every gate belongs to exactly one super-gate".into());
    }

    // per-qubit order: compile order must map to strictly increasing columns
    for q in 0..model.qubit_count {
        let mut last: Option<(u32, u32)> = None;
        for g in model.gates.iter().filter(|g| g.qubits().any(|x| x.0 == q)) {
            let (col, sg) = col_of_gate[&g.id];
            if let Some((pc, psg)) = last {
                if psg != sg && col <= pc {
                    out.push(format!("q{q}: gate {} at col {col} not after col {pc}", g.id));
                }
                if psg == sg && col != pc {
                    out.push(format!("q{q}: super-gate {sg} split across columns"));
                }
            }
            last = Some((col, sg));
        }
    }

    // column exclusivity
    let mut by_col: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for sg in &diagram.super_gates {
        for q in &sg.qubits {
            let v = by_col.entry(sg.col).or_default();
            if v.contains(&q.0) {
                out.push(format!("col {}: qubit {} used twice", sg.col, q.0));
            }
            v.push(q.0);
        }
        if sg.col >= diagram.width {
            out.push(format!("super-gate {} beyond width", sg.id));
        }
    }
    let expected_width = diagram.super_gates.iter().map(|s| s.col + 1).max().unwrap_or(0);
    if diagram.width != expected_width {
        out.push(format!("width {} != 1 + max column {}", diagram.width, expected_width));
    }

    // node instances visible under the fold, with their column intervals
    let mut inst: BTreeMap<InstanceKey, Interval> = BTreeMap::new();
    for g in &model.gates {
        let (pos, _) = grouping_position(g, fold);
        let (col, _) = col_of_gate[&g.id];
        let mut key: InstanceKey = vec![(g.tree_path[0], g.occ_path[0])];
        for p in 1..=pos {
            key.push((g.tree_path[p], g.occ_path[p]));
            let e = inst.entry(key.clone()).or_insert(Interval {
                min_col: col,
                max_col: col,
                first_t: g.timestamp,
                gates: Vec::new(),
                all_direct: true,
            });
            e.min_col = e.min_col.min(col);
            e.max_col = e.max_col.max(col);
            e.first_t = e.first_t.min(g.timestamp);
            e.gates.push(g.id);
            e.all_direct &= g.tree_path.len() == p + 1 && pos == p;
        }
    }
    let mut siblings: BTreeMap<InstanceKey, Vec<&Interval>> = BTreeMap::new();
    for (key, iv) in &inst {
        siblings.entry(key[..key.len() - 1].to_vec()).or_default().push(iv);
    }
    for (parent, mut kids) in siblings {
        kids.sort_by_key(|k| k.first_t);
        for w in kids.windows(2) {
            if w[0].max_col >= w[1].min_col {
                out.push(format!(
                    "siblings under {parent:?}: [{}, {}] overlaps [{}, {}]",
                    w[0].min_col, w[0].max_col, w[1].min_col, w[1].max_col
                ));
            }
        }
    }

    // leaf instances whose gates are all primitive: width equals ASAP
    for (key, iv) in &inst {
        let folded = key.iter().any(|(n, _)| !fold.is_unfolded(*n));
        if !iv.all_direct || folded {
            continue;
        }
        let gates: Vec<&GateInstance> = iv.gates.iter().map(|id| model.gate(*id).unwrap()).collect();
        let got = iv.max_col - iv.min_col + 1;
        let want = asap_width(&gates);
        if got != want {
            out.push(format!("leaf {key:?}: width {got}, ASAP oracle {want}"));
        }
    }
    out
}

/// Brute-force visibility: evaluates the keep rule for every super-gate
/// straight from the model's loop iteration labels.
pub fn visible_oracle(model: &CircuitModel, fold: &FoldState, diagram: &ComponentDiagram) -> BTreeSet<u32> {
    let steps: Vec<Vec<(NodeId, u32, u32)>> = diagram
        .super_gates
        .iter()
        .map(|sg| {
            let g = model.gate(sg.members[0]).unwrap();
            let (pos, folded) = grouping_position(g, fold);
            let limit = if folded { pos } else { pos + 1 };
            (0..limit)
                .filter(|p| g.iter_path[*p] > 0 && model.tree.node(g.tree_path[*p]).kind == NodeKind::Loop)
                .map(|p| (g.tree_path[p], g.occ_path[p], g.iter_path[p]))
                .collect()
        })
        .collect();
    let mut present: BTreeMap<(NodeId, u32), BTreeSet<u32>> = BTreeMap::new();
    for s in steps.iter().flatten() {
        if model.tree.node(s.0).pattern.is_some() {
            present.entry((s.0, s.1)).or_default().insert(s.2);
        }
    }
    let kept = |node: NodeId, occ: u32, iter: u32| -> bool {
        match present.get(&(node, occ)) {
            Some(its) if its.len() >= 4 => {
                let v: Vec<u32> = its.iter().copied().collect();
                iter == v[0] || iter == v[1] || iter == v[v.len() - 1]
            }
            _ => true,
        }
    };
    let row_of = |q: u32| {
        diagram
            .super_bits
            .iter()
            .position(|b| b.from.0 <= q && q <= b.to.0)
            .unwrap()
    };
    let rows: Vec<BTreeSet<usize>> = diagram
        .super_gates
        .iter()
        .map(|sg| sg.qubits.iter().map(|q| row_of(q.0)).collect())
        .collect();
    let marked: Vec<bool> = steps
        .iter()
        .map(|s| s.iter().all(|(n, o, i)| kept(*n, *o, *i)))
        .collect();

    let mut visible = BTreeSet::new();
    for (i, sg) in diagram.super_gates.iter().enumerate() {
        let col_ok = {
            let in_col: Vec<usize> = (0..diagram.super_gates.len())
                .filter(|j| diagram.super_gates[*j].col == sg.col)
                .collect();
            in_col.iter().any(|j| marked[*j])
        };
        let rows_ok = rows[i].iter().all(|r| {
            let on_row: Vec<usize> = (0..diagram.super_gates.len())
                .filter(|j| rows[*j].contains(r))
                .collect();
            on_row.iter().any(|j| marked[*j])
        });
        if col_ok && rows_ok {
            visible.insert(sg.id);
        }
    }
    visible
}

/// Pair-enumeration connectivity over gates whose path contains `scope`.
pub fn connectivity_oracle(model: &CircuitModel, scope: Option<NodeId>) -> Vec<Vec<u32>> {
    let n = model.qubit_count as usize;
    let mut m = vec![vec![0u32; n]; n];
    for g in &model.gates {
        if scope.is_some_and(|s| !g.tree_path.contains(&s)) {
            continue;
        }
        let qs: Vec<usize> = g.qubits().map(|q| q.index()).collect();
        for a in 0..qs.len() {
            for b in a + 1..qs.len() {
                m[qs[a]][qs[b]] += 1;
                m[qs[b]][qs[a]] += 1;
            }
        }
    }
    m
}

/// Connected components of the graph with an edge wherever `adj` is nonzero.
pub fn components_oracle(adj: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s as u32];
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if adj[u][v] > 0 && !seen[v] {
                    seen[v] = true;
                    comp.push(v as u32);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort();
    out
}

/// Consecutive snapshots must strictly coarsen: every earlier group lies
/// inside one later group, and the partitions differ.
pub fn coarsening_violations(history: &EntanglementHistory) -> Vec<String> {
    let mut out = Vec::new();
    for (i, w) in history.snapshots.windows(2).enumerate() {
        for g in &w[0].groups {
            let inside = w[1].groups.iter().any(|h| g.iter().all(|x| h.contains(x)));
            if !inside {
                out.push(format!("snapshot {}: group {g:?} split", i + 1));
            }
        }
        if w[0].groups == w[1].groups {
            out.push(format!("snapshot {}: unchanged partition recorded", i + 1));
        }
    }
    out
}

/// A random fold: root plus each other node unfolded with probability 1/2.
pub fn random_fold(model: &CircuitModel, seed: u64) -> FoldState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let ids = model
        .tree
        .preorder()
        .into_iter()
        .filter(|id| *id == NodeId::ROOT || rng.gen_bool(0.5));
    FoldState::with_unfolded(ids)
}
