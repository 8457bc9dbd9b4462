//! Static structure extraction and abstract execution of a parsed program.

use std::collections::{BTreeMap, HashMap};

use super::ast::*;
use super::tree::{NodeId, NodeKind, SemanticTree};
use crate::error::{Error, Location, Result};
use crate::model::{CircuitModel, GateInstance, Operand, QubitId};

/// Hard cap on emitted gates; guards against runaway loop bounds.
pub const MAX_GATES: usize = 5_000_000;

/// Program parameters (e.g. the scale `n`).
pub type Params = BTreeMap<String, i64>;

fn loop_label(f: &ForLoop) -> String {
    format!("for@{}", f.span.loc.line)
}

/// Builds one node per reachable function call site and per loop, mirroring
/// the static call/containment structure below `root → <circuit>`.
pub fn build_semantic_tree(program: &Program) -> Result<SemanticTree> {
    let mut tree = SemanticTree::new();
    let main = tree.add_child(
        NodeId::ROOT,
        program.circuit.name.clone(),
        NodeKind::Function,
        program.circuit.span.loc.line,
        None,
    );
    let mut active = vec![program.circuit.name.clone()];
    expand(program, &program.circuit.body, main, &mut tree, &mut active)?;
    Ok(tree)
}

fn expand(
    program: &Program,
    body: &[Stmt],
    parent: NodeId,
    tree: &mut SemanticTree,
    active: &mut Vec<String>,
) -> Result<()> {
    for stmt in body {
        match stmt {
            Stmt::Gate(_) => {}
            Stmt::For(f) => {
                let id = tree.add_child(
                    parent,
                    loop_label(f),
                    NodeKind::Loop,
                    f.span.loc.line,
                    Some(f.span.start),
                );
                expand(program, &f.body, id, tree, active)?;
            }
            Stmt::Call(c) => {
                let Some(def) = program.func(&c.callee) else {
                    return Err(Error::Semantic {
                        loc: c.span.loc,
                        message: format!("call to undefined function `{}`", c.callee),
                    });
                };
                if active.contains(&c.callee) {
                    return Err(Error::Semantic {
                        loc: c.span.loc,
                        message: format!("recursive call to `{}` is not supported", c.callee),
                    });
                }
                if def.params.len() != c.args.len() {
                    return Err(Error::Semantic {
                        loc: c.span.loc,
                        message: format!(
                            "`{}` expects {} argument(s), got {}",
                            c.callee,
                            def.params.len(),
                            c.args.len()
                        ),
                    });
                }
                let id = tree.add_child(
                    parent,
                    c.callee.clone(),
                    NodeKind::Function,
                    c.span.loc.line,
                    Some(c.span.start),
                );
                active.push(c.callee.clone());
                expand(program, &def.body, id, tree, active)?;
                active.pop();
            }
        }
    }
    Ok(())
}

struct Frame {
    node: NodeId,
    occ: Option<u32>,
    iter: u32,
}

struct Interp<'a> {
    program: &'a Program,
    params: &'a Params,
    children: HashMap<(NodeId, u32), NodeId>,
    counters: Vec<u32>,
    stack: Vec<Frame>,
    gates: Vec<GateInstance>,
    qubits: i64,
}

fn compile_err(loc: Location, message: impl Into<String>) -> Error {
    Error::Compile {
        loc,
        message: message.into(),
    }
}

impl<'a> Interp<'a> {
    fn eval(&self, e: &Expr, locals: &[(String, i64)]) -> Result<i64> {
        let overflow = |s: Span| compile_err(s.loc, "integer overflow");
        Ok(match e {
            Expr::Int(v, _) => *v,
            Expr::Float(text, s) => {
                return Err(compile_err(
                    s.loc,
                    format!("non-integer value `{text}` in index expression"),
                ))
            }
            Expr::Var(name, s) => match locals.iter().rev().find(|(n, _)| n == name) {
                Some((_, v)) => *v,
                None => match self.params.get(name) {
                    Some(v) => *v,
                    None => return Err(compile_err(s.loc, format!("parameter unbound: {name}"))),
                },
            },
            Expr::Neg(inner, s) => self.eval(inner, locals)?.checked_neg().ok_or_else(|| overflow(*s))?,
            Expr::Bin(op, a, b, s) => {
                let a = self.eval(a, locals)?;
                let b = self.eval(b, locals)?;
                match op {
                    BinOp::Add => a.checked_add(b),
                    BinOp::Sub => a.checked_sub(b),
                    BinOp::Mul => a.checked_mul(b),
                    BinOp::Div => {
                        if b == 0 {
                            return Err(compile_err(s.loc, "division by zero"));
                        }
                        a.checked_div_euclid(b)
                    }
                }
                .ok_or_else(|| overflow(*s))?
            }
        })
    }

    fn child(&self, parent: NodeId, span: Span) -> NodeId {
        self.children[&(parent, span.start)]
    }

    fn exec(&mut self, body: &[Stmt], locals: &mut Vec<(String, i64)>) -> Result<()> {
        for stmt in body {
            match stmt {
                Stmt::Gate(g) => self.emit(g, locals)?,
                Stmt::Call(c) => {
                    let def = self.program.func(&c.callee).expect("checked by tree builder");
                    let mut callee_locals = Vec::with_capacity(def.params.len());
                    for (p, a) in def.params.iter().zip(&c.args) {
                        callee_locals.push((p.clone(), self.eval(a, locals)?));
                    }
                    let parent = self.stack.last().expect("frame").node;
                    let node = self.child(parent, c.span);
                    self.stack.push(Frame {
                        node,
                        occ: None,
                        iter: 0,
                    });
                    self.exec(&def.body, &mut callee_locals)?;
                    self.stack.pop();
                }
                Stmt::For(f) => {
                    let start = self.eval(&f.start, locals)?;
                    let end = self.eval(&f.end, locals)?;
                    if start < 0 || end < 0 {
                        return Err(compile_err(f.span.loc, format!("negative loop range {start}..{end}")));
                    }
                    if end < start {
                        return Err(compile_err(f.span.loc, format!("inverted loop range {start}..{end}")));
                    }
                    let parent = self.stack.last().expect("frame").node;
                    let node = self.child(parent, f.span);
                    self.stack.push(Frame {
                        node,
                        occ: None,
                        iter: 0,
                    });
                    for (k, v) in (start..end).enumerate() {
                        self.stack.last_mut().expect("frame").iter = k as u32 + 1;
                        locals.push((f.var.clone(), v));
                        let r = self.exec(&f.body, locals);
                        locals.pop();
                        r?;
                    }
                    self.stack.pop();
                }
            }
        }
        Ok(())
    }

    fn emit(&mut self, g: &GateCall, locals: &[(String, i64)]) -> Result<()> {
        let mut operands = Vec::with_capacity(g.operands.len());
        for (e, role) in g.operands.iter().zip(g.gate.roles()) {
            let idx = self.eval(e, locals)?;
            if idx < 0 || idx >= self.qubits {
                return Err(compile_err(
                    e.span().loc,
                    format!(
                        "qubit index out of range: q[{idx}] (circuit has {} qubits)",
                        self.qubits
                    ),
                ));
            }
            let q = QubitId(idx as u32);
            if operands.iter().any(|o: &Operand| o.q == q) {
                return Err(compile_err(
                    g.span.loc,
                    format!("operands not distinct: q[{idx}] used twice"),
                ));
            }
            operands.push(Operand { q, role: *role });
        }
        if self.gates.len() >= MAX_GATES {
            return Err(compile_err(g.span.loc, format!("more than {MAX_GATES} gates emitted")));
        }
        // occurrences are assigned on first emission so that dynamic entries
        // that emit nothing leave no gaps
        for frame in self.stack.iter_mut() {
            if frame.occ.is_none() {
                let c = &mut self.counters[frame.node.index()];
                *c += 1;
                frame.occ = Some(*c);
            }
        }
        let t = self.gates.len() as u32;
        let occ_path: Vec<u32> = self.stack.iter().map(|f| f.occ.unwrap_or(0)).collect();
        self.gates.push(GateInstance {
            id: t,
            kind: g.gate,
            operands,
            params: g.params.iter().map(|p| p.text.clone()).collect(),
            timestamp: t,
            tree_path: self.stack.iter().map(|f| f.node).collect(),
            occ: *occ_path.last().expect("root frame"),
            occ_path,
            iter_path: self.stack.iter().map(|f| f.iter).collect(),
        });
        Ok(())
    }
}

/// Executes the circuit body abstractly, emitting one gate instance per
/// dynamic gate call with node alignment data.
pub fn compile(program: &Program, tree: &SemanticTree, params: &Params) -> Result<CircuitModel> {
    let mut children = HashMap::new();
    for n in &tree.nodes {
        if let (Some(p), Some(site)) = (n.parent, n.site) {
            children.insert((p, site), n.id);
        }
    }
    let main = *tree
        .node(NodeId::ROOT)
        .children
        .first()
        .ok_or_else(|| Error::Domain("semantic tree has no circuit node".into()))?;

    let mut interp = Interp {
        program,
        params,
        children,
        counters: vec![0; tree.len()],
        stack: vec![
            Frame {
                node: NodeId::ROOT,
                occ: None,
                iter: 0,
            },
            Frame {
                node: main,
                occ: None,
                iter: 0,
            },
        ],
        gates: Vec::new(),
        qubits: 0,
    };
    let n = interp.eval(&program.circuit.qubits, &[])?;
    if n < 1 || n > u32::MAX as i64 {
        return Err(compile_err(
            program.circuit.qubits.span().loc,
            format!("qubit count must be positive, got {n}"),
        ));
    }
    interp.qubits = n;
    interp.exec(&program.circuit.body, &mut Vec::new())?;
    Ok(CircuitModel {
        qubit_count: n as u32,
        gates: interp.gates,
        tree: tree.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parser::parse;

    fn labels(tree: &SemanticTree, id: NodeId) -> String {
        let n = tree.node(id);
        if n.children.is_empty() {
            n.label.clone()
        } else {
            let kids: Vec<_> = n.children.iter().map(|c| labels(tree, *c)).collect();
            format!("{}→{{{}}}", n.label, kids.join(", "))
        }
    }

    #[test]
    fn call_sites_become_distinct_nodes() {
        // hand trace: main has two call sites of f; each f expands its own g
        let src = "def g() { x q[0]; }\ndef f() { g(); }\ncircuit main(1) { f(); f(); }";
        let tree = build_semantic_tree(&parse(src).unwrap()).unwrap();
        assert_eq!(labels(&tree, NodeId::ROOT), "root→{main→{f→{g}, f→{g}}}");
        assert_eq!(tree.len(), 6);
        let f1 = tree.node(NodeId(1)).children[0];
        let f2 = tree.node(NodeId(1)).children[1];
        assert_ne!(f1, f2);
    }

    #[test]
    fn flat_and_loop_trees() {
        let tree = build_semantic_tree(&parse("circuit main(3) { h q[0]; x q[1]; z q[2]; }").unwrap()).unwrap();
        assert_eq!(labels(&tree, NodeId::ROOT), "root→{main}");
        let tree = build_semantic_tree(&parse("circuit main(n) {\n for i in 0..n { h q[i]; } }").unwrap()).unwrap();
        assert_eq!(labels(&tree, NodeId::ROOT), "root→{main→{for@2}}");
        assert_eq!(tree.node(NodeId(2)).kind, NodeKind::Loop);
    }

    #[test]
    fn undefined_and_recursive_calls() {
        let err = build_semantic_tree(&parse("circuit main(1) { nope(); }").unwrap()).unwrap_err();
        assert!(err.to_string().contains("undefined function"));
        let src = "def a() { b(); } def b() { a(); } circuit main(1) { a(); }";
        let err = build_semantic_tree(&parse(src).unwrap()).unwrap_err();
        assert!(err.to_string().contains("recursive"));
        let err = build_semantic_tree(&parse("def f(a) { } circuit main(1) { f(); }").unwrap()).unwrap_err();
        assert!(err.to_string().contains("expects 1 argument"));
    }

    fn run(src: &str, params: &[(&str, i64)]) -> Result<CircuitModel> {
        let p = parse(src)?;
        let tree = build_semantic_tree(&p)?;
        let params: Params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        compile(&p, &tree, &params)
    }

    #[test]
    fn ghz_timestamps_and_paths() {
        let m = run(
            "circuit main(n) { h q[0]; for i in 0..n-1 { cx q[i], q[i+1]; } }",
            &[("n", 3)],
        )
        .unwrap();
        assert_eq!(m.gates.len(), 3);
        assert_eq!(m.gates.iter().map(|g| g.timestamp).collect::<Vec<_>>(), vec![0, 1, 2]);
        let loop_node = m.tree.node(NodeId(1)).children[0];
        assert_eq!(m.gates[0].leaf(), NodeId(1));
        assert!(m.gates[1..].iter().all(|g| g.leaf() == loop_node));
        assert_eq!(m.gates[1].iter_path, vec![0, 0, 1]);
        assert_eq!(m.gates[2].iter_path, vec![0, 0, 2]);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn occurrences_count_dynamic_entries() {
        // one call site executed twice from a loop: same node, occurrences 1 and 2
        let m = run("def f() { h q[0]; }\ncircuit main(1) { for i in 0..2 { f(); } }", &[]).unwrap();
        assert_eq!(m.gates.len(), 2);
        assert_eq!(m.gates[0].tree_path, m.gates[1].tree_path);
        assert_eq!((m.gates[0].occ, m.gates[1].occ), (1, 2));
        // the loop itself was entered once
        assert_eq!(m.gates[0].occ_path[2], 1);
        assert_eq!(m.gates[1].occ_path[2], 1);

        // two call sites: two nodes, each entered once
        let m = run("def f() { h q[0]; }\ncircuit main(1) { f(); f(); }", &[]).unwrap();
        assert_ne!(m.gates[0].tree_path, m.gates[1].tree_path);
        assert_eq!((m.gates[0].occ, m.gates[1].occ), (1, 1));
    }

    #[test]
    fn empty_entries_leave_no_gaps() {
        let src = "def f(k) { for j in 0..k { x q[j]; } }\ncircuit main(3) { f(0); for i in 0..3 { f(i); } }";
        let m = run(src, &[]).unwrap();
        // inner f call site executes with k=0,1,2; only k=1,2 emit gates
        let f_in_loop: Vec<u32> = m
            .gates
            .iter()
            .filter(|g| g.tree_path.len() >= 4)
            .map(|g| g.occ_path[3])
            .collect();
        assert_eq!(f_in_loop, vec![1, 2, 2]);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn compile_errors() {
        let err = run("circuit main(2){ h q[5]; }", &[]).unwrap_err();
        assert!(err.to_string().contains("qubit index out of range"), "{err}");
        assert_eq!(err.location().unwrap().line, 1);
        let err = run("circuit main(n){ h q[0]; }", &[]).unwrap_err();
        assert!(err.to_string().contains("parameter unbound: n"), "{err}");
        let err = run("circuit main(3){ for i in 2..1 { h q[i]; } }", &[]).unwrap_err();
        assert!(err.to_string().contains("inverted loop range"), "{err}");
        let err = run("circuit main(3){ for i in 0-1..1 { h q[0]; } }", &[]).unwrap_err();
        assert!(err.to_string().contains("negative loop range"), "{err}");
        let err = run("circuit main(3){ cx q[1], q[1]; }", &[]).unwrap_err();
        assert!(err.to_string().contains("operands not distinct"), "{err}");
        let err = run("circuit main(3){ h q[1/0]; }", &[]).unwrap_err();
        assert!(err.to_string().contains("division by zero"), "{err}");
        let err = run("circuit main(0){ }", &[]).unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
    }

    #[test]
    fn angle_params_are_not_evaluated() {
        let m = run("circuit main(1){ rz(theta * 0.5) q[0]; }", &[]).unwrap();
        assert_eq!(m.gates[0].params, vec!["theta * 0.5"]);
    }

    #[test]
    fn function_scope_does_not_leak() {
        let err = run("def f() { h q[i]; }\ncircuit main(2){ for i in 0..2 { f(); } }", &[]).unwrap_err();
        assert!(err.to_string().contains("parameter unbound: i"), "{err}");
    }
}
