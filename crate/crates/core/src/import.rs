//! Flat gate-list import for circuits without source structure.
//!
//! ```json
//! {"qubits": 3, "gates": [{"gate": "h", "qubits": [0]}, {"gate": "rz", "qubits": [1], "params": ["pi/4"]}]}
//! ```
//!
//! Every gate lands directly under the root node.

use serde::Deserialize;

use crate::dsl::tree::{NodeId, SemanticTree};
use crate::error::{Error, Result};
use crate::model::{CircuitModel, GateInstance, GateName, Operand, QubitId};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatCircuit {
    qubits: u32,
    gates: Vec<FlatGate>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatGate {
    #[serde(alias = "kind", alias = "name")]
    gate: String,
    qubits: Vec<u32>,
    #[serde(default)]
    params: Vec<serde_json::Value>,
}

fn param_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn import_flat(text: &str) -> Result<CircuitModel> {
    let flat: FlatCircuit = serde_json::from_str(text)?;
    if flat.qubits == 0 {
        return Err(Error::Domain("qubit count must be positive".into()));
    }
    let mut gates = Vec::with_capacity(flat.gates.len());
    for (i, g) in flat.gates.iter().enumerate() {
        let at = |msg: String| Error::Domain(format!("gate {i}: {msg}"));
        let kind = GateName::from_name(&g.gate).ok_or_else(|| at(format!("unknown gate {:?}", g.gate)))?;
        if g.qubits.len() != kind.arity() {
            return Err(at(format!(
                "{} takes {} qubits, got {}",
                kind.name(),
                kind.arity(),
                g.qubits.len()
            )));
        }
        if g.params.len() != kind.param_count() {
            return Err(at(format!(
                "{} takes {} angles, got {}",
                kind.name(),
                kind.param_count(),
                g.params.len()
            )));
        }
        for (a, q) in g.qubits.iter().enumerate() {
            if *q >= flat.qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: *q,
                    count: flat.qubits,
                });
            }
            if g.qubits[..a].contains(q) {
                return Err(at("operands not distinct".into()));
            }
        }
        gates.push(GateInstance {
            id: i as u32,
            kind,
            operands: g
                .qubits
                .iter()
                .zip(kind.roles())
                .map(|(q, role)| Operand {
                    q: QubitId(*q),
                    role: *role,
                })
                .collect(),
            params: g.params.iter().map(param_text).collect(),
            timestamp: i as u32,
            tree_path: vec![NodeId::ROOT],
            occ: 1,
            occ_path: vec![1],
            iter_path: vec![0],
        });
    }
    Ok(CircuitModel {
        qubit_count: flat.qubits,
        gates,
        tree: SemanticTree::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Role;

    #[test]
    fn imports_ghz() {
        let m = import_flat(
            r#"{"qubits":3,"gates":[{"gate":"h","qubits":[0]},{"kind":"cx","qubits":[0,1]},{"name":"cx","qubits":[1,2]}]}"#,
        )
        .unwrap();
        assert!(m.validate().is_empty());
        assert_eq!(m.tree.nodes.len(), 1);
        assert_eq!(m.gates[1].operands[0].role, Role::Control);
        assert_eq!(m.gates[2].timestamp, 2);
    }

    #[test]
    fn numeric_params_keep_their_text() {
        let m = import_flat(r#"{"qubits":1,"gates":[{"gate":"rz","qubits":[0],"params":[0.5]}]}"#).unwrap();
        assert_eq!(m.gates[0].params, vec!["0.5"]);
    }

    #[test]
    fn rejects_bad_gates() {
        for bad in [
            r#"{"qubits":2,"gates":[{"gate":"foo","qubits":[0]}]}"#,
            r#"{"qubits":2,"gates":[{"gate":"cx","qubits":[0]}]}"#,
            r#"{"qubits":2,"gates":[{"gate":"cx","qubits":[0,0]}]}"#,
            r#"{"qubits":2,"gates":[{"gate":"h","qubits":[2]}]}"#,
            r#"{"qubits":2,"gates":[{"gate":"rz","qubits":[0]}]}"#,
            r#"{"qubits":0,"gates":[]}"#,
            r#"{"qubits":1}"#,
        ] {
            assert!(import_flat(bad).is_err(), "{bad}");
        }
    }
}
