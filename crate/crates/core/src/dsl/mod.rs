//! Circuit DSL frontend: parsing, semantic tree extraction, abstract
//! execution with node alignment, and loop repetition classification.

pub mod ast;
pub mod classify;
pub mod compile;
pub mod lexer;
pub mod parser;
pub mod tree;

pub use classify::classify_loops;
pub use compile::{build_semantic_tree, compile, Params};
pub use parser::parse;
pub use tree::{Direction, NodeId, NodeKind, RepetitionKind, SemanticTree, TreeNode};

use crate::error::Result;
use crate::model::CircuitModel;

/// parse → build tree → compile → classify, in one call.
pub fn compile_source(src: &str, params: &[(&str, i64)]) -> Result<CircuitModel> {
    let params: Params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    compile_with(src, &params)
}

pub fn compile_with(src: &str, params: &Params) -> Result<CircuitModel> {
    let program = parse(src)?;
    let tree = build_semantic_tree(&program)?;
    let mut model = compile(&program, &tree, params)?;
    model.tree = classify_loops(&model);
    Ok(model)
}
