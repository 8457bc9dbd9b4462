//! Bundled example programs and the fold states used to inspect them.

use crate::dsl::{compile_source, NodeId, SemanticTree};
use crate::error::Result;
use crate::model::CircuitModel;
use crate::segment::FoldState;

pub const GHZ: &str = include_str!("../fixtures/ghz.qv");
pub const QUGAN: &str = include_str!("../fixtures/qugan.qv");
pub const MULTIPLIER: &str = include_str!("../fixtures/multiplier.qv");
pub const MULTIPLIER_MISORDERED: &str = include_str!("../fixtures/multiplier_misordered.qv");

/// Fixture sources by name, as accepted by the CLI.
pub const ALL: &[(&str, &str)] = &[
    ("ghz", GHZ),
    ("qugan", QUGAN),
    ("multiplier", MULTIPLIER),
    ("multiplier_misordered", MULTIPLIER_MISORDERED),
];

pub fn ghz(n: i64) -> Result<CircuitModel> {
    compile_source(GHZ, &[("n", n)])
}

/// QuGAN on `n = 2k + 1` qubits.
pub fn qugan(n: i64) -> Result<CircuitModel> {
    compile_source(QUGAN, &[("n", n)])
}

pub fn multiplier() -> Result<CircuitModel> {
    compile_source(MULTIPLIER, &[])
}

pub fn multiplier_misordered() -> Result<CircuitModel> {
    compile_source(MULTIPLIER_MISORDERED, &[])
}

fn unfold_labels(tree: &SemanticTree, labels: &[&str]) -> FoldState {
    let ids = labels.iter().flat_map(|l| tree.find_all(l));
    FoldState::with_unfolded(std::iter::once(NodeId::ROOT).chain(ids))
}

/// Top level with the SWAP test opened: q[0] reads H, CSWAPs, H.
pub fn qugan_scenario_fold(tree: &SemanticTree) -> FoldState {
    unfold_labels(tree, &["main", "SWAP_Test"])
}

/// All three top-level components opened one level.
pub fn qugan_overview_fold(tree: &SemanticTree) -> FoldState {
    unfold_labels(tree, &["main", "Discriminator", "Generator", "SWAP_Test"])
}
