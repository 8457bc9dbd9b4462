//! View dispatch shared by the CLI and the C interface.

use std::str::FromStr;

use serde::Deserialize;

use crate::abstraction::abstract_diagram;
use crate::context::{connectivity, entanglement_history, placement_context, provenance};
use crate::dsl::NodeId;
use crate::error::{Error, Result};
use crate::model::{CircuitModel, QubitId};
use crate::render::{
    render_abstraction, render_component, render_connectivity, render_placement, render_provenance, RenderTheme,
};
use crate::segment::{segment, FoldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewKind {
    Component,
    Abstraction,
    Provenance,
    Placement,
    Connectivity,
}

impl FromStr for ViewKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "component" => ViewKind::Component,
            "abstraction" => ViewKind::Abstraction,
            "provenance" => ViewKind::Provenance,
            "placement" => ViewKind::Placement,
            "connectivity" => ViewKind::Connectivity,
            other => return Err(Error::Domain(format!("unknown view {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct ViewOptions {
    /// Unfold every node shallower than this depth (root is depth 0).
    pub fold_depth: Option<usize>,
    /// Explicit unfolded node ids; ignored when `fold_depth` is set.
    pub unfolded: Option<Vec<u32>>,
    pub qubit: Option<u32>,
    /// Connectivity scope.
    pub node: Option<u32>,
    pub threshold: u32,
    /// Emit the view's JSON payload instead of SVG.
    pub json: bool,
}

impl Default for ViewOptions {
    fn default() -> Self {
        ViewOptions {
            fold_depth: None,
            unfolded: None,
            qubit: None,
            node: None,
            threshold: 1,
            json: false,
        }
    }
}

impl ViewOptions {
    /// The requested fold state, fully expanded when none is given.
    pub fn fold(&self, model: &CircuitModel) -> Result<FoldState> {
        let fold = match (&self.fold_depth, &self.unfolded) {
            (Some(k), _) => FoldState::to_depth(&model.tree, *k),
            (None, Some(ids)) => FoldState::with_unfolded(ids.iter().copied().map(NodeId)),
            (None, None) => FoldState::expanded(&model.tree),
        };
        fold.check(&model.tree)?;
        Ok(fold)
    }
}

pub fn render_view(model: &CircuitModel, view: ViewKind, opts: &ViewOptions, theme: &RenderTheme) -> Result<String> {
    let diagram = segment(model, &opts.fold(model)?);
    Ok(match view {
        ViewKind::Component if opts.json => diagram.to_json(),
        ViewKind::Component => render_component(&diagram, theme),
        ViewKind::Abstraction => {
            let a = abstract_diagram(&diagram, &model.tree);
            if opts.json {
                a.to_json()
            } else {
                render_abstraction(&a, theme)
            }
        }
        ViewKind::Provenance => {
            let q = opts
                .qubit
                .ok_or_else(|| Error::Domain("provenance view needs a qubit".into()))?;
            let tl = provenance(model, &diagram, QubitId(q))?;
            if opts.json {
                payload(&tl)
            } else {
                render_provenance(&tl, theme)
            }
        }
        ViewKind::Placement => {
            let ctx = placement_context(model, &diagram, opts.threshold)?;
            if opts.json {
                payload(&ctx)
            } else {
                render_placement(&diagram, &ctx, theme)
            }
        }
        ViewKind::Connectivity => {
            let scope = opts.node.map(NodeId);
            let m = connectivity(model, scope)?;
            if opts.json {
                m.to_json().to_string()
            } else {
                let full = connectivity(model, None)?;
                render_connectivity(&full, scope.map(|_| &m), &entanglement_history(model), theme)
            }
        }
    })
}

fn payload<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("payload serializes")
}
