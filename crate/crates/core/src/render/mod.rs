//! Deterministic SVG output for every view.

pub mod context;
pub mod scene;
pub mod svg;
pub mod theme;

pub use context::{render_connectivity, render_placement, render_provenance};
pub use scene::{render_scene, Scene};
pub use theme::RenderTheme;

use crate::abstraction::AbstractionDiagram;
use crate::segment::ComponentDiagram;

pub fn render_component(diagram: &ComponentDiagram, theme: &RenderTheme) -> String {
    render_scene(&Scene::from(diagram), theme)
}

pub fn render_abstraction(diagram: &AbstractionDiagram, theme: &RenderTheme) -> String {
    render_scene(&Scene::from(diagram), theme)
}
