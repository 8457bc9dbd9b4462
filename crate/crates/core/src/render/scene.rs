//! Circuit drawing shared by the component, abstraction and placement views.
//! Both diagram kinds are lowered to a [`Scene`], so a diagram without
//! abstracted repetitions draws byte-identically in either view.

use std::collections::BTreeSet;

use super::svg::{num, Svg};
use super::theme::RenderTheme;
use crate::abstraction::{AbsRow, AbstractionDiagram, Axis, Band, BandCross, LegendEntry};
use crate::model::{GateName, Role};
use crate::segment::{ComponentDiagram, SuperKind};

#[derive(Debug, Clone, PartialEq)]
pub struct SceneGate {
    pub id: u32,
    pub label: String,
    pub kind: SuperKind,
    pub gate: Option<GateName>,
    pub size: u32,
    pub col: u32,
    pub rows: Vec<u32>,
    pub operands: Vec<(u32, Role)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub rows: Vec<AbsRow>,
    pub width: u32,
    pub band_cols: Vec<u32>,
    pub gates: Vec<SceneGate>,
    pub bands: Vec<Band>,
    pub crosses: Vec<BandCross>,
    /// Only repetitions that were actually shortened.
    pub legend: Vec<LegendEntry>,
}

impl From<&ComponentDiagram> for Scene {
    fn from(d: &ComponentDiagram) -> Self {
        let gates = d
            .super_gates
            .iter()
            .map(|sg| {
                let mut rows: Vec<u32> = sg.qubits.iter().map(|q| d.row_of(*q) as u32).collect();
                rows.dedup();
                SceneGate {
                    id: sg.id,
                    label: sg.label.clone(),
                    kind: sg.kind,
                    gate: sg.gate,
                    size: sg.members.len() as u32,
                    col: sg.col,
                    rows,
                    operands: sg.operands.iter().map(|o| (d.row_of(o.q) as u32, o.role)).collect(),
                }
            })
            .collect();
        Scene {
            rows: d
                .super_bits
                .iter()
                .map(|b| AbsRow::Wire {
                    from: b.from.0,
                    to: b.to.0,
                })
                .collect(),
            width: d.width,
            band_cols: Vec::new(),
            gates,
            bands: Vec::new(),
            crosses: Vec::new(),
            legend: Vec::new(),
        }
    }
}

impl From<&AbstractionDiagram> for Scene {
    fn from(a: &AbstractionDiagram) -> Self {
        Scene {
            rows: a.rows.clone(),
            width: a.width,
            band_cols: a.band_cols.clone(),
            gates: a
                .gates
                .iter()
                .map(|g| SceneGate {
                    id: g.id,
                    label: g.label.clone(),
                    kind: g.kind,
                    gate: g.gate,
                    size: g.size,
                    col: g.col,
                    rows: g.rows.clone(),
                    operands: g.operands.clone(),
                })
                .collect(),
            bands: a.bands.clone(),
            crosses: a.crosses.clone(),
            legend: a.legend.iter().filter(|l| l.abstracted).cloned().collect(),
        }
    }
}

pub fn wire_label(from: u32, to: u32) -> String {
    if from == to {
        format!("q[{from}]")
    } else {
        format!("q[{from}..{to}]")
    }
}

/// Approximate glyph advance of the theme font.
pub fn char_width(theme: &RenderTheme) -> f64 {
    theme.font_size as f64 * 0.6
}

/// Fits `label` into `cap` characters. Truncated multi-gate labels keep a
/// count suffix such as "Unitary ×4"; single gates end in an ellipsis.
pub fn fit_label(label: &str, size: u32, cap: usize) -> String {
    let len = label.chars().count();
    if len <= cap {
        return label.to_string();
    }
    let suffix = if size > 1 { format!(" ×{size}") } else { "…".into() };
    let keep = cap.saturating_sub(suffix.chars().count()).max(1);
    let mut out: String = label.chars().take(keep).collect();
    out.push_str(&suffix);
    out
}

/// Pixel placement of grid cells.
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    pub unit: f64,
    pub left: f64,
    pub top: f64,
}

impl Geometry {
    pub fn for_scene(scene: &Scene, theme: &RenderTheme) -> Self {
        let longest = scene
            .rows
            .iter()
            .map(|r| match r {
                AbsRow::Wire { from, to } => wire_label(*from, *to).chars().count(),
                AbsRow::Band { .. } => 4,
            })
            .max()
            .unwrap_or(4);
        let unit = theme.unit as f64;
        Geometry {
            unit,
            left: (longest as f64 * char_width(theme) + 12.0).ceil(),
            top: (unit / 2.0).round(),
        }
    }

    pub fn col_left(&self, c: u32) -> f64 {
        self.left + c as f64 * self.unit
    }

    pub fn x(&self, c: u32) -> f64 {
        self.col_left(c) + self.unit / 2.0
    }

    pub fn row_top(&self, r: u32) -> f64 {
        self.top + r as f64 * self.unit
    }

    pub fn y(&self, r: u32) -> f64 {
        self.row_top(r) + self.unit / 2.0
    }

    pub fn grid_right(&self, width: u32) -> f64 {
        self.col_left(width)
    }
}

pub fn legend_height(scene: &Scene, theme: &RenderTheme) -> f64 {
    if scene.legend.is_empty() {
        0.0
    } else {
        (scene.legend.len() as f64 + 0.5) * (theme.font_size as f64 + 6.0)
    }
}

/// Canvas size for a scene, with one spare unit on the right.
pub fn canvas(scene: &Scene, geo: &Geometry, theme: &RenderTheme) -> (f64, f64) {
    let w = geo.grid_right(scene.width) + geo.unit;
    let h = geo.row_top(scene.rows.len() as u32) + geo.top + legend_height(scene, theme);
    (w, h)
}

/// Wires with their labels. Band columns draw dashed wire segments.
pub fn draw_wires(svg: &mut Svg, scene: &Scene, geo: &Geometry, theme: &RenderTheme) {
    let band_cols: BTreeSet<u32> = scene.band_cols.iter().copied().collect();
    // consecutive columns with the same style merge into one segment
    let mut segments: Vec<(u32, u32, bool)> = Vec::new();
    for c in 0..scene.width {
        let dashed = band_cols.contains(&c);
        match segments.last_mut() {
            Some(s) if s.2 == dashed => s.1 = c + 1,
            _ => segments.push((c, c + 1, dashed)),
        }
    }
    svg.open("g", &[("class", "wires".into()), ("stroke", theme.wire.clone())]);
    for (r, row) in scene.rows.iter().enumerate() {
        let AbsRow::Wire { from, to } = row else { continue };
        let y = geo.y(r as u32);
        let bundled = from != to;
        svg.open(
            "g",
            &[
                ("id", format!("wire-{r}")),
                ("class", if bundled { "wire bundled" } else { "wire" }.into()),
            ],
        );
        svg.text(
            geo.left - 6.0,
            y + theme.font_size as f64 / 3.0,
            &wire_label(*from, *to),
            &[
                ("text-anchor", "end".into()),
                ("fill", theme.text.clone()),
                ("stroke", "none".into()),
            ],
        );
        let offsets: &[f64] = if bundled { &[-2.0, 2.0] } else { &[0.0] };
        let full = if segments.is_empty() {
            vec![(0, 0, false)]
        } else {
            segments.clone()
        };
        for (a, b, dashed) in &full {
            let x1 = geo.col_left(*a);
            let x2 = if segments.is_empty() {
                geo.left + geo.unit / 2.0
            } else {
                geo.col_left(*b)
            };
            for dy in offsets {
                let mut extra = Vec::new();
                if *dashed {
                    extra.push(("stroke-dasharray", "2 3".to_string()));
                }
                svg.line(x1, y + dy, x2, y + dy, &extra);
            }
        }
        svg.close("g");
    }
    svg.close("g");
}

fn three_dots(svg: &mut Svg, x: f64, y: f64, dx: f64, dy: f64, r: f64) {
    for k in -1..=1 {
        svg.circle(x + k as f64 * dx, y + k as f64 * dy, r, &[]);
    }
}

/// Ellipsis bands: vertical dots where hidden rows cross visible columns,
/// horizontal dots for hidden columns, diagonal dots for diagonal crossings.
pub fn draw_bands(svg: &mut Svg, scene: &Scene, geo: &Geometry, theme: &RenderTheme) {
    if scene.bands.is_empty() {
        return;
    }
    let step = geo.unit / 4.0;
    let r = (geo.unit / 16.0).max(1.5);
    svg.open("g", &[("class", "bands".into()), ("fill", theme.dots.clone())]);
    for (i, band) in scene.bands.iter().enumerate() {
        svg.open(
            "g",
            &[
                ("id", format!("band-{i}")),
                (
                    "class",
                    format!("band {}", if band.axis == Axis::Row { "row" } else { "col" }),
                ),
                ("data-count", band.count.to_string()),
            ],
        );
        svg.text_el(
            "title",
            &[],
            &format!(
                "{} hidden {}",
                band.count,
                if band.axis == Axis::Row { "wires" } else { "columns" }
            ),
        );
        match band.axis {
            Axis::Row => {
                let y = geo.y(band.at);
                svg.text(
                    geo.left - 6.0,
                    y + theme.font_size as f64 / 3.0,
                    &format!("({})", band.count),
                    &[("text-anchor", "end".into())],
                );
                for c in &band.dots {
                    three_dots(svg, geo.x(*c), y, 0.0, step, r);
                }
            }
            Axis::Col => {
                let x = geo.x(band.at);
                for row in &band.dots {
                    three_dots(svg, x, geo.y(*row), step, 0.0, r);
                }
            }
        }
        svg.close("g");
    }
    for cross in &scene.crosses {
        let rb = &scene.bands[cross.row_band as usize];
        let cb = &scene.bands[cross.col_band as usize];
        let (x, y) = (geo.x(cb.at), geo.y(rb.at));
        let dy = if cross.diagonal { step } else { 0.0 };
        svg.open(
            "g",
            &[
                ("class", if cross.diagonal { "cross diagonal" } else { "cross" }.into()),
                ("data-bands", format!("{} {}", cross.row_band, cross.col_band)),
            ],
        );
        three_dots(svg, x, y, step, dy, r);
        svg.close("g");
    }
    svg.close("g");
}

fn label_box(svg: &mut Svg, x: f64, y: f64, label: &str, geo: &Geometry, theme: &RenderTheme) {
    let pad = 4.0;
    let side = geo.unit - 2.0 * pad;
    svg.rect(
        x - side / 2.0,
        y - side / 2.0,
        side,
        side,
        &[("fill", theme.gate_fill.clone()), ("stroke", theme.gate_stroke.clone())],
    );
    let cap = ((side - 2.0) / char_width(theme)).floor().max(1.0) as usize;
    svg.text(
        x,
        y + theme.font_size as f64 / 3.0,
        &fit_label(label, 1, cap),
        &[("text-anchor", "middle".into()), ("fill", theme.text.clone())],
    );
}

fn draw_primitive(svg: &mut Svg, g: &SceneGate, geo: &Geometry, theme: &RenderTheme) {
    let x = geo.x(g.col);
    let gate = g.gate;
    let all_plain = g.operands.iter().all(|(_, r)| *r == Role::Plain);
    let min = g.rows.iter().min().copied().unwrap_or(0);
    let max = g.rows.iter().max().copied().unwrap_or(0);
    if all_plain {
        if min == max {
            label_box(svg, x, geo.y(min), &g.label, geo, theme);
        } else {
            // symmetric multi-qubit gate: one box across its wires
            let pad = 4.0;
            let (top, bottom) = (geo.row_top(min) + pad, geo.row_top(max) + geo.unit - pad);
            svg.rect(
                x - geo.unit / 2.0 + pad,
                top,
                geo.unit - 2.0 * pad,
                bottom - top,
                &[("fill", theme.gate_fill.clone()), ("stroke", theme.gate_stroke.clone())],
            );
            let cap = ((geo.unit - 2.0 * pad - 2.0) / char_width(theme)).floor().max(1.0) as usize;
            svg.text(
                x,
                (top + bottom) / 2.0 + theme.font_size as f64 / 3.0,
                &fit_label(&g.label, 1, cap),
                &[("text-anchor", "middle".into()), ("fill", theme.text.clone())],
            );
        }
        return;
    }
    let ys: Vec<f64> = g.operands.iter().map(|(r, _)| geo.y(*r)).collect();
    let (lo, hi) = ys.iter().fold((f64::MAX, f64::MIN), |(a, b), y| (a.min(*y), b.max(*y)));
    svg.line(x, lo, x, hi, &[("stroke", theme.control.clone())]);
    let dot = (geo.unit / 8.0).max(3.0);
    let ring = geo.unit * 0.28;
    for (row, role) in &g.operands {
        let y = geo.y(*row);
        match (role, gate) {
            (Role::Control, _) | (Role::Target, Some(GateName::Cz)) => {
                svg.circle(x, y, dot, &[("fill", theme.control.clone())]);
            }
            (Role::Target, Some(GateName::Cx | GateName::Ccx)) => {
                svg.circle(
                    x,
                    y,
                    ring,
                    &[("fill", theme.background.clone()), ("stroke", theme.control.clone())],
                );
                let s = &[("stroke", theme.control.clone())];
                svg.line(x - ring, y, x + ring, y, s);
                svg.line(x, y - ring, x, y + ring, s);
            }
            (Role::Target, Some(GateName::Swap | GateName::Cswap)) => {
                let d = ring * 0.7;
                let s = &[("stroke", theme.control.clone()), ("stroke-width", "2".into())];
                svg.line(x - d, y - d, x + d, y + d, s);
                svg.line(x - d, y + d, x + d, y - d, s);
            }
            _ => {
                // controlled rotation target shows the rotation name
                let label = g.label.strip_prefix('C').filter(|l| !l.is_empty()).unwrap_or(&g.label);
                label_box(svg, x, y, label, geo, theme);
            }
        }
    }
}

fn draw_component(svg: &mut Svg, g: &SceneGate, geo: &Geometry, theme: &RenderTheme) {
    let min = g.rows.iter().min().copied().unwrap_or(0);
    let max = g.rows.iter().max().copied().unwrap_or(0);
    let pad = 3.0;
    let (x0, y0) = (geo.col_left(g.col) + pad, geo.row_top(min) + pad);
    let (w, h) = (geo.unit - 2.0 * pad, (max - min + 1) as f64 * geo.unit - 2.0 * pad);
    svg.rect(
        x0,
        y0,
        w,
        h,
        &[
            ("rx", "3".into()),
            ("fill", theme.component_fill.clone()),
            ("stroke", theme.component_stroke.clone()),
        ],
    );
    let (cx, cy) = (x0 + w / 2.0, y0 + h / 2.0);
    let vertical = h > w;
    let room = if vertical { h } else { w } - 4.0;
    let cap = (room / char_width(theme)).floor().max(1.0) as usize;
    let text = fit_label(&g.label, g.size, cap);
    let mut attrs = vec![("text-anchor", "middle".to_string()), ("fill", theme.text.clone())];
    let fy = theme.font_size as f64 / 3.0;
    if vertical {
        attrs.push(("transform", format!("rotate(-90 {} {})", num(cx), num(cy))));
    }
    svg.text(cx, cy + fy, &text, &attrs);
}

/// One `<g id="sg-N">` element per super-gate.
pub fn draw_gate(svg: &mut Svg, g: &SceneGate, geo: &Geometry, theme: &RenderTheme) {
    let kind = match g.kind {
        SuperKind::Primitive => "primitive",
        SuperKind::Component => "component",
    };
    svg.open(
        "g",
        &[
            ("id", format!("sg-{}", g.id)),
            ("class", format!("sg {kind}")),
            ("data-col", g.col.to_string()),
        ],
    );
    svg.text_el("title", &[], &g.label);
    match g.kind {
        SuperKind::Primitive => draw_primitive(svg, g, geo, theme),
        SuperKind::Component => draw_component(svg, g, geo, theme),
    }
    svg.close("g");
}

pub fn draw_gates(svg: &mut Svg, scene: &Scene, geo: &Geometry, theme: &RenderTheme) {
    svg.open("g", &[("class", "gates".into())]);
    for g in &scene.gates {
        draw_gate(svg, g, geo, theme);
    }
    svg.close("g");
}

pub fn draw_legend(svg: &mut Svg, scene: &Scene, geo: &Geometry, theme: &RenderTheme) {
    if scene.legend.is_empty() {
        return;
    }
    let line = theme.font_size as f64 + 6.0;
    let base = geo.row_top(scene.rows.len() as u32) + geo.top;
    svg.open("g", &[("class", "legend".into()), ("fill", theme.text.clone())]);
    for (i, e) in scene.legend.iter().enumerate() {
        svg.text(
            geo.left,
            base + (i as f64 + 1.0) * line,
            &format!("{}: {} repetition ×{}", e.label, e.direction, e.iterations),
            &[("data-node", e.node.0.to_string())],
        );
    }
    svg.close("g");
}

pub fn render_scene(scene: &Scene, theme: &RenderTheme) -> String {
    let geo = Geometry::for_scene(scene, theme);
    let (w, h) = canvas(scene, &geo, theme);
    let mut svg = Svg::new(w, h, theme);
    draw_wires(&mut svg, scene, &geo, theme);
    draw_bands(&mut svg, scene, &geo, theme);
    draw_gates(&mut svg, scene, &geo, theme);
    draw_legend(&mut svg, scene, &geo, theme);
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_fitting() {
        assert_eq!(fit_label("H", 1, 3), "H");
        assert_eq!(fit_label("Unitary", 4, 10), "Unitary");
        assert_eq!(fit_label("Discriminator", 4, 10), "Discrim ×4");
        assert_eq!(fit_label("Discriminator", 1, 5), "Disc…");
        assert_eq!(fit_label("Discriminator", 12, 2), "D ×12");
    }
}
