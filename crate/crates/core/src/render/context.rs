//! Timeline, augmented-circuit and matrix views of the context analytics.

use super::scene::{canvas, char_width, draw_gates, draw_wires, fit_label, wire_label, Geometry, Scene};
use super::svg::Svg;
use super::theme::RenderTheme;
use crate::abstraction::AbsRow;
use crate::context::{ConnectivityMatrix, EntanglementHistory, PlacementContext, ProvenanceTimeline};
use crate::model::QubitId;
use crate::segment::ComponentDiagram;

/// Events of one qubit on a horizontal axis, spaced by column distance.
pub fn render_provenance(tl: &ProvenanceTimeline, theme: &RenderTheme) -> String {
    let unit = theme.unit as f64;
    let label = wire_label(tl.qubit.0, tl.qubit.0);
    let left = (label.chars().count() as f64 * char_width(theme) + 12.0).ceil();
    let span = tl.span.max(1);
    let (w, h) = (left + span as f64 * unit + unit, 2.0 * unit);
    let y = unit;
    let mut svg = Svg::new(w, h, theme);
    svg.text(
        left - 6.0,
        y + theme.font_size as f64 / 3.0,
        &label,
        &[("text-anchor", "end".into()), ("fill", theme.text.clone())],
    );
    svg.line(
        left,
        y,
        left + span as f64 * unit,
        y,
        &[("stroke", theme.wire.clone()), ("class", "axis".into())],
    );
    svg.open("g", &[("class", "ticks".into()), ("stroke", theme.dots.clone())]);
    for c in 0..=span {
        let x = left + c as f64 * unit;
        svg.line(x, y + unit / 2.0 - 4.0, x, y + unit / 2.0, &[]);
    }
    svg.close("g");
    let side = unit - 8.0;
    let cap = ((side - 2.0) / char_width(theme)).floor().max(1.0) as usize;
    svg.open("g", &[("class", "events".into())]);
    for e in &tl.events {
        let x = left + (e.column as f64 + 0.5) * unit;
        svg.open(
            "g",
            &[
                ("id", format!("pv-{}", e.super_gate)),
                ("class", "event".into()),
                ("data-col", e.column.to_string()),
            ],
        );
        svg.text_el("title", &[], &e.label);
        svg.rect(
            x - side / 2.0,
            y - side / 2.0,
            side,
            side,
            &[("fill", theme.gate_fill.clone()), ("stroke", theme.gate_stroke.clone())],
        );
        svg.text(
            x,
            y + theme.font_size as f64 / 3.0,
            &fit_label(&e.label, 1, cap),
            &[("text-anchor", "middle".into()), ("fill", theme.text.clone())],
        );
        svg.close("g");
    }
    svg.close("g");
    svg.finish()
}

/// Ramp index of an idle span length, by quartile of all observed lengths.
pub fn idle_bin(len: u32, sorted_lengths: &[u32]) -> usize {
    if sorted_lengths.is_empty() {
        return 0;
    }
    let n = sorted_lengths.len();
    let q = |p: usize| sorted_lengths[((p * n).div_ceil(4)).clamp(1, n) - 1];
    [q(1), q(2), q(3)].iter().filter(|b| len > **b).count()
}

/// Idle gaps of one wire as `(first column, length, gate before, gate after)`.
fn gaps(diagram: &ComponentDiagram, wire: QubitId) -> Vec<(u32, u32, Option<u32>, Option<u32>)> {
    let mut cols: Vec<(u32, u32)> = diagram
        .super_gates
        .iter()
        .filter(|sg| sg.touches(wire))
        .map(|sg| (sg.col, sg.id))
        .collect();
    cols.sort_unstable();
    let mut out = Vec::new();
    let mut next = 0u32;
    let mut prev = None;
    for (col, id) in cols {
        if col > next {
            out.push((next, col - next, prev, Some(id)));
        }
        next = col + 1;
        prev = Some(id);
    }
    if diagram.width > next {
        out.push((next, diagram.width - next, prev, None));
    }
    out
}

/// Component diagram with wire segments colored by parallelism level,
/// idle gaps shaded by length and idle-extent bars after each wire.
pub fn render_placement(diagram: &ComponentDiagram, ctx: &PlacementContext, theme: &RenderTheme) -> String {
    let scene = Scene::from(diagram);
    let geo = Geometry::for_scene(&scene, theme);
    let (w, h) = canvas(&scene, &geo, theme);
    let mut svg = Svg::new(w, h, theme);

    let rows: Vec<u32> = scene
        .rows
        .iter()
        .filter_map(|r| match r {
            AbsRow::Wire { from, .. } => Some(*from),
            AbsRow::Band { .. } => None,
        })
        .collect();

    // idle shading sits under everything else
    let all_gaps: Vec<Vec<_>> = rows.iter().map(|q| gaps(diagram, QubitId(*q))).collect();
    let mut lengths: Vec<u32> = all_gaps.iter().flatten().map(|g| g.1).collect();
    lengths.sort_unstable();
    svg.open("g", &[("class", "idle".into()), ("fill-opacity", "0.6".into())]);
    for (r, wire_gaps) in all_gaps.iter().enumerate() {
        for (start, len, before, after) in wire_gaps {
            let fmt = |g: &Option<u32>| g.map_or("-".to_string(), |g| g.to_string());
            svg.rect(
                geo.col_left(*start),
                geo.row_top(r as u32) + geo.unit * 0.2,
                *len as f64 * geo.unit,
                geo.unit * 0.6,
                &[
                    ("class", "gap".into()),
                    ("data-gates", format!("{} {}", fmt(before), fmt(after))),
                    ("fill", theme.idle_ramp[idle_bin(*len, &lengths)].clone()),
                ],
            );
        }
    }
    svg.close("g");

    draw_wires(&mut svg, &scene, &geo, theme);

    svg.open("g", &[("class", "levels".into()), ("stroke-width", "3".into())]);
    for r in 0..rows.len() {
        let y = geo.y(r as u32);
        let mut c = 0;
        while c < scene.width {
            let level = ctx.levels[c as usize];
            let mut end = c + 1;
            while end < scene.width && ctx.levels[end as usize] == level {
                end += 1;
            }
            svg.line(
                geo.col_left(c),
                y,
                geo.col_left(end),
                y,
                &[
                    ("class", format!("level-{level}")),
                    ("stroke", theme.parallelism_ramp[level as usize].clone()),
                ],
            );
            c = end;
        }
    }
    svg.close("g");

    draw_gates(&mut svg, &scene, &geo, theme);

    svg.open("g", &[("class", "idle-extent".into()), ("fill", theme.dots.clone())]);
    let bar = geo.unit - 8.0;
    for (r, q) in rows.iter().enumerate() {
        let extent = ctx.idle_extent[*q as usize];
        let x = geo.grid_right(scene.width) + 4.0;
        let y = geo.y(r as u32);
        svg.rect(
            x,
            y - 3.0,
            bar,
            6.0,
            &[("fill", theme.background.clone()), ("stroke", theme.dots.clone())],
        );
        svg.rect(x, y - 3.0, bar * extent, 6.0, &[("id", format!("ext-{r}"))]);
    }
    svg.close("g");
    svg.finish()
}

/// Connectivity matrix with optional highlighted scope cells and one
/// entanglement strip per snapshot, newest at the bottom.
pub fn render_connectivity(
    full: &ConnectivityMatrix,
    scope: Option<&ConnectivityMatrix>,
    history: &EntanglementHistory,
    theme: &RenderTheme,
) -> String {
    let n = full.n;
    let cell = (theme.unit as f64 / 2.0).max(4.0);
    let margin = (theme.unit as f64 * 1.5).ceil();
    let strip = (cell / 2.0).max(3.0);
    let gap = cell;
    let matrix = n as f64 * cell;
    let strips = history.snapshots.len() as f64;
    let (w, h) = (margin + matrix + cell, margin + matrix + gap + strips * strip + cell);
    let mut svg = Svg::new(w, h, theme);

    let label_every = if n <= 32 { 1 } else { 10 };
    svg.open("g", &[("class", "axes".into()), ("fill", theme.text.clone())]);
    for i in (0..n).step_by(label_every) {
        let mid = margin + (i as f64 + 0.5) * cell;
        svg.text(
            margin - 4.0,
            mid + theme.font_size as f64 / 3.0,
            &i.to_string(),
            &[("text-anchor", "end".into())],
        );
        svg.text(mid, margin - 4.0, &i.to_string(), &[("text-anchor", "middle".into())]);
    }
    svg.close("g");
    svg.rect(
        margin,
        margin,
        matrix,
        matrix,
        &[("fill", "none".into()), ("stroke", theme.wire.clone())],
    );

    let max = full.cells().iter().map(|c| c[2]).max().unwrap_or(1);
    svg.open("g", &[("class", "cells".into()), ("fill", theme.gate_stroke.clone())]);
    for [i, j, c] in full.cells() {
        let opacity = 0.25 + 0.75 * c as f64 / max as f64;
        let mut attrs = vec![
            ("id", format!("cell-{i}-{j}")),
            ("fill-opacity", super::svg::num(opacity)),
            ("data-count", c.to_string()),
        ];
        if scope.is_some_and(|s| s.get(i, j) > 0) {
            attrs.push(("class", "hl".into()));
            attrs.push(("fill", theme.highlight.clone()));
        }
        svg.rect(margin + j as f64 * cell, margin + i as f64 * cell, cell, cell, &attrs);
    }
    svg.close("g");

    let top = margin + matrix + gap;
    svg.open("g", &[("class", "entanglement".into())]);
    for (k, snap) in history.snapshots.iter().enumerate() {
        let y = top + k as f64 * strip;
        let t = snap.t.map_or("init".to_string(), |t| t.to_string());
        svg.open("g", &[("class", "snapshot".into()), ("data-t", t)]);
        for group in snap.groups.iter().filter(|g| g.len() > 1) {
            // a group keeps its smallest member's color as it grows
            let color = &theme.group_palette[group[0] as usize % theme.group_palette.len()];
            for q in group {
                svg.rect(margin + *q as f64 * cell, y, cell, strip, &[("fill", color.clone())]);
            }
        }
        svg.close("g");
    }
    svg.close("g");
    svg.finish()
}
