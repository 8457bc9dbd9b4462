//! Minimal streaming SVG writer with deterministic number formatting.

use std::fmt::Write;

use super::theme::RenderTheme;

/// Formats a coordinate with at most two decimals and no trailing zeros.
pub fn num(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub type Attrs<'a> = &'a [(&'a str, String)];

pub struct Svg {
    buf: String,
    depth: usize,
}

impl Svg {
    pub fn new(width: f64, height: f64, theme: &RenderTheme) -> Self {
        let mut svg = Svg {
            buf: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
            depth: 0,
        };
        let (w, h) = (num(width), num(height));
        svg.open(
            "svg",
            &[
                ("xmlns", "http://www.w3.org/2000/svg".into()),
                ("version", "1.1".into()),
                ("width", w.clone()),
                ("height", h.clone()),
                ("viewBox", format!("0 0 {w} {h}")),
                ("font-family", theme.font_family.clone()),
                ("font-size", theme.font_size.to_string()),
            ],
        );
        svg.empty(
            "rect",
            &[
                ("x", "0".into()),
                ("y", "0".into()),
                ("width", w),
                ("height", h),
                ("fill", theme.background.clone()),
            ],
        );
        svg
    }

    fn tag(&mut self, name: &str, attrs: Attrs, close: &str) {
        for _ in 0..self.depth {
            self.buf.push_str("  ");
        }
        self.buf.push('<');
        self.buf.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.buf, " {k}=\"{}\"", escape(v));
        }
        self.buf.push_str(close);
    }

    pub fn open(&mut self, name: &str, attrs: Attrs) {
        self.tag(name, attrs, ">\n");
        self.depth += 1;
    }

    pub fn close(&mut self, name: &str) {
        self.depth -= 1;
        for _ in 0..self.depth {
            self.buf.push_str("  ");
        }
        let _ = writeln!(self.buf, "</{name}>");
    }

    pub fn empty(&mut self, name: &str, attrs: Attrs) {
        self.tag(name, attrs, "/>\n");
    }

    pub fn text_el(&mut self, name: &str, attrs: Attrs, content: &str) {
        self.tag(name, attrs, ">");
        let _ = writeln!(self.buf, "{}</{name}>", escape(content));
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, extra: Attrs) {
        let mut attrs = vec![("x1", num(x1)), ("y1", num(y1)), ("x2", num(x2)), ("y2", num(y2))];
        attrs.extend_from_slice(extra);
        self.empty("line", &attrs);
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, extra: Attrs) {
        let mut attrs = vec![("cx", num(cx)), ("cy", num(cy)), ("r", num(r))];
        attrs.extend_from_slice(extra);
        self.empty("circle", &attrs);
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, extra: Attrs) {
        let mut attrs = vec![("x", num(x)), ("y", num(y)), ("width", num(w)), ("height", num(h))];
        attrs.extend_from_slice(extra);
        self.empty("rect", &attrs);
    }

    pub fn text(&mut self, x: f64, y: f64, content: &str, extra: Attrs) {
        let mut attrs = vec![("x", num(x)), ("y", num(y))];
        attrs.extend_from_slice(extra);
        self.text_el("text", &attrs, content);
    }

    pub fn finish(mut self) -> String {
        self.close("svg");
        debug_assert_eq!(self.depth, 0);
        self.buf
    }
}
