use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming a theme JSON file.
pub const THEME_ENV: &str = "QCVINE_THEME";

/// Visual settings for every view. Missing fields in a theme file take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct RenderTheme {
    /// Grid cell size in px.
    pub unit: u32,
    pub font_family: String,
    pub font_size: u32,
    pub background: String,
    pub text: String,
    pub wire: String,
    pub gate_fill: String,
    pub gate_stroke: String,
    pub component_fill: String,
    pub component_stroke: String,
    pub control: String,
    pub dots: String,
    pub highlight: String,
    /// Five colors from low to heavy load.
    pub parallelism_ramp: Vec<String>,
    /// Four colors from short to long idle spans.
    pub idle_ramp: Vec<String>,
    /// Categorical colors for entanglement groups; reused cyclically.
    pub group_palette: Vec<String>,
}

impl Default for RenderTheme {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|c| c.to_string()).collect();
        RenderTheme {
            unit: 32,
            font_family: "Helvetica, Arial, sans-serif".into(),
            font_size: 11,
            background: "#ffffff".into(),
            text: "#1f2933".into(),
            wire: "#52606d".into(),
            gate_fill: "#e4f0fb".into(),
            gate_stroke: "#2b6cb0".into(),
            component_fill: "#fdf2e0".into(),
            component_stroke: "#c05621".into(),
            control: "#1f2933".into(),
            dots: "#7b8794".into(),
            highlight: "#d53f8c".into(),
            parallelism_ramp: s(&["#2c7bb6", "#abd9e9", "#ffffbf", "#fdae61", "#d7191c"]),
            idle_ramp: s(&["#edf8e9", "#bae4b3", "#74c476", "#238b45"]),
            group_palette: s(&[
                "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
            ]),
        }
    }
}

fn is_hex_color(c: &str) -> bool {
    c.len() == 7 && c.starts_with('#') && c[1..].chars().all(|ch| ch.is_ascii_hexdigit())
}

impl RenderTheme {
    pub fn validate(&self) -> Result<()> {
        if self.unit < 8 {
            return Err(Error::Theme(format!("unit must be at least 8, got {}", self.unit)));
        }
        if self.font_size == 0 {
            return Err(Error::Theme("fontSize must be positive".into()));
        }
        let singles = [
            ("background", &self.background),
            ("text", &self.text),
            ("wire", &self.wire),
            ("gateFill", &self.gate_fill),
            ("gateStroke", &self.gate_stroke),
            ("componentFill", &self.component_fill),
            ("componentStroke", &self.component_stroke),
            ("control", &self.control),
            ("dots", &self.dots),
            ("highlight", &self.highlight),
        ];
        for (name, c) in singles {
            if !is_hex_color(c) {
                return Err(Error::Theme(format!("{name}: invalid color {c:?}")));
            }
        }
        let ramps = [
            ("parallelismRamp", &self.parallelism_ramp, 5),
            ("idleRamp", &self.idle_ramp, 4),
        ];
        for (name, ramp, len) in ramps {
            if ramp.len() != len {
                return Err(Error::Theme(format!("{name} needs {len} colors, got {}", ramp.len())));
            }
        }
        if self.group_palette.is_empty() {
            return Err(Error::Theme("groupPalette must not be empty".into()));
        }
        let lists = [
            ("parallelismRamp", &self.parallelism_ramp),
            ("idleRamp", &self.idle_ramp),
            ("groupPalette", &self.group_palette),
        ];
        for (name, list) in lists {
            if let Some(c) = list.iter().find(|c| !is_hex_color(c)) {
                return Err(Error::Theme(format!("{name}: invalid color {c:?}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let theme: RenderTheme = serde_json::from_str(text)?;
        theme.validate()?;
        Ok(theme)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The theme named by `QCVINE_THEME`, or the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(THEME_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RenderTheme::default().validate().unwrap();
    }

    #[test]
    fn partial_file_overrides() {
        let t = RenderTheme::from_json(r##"{"unit": 20, "wire": "#000000"}"##).unwrap();
        assert_eq!((t.unit, t.wire.as_str()), (20, "#000000"));
        assert_eq!(t.gate_fill, RenderTheme::default().gate_fill);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RenderTheme::from_json(r#"{"unit": 7}"#).is_err());
        assert!(RenderTheme::from_json(r#"{"wire": "red"}"#).is_err());
        assert!(RenderTheme::from_json(r##"{"wire": "#12345"}"##).is_err());
        assert!(RenderTheme::from_json(r##"{"idleRamp": ["#000000"]}"##).is_err());
        assert!(RenderTheme::from_json(r##"{"groupPalette": ["#00000g"]}"##).is_err());
        assert!(RenderTheme::from_json("{").is_err());
    }
}
