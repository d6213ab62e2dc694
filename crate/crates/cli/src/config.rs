//! Experiment configuration: a JSON document, optionally layered on a
//! shipped preset, validated into an [`ExperimentConfig`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::descriptor::{self, Descriptor1D};
use crate::error::CliError;
use cdlab_core::Forcing2D;

/// Presets shipped with the binary: (name, JSON).
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1", include_str!("../presets/fig1.json")),
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig3-left", include_str!("../presets/fig3-left.json")),
    ("fig3-middle", include_str!("../presets/fig3-middle.json")),
    ("fig3-right", include_str!("../presets/fig3-right.json")),
    (
        "exp-exactness",
        include_str!("../presets/exp-exactness.json"),
    ),
    (
        "qbubble-bound",
        include_str!("../presets/qbubble-bound.json"),
    ),
    (
        "forward-solve",
        include_str!("../presets/forward-solve.json"),
    ),
    (
        "greens-inverse",
        include_str!("../presets/greens-inverse.json"),
    ),
    ("spikes2d", include_str!("../presets/spikes2d.json")),
    ("no-spikes2d", include_str!("../presets/no-spikes2d.json")),
    ("conv-upg", include_str!("../presets/conv-upg.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// A number, or an expression in h: `h`, `h^2`, `<c>*h`, `<c>*h^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeshValue {
    Number(f64),
    Expr(String),
}

/// A mesh index: an integer, or `n/2`, `n-<k>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexValue {
    Number(usize),
    Expr(String),
}

/// The JSON document as written; every field optional so that presets and
/// user files can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<OneOrMany<MeshValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<OneOrMany<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// [a, b]; endpoints are numbers or `<a>-<k>h` style expressions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[MeshValue; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<OutputKind>>,
    /// Reference columns added to solution files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<String>>,
    /// x-indices of the 2D sections to write.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<IndexValue>>,
}

impl RawConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid JSON config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    /// Fields set in `self` win over those of `base`.
    pub fn over(self, base: RawConfig) -> RawConfig {
        RawConfig {
            preset: self.preset.or(base.preset),
            description: self.description.or(base.description),
            method: self.method.or(base.method),
            eps: self.eps.or(base.eps),
            n: self.n.or(base.n),
            f: self.f.or(base.f),
            window: self.window.or(base.window),
            outputs: self.outputs.or(base.outputs),
            columns: self.columns.or(base.columns),
            sections: self.sections.or(base.sections),
        }
    }

    /// Expand the `preset` field, if any, underneath the explicit fields.
    pub fn expand(self) -> Result<RawConfig, CliError> {
        match self.preset.clone() {
            Some(name) => {
                let base = preset(&name)?;
                Ok(self.over(base))
            }
            None => Ok(self),
        }
    }
}

pub fn preset(name: &str) -> Result<RawConfig, CliError> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        CliError::Config(format!(
            "unknown preset '{name}'; valid presets: {}",
            names.join(", ")
        ))
    })?;
    let mut raw = RawConfig::from_json(text)?;
    raw.preset = Some(name.to_string());
    Ok(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Solution,
    Errors,
    Oscillation,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Sl,
    Spls,
    UpgQuadratic,
    UpgScaled,
    UpgExponential,
    UpgForward,
    ReducedSl,
    ReducedSpls,
    Upg2d,
    Reduced2d,
    L2projTilde,
    GreensInverse,
}

impl MethodKind {
    pub const ALL: [(&'static str, MethodKind); 12] = [
        ("sl", MethodKind::Sl),
        ("spls", MethodKind::Spls),
        ("upg-quadratic", MethodKind::UpgQuadratic),
        ("upg-scaled", MethodKind::UpgScaled),
        ("upg-exponential", MethodKind::UpgExponential),
        ("upg-forward", MethodKind::UpgForward),
        ("reduced-sl", MethodKind::ReducedSl),
        ("reduced-spls", MethodKind::ReducedSpls),
        ("upg2d", MethodKind::Upg2d),
        ("reduced-2d", MethodKind::Reduced2d),
        ("l2proj-tilde", MethodKind::L2projTilde),
        ("greens-inverse", MethodKind::GreensInverse),
    ];

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, m)| *m)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|(n, _)| *n).collect();
                CliError::Config(format!(
                    "unknown method '{s}'; valid methods: {}",
                    names.join(", ")
                ))
            })
    }

    pub fn name(self) -> &'static str {
        Self::ALL
            .iter()
            .find(|(_, m)| *m == self)
            .map(|(n, _)| *n)
            .unwrap_or("?")
    }

    pub fn is_2d(self) -> bool {
        matches!(self, MethodKind::Upg2d | MethodKind::Reduced2d)
    }

    /// Methods whose ε is fixed at zero.
    pub fn is_reduced(self) -> bool {
        matches!(
            self,
            MethodKind::ReducedSl
                | MethodKind::ReducedSpls
                | MethodKind::Reduced2d
                | MethodKind::L2projTilde
        )
    }

    /// Methods that need ε > 0.
    pub fn needs_positive_eps(self) -> bool {
        matches!(
            self,
            MethodKind::UpgScaled
                | MethodKind::UpgExponential
                | MethodKind::Upg2d
                | MethodKind::GreensInverse
        )
    }
}

/// Reference columns understood by solution files.
pub const COLUMNS: &[&str] = &[
    "exact",
    "U_h",
    "w",
    "theta",
    "U",
    "u_plus_teeth",
    "centered",
    "l2proj",
    "teeth",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    OneD(Descriptor1D),
    TwoD(Forcing2D),
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub description: Option<String>,
    pub method: MethodKind,
    pub eps: Vec<MeshValue>,
    pub n: Vec<usize>,
    pub f: Data,
    pub window: Option<[MeshValue; 2]>,
    pub outputs: Vec<OutputKind>,
    pub columns: Vec<String>,
    pub sections: Vec<IndexValue>,
}

fn parse_scaled_h(s: &str, h: f64) -> Option<f64> {
    let s = s.trim();
    let (coef, power) = if let Some(c) = s.strip_suffix("h^2") {
        (c, 2)
    } else if let Some(c) = s.strip_suffix('h') {
        (c, 1)
    } else {
        return s.parse::<f64>().ok();
    };
    let coef = coef.trim().trim_end_matches('*').trim();
    let c = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().ok()?
    };
    Some(c * h.powi(power))
}

impl MeshValue {
    /// Evaluate for mesh size h. Expressions: `h`, `h^2`, `<c>h`, `<c>*h^2`,
    /// and `<a>-<term>` / `<a>+<term>` with a leading number.
    pub fn resolve(&self, h: f64) -> Result<f64, CliError> {
        match self {
            MeshValue::Number(v) => Ok(*v),
            MeshValue::Expr(s) => {
                let bad = || {
                    CliError::Config(format!(
                        "cannot evaluate '{s}' (expected e.g. h^2, 4h, 1-4h)"
                    ))
                };
                let t = s.trim();
                // split off a leading "<a>-" / "<a>+" (skip a leading sign)
                let split = t
                    .char_indices()
                    .skip(1)
                    .find(|&(i, c)| (c == '-' || c == '+') && !t[..i].ends_with('e'));
                let v = match split {
                    Some((i, c)) => {
                        let a: f64 = t[..i].trim().parse().map_err(|_| bad())?;
                        let b = parse_scaled_h(&t[i + 1..], h).ok_or_else(bad)?;
                        if c == '-' {
                            a - b
                        } else {
                            a + b
                        }
                    }
                    None => parse_scaled_h(t, h).ok_or_else(bad)?,
                };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(bad())
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            MeshValue::Number(v) => format!("{v:e}"),
            MeshValue::Expr(s) => s.replace(['^', '*'], ""),
        }
    }
}

impl IndexValue {
    pub fn resolve(&self, n: usize) -> Result<usize, CliError> {
        let i = match self {
            IndexValue::Number(i) => Some(*i),
            IndexValue::Expr(s) => {
                let s = s.replace(' ', "");
                if s == "n/2" {
                    Some(n / 2)
                } else if let Some(k) = s.strip_prefix("n-") {
                    k.parse::<usize>().ok().and_then(|k| n.checked_sub(k))
                } else {
                    s.parse::<usize>().ok()
                }
            }
        };
        match i {
            Some(i) if i >= 1 && i < n => Ok(i),
            _ => Err(CliError::Config(format!(
                "section index {self:?} outside 1..{} for n = {n}",
                n - 1
            ))),
        }
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: RawConfig, fallback_name: &str) -> Result<Self, CliError> {
        let raw = raw.expand()?;
        let name = raw
            .preset
            .clone()
            .unwrap_or_else(|| fallback_name.to_string());
        let method = MethodKind::parse(
            raw.method
                .as_deref()
                .ok_or_else(|| CliError::Config("missing field 'method'".into()))?,
        )?;
        let n = raw
            .n
            .as_ref()
            .ok_or_else(|| CliError::Config("missing field 'n'".into()))?
            .to_vec();
        if n.is_empty() {
            return Err(CliError::Config("'n' must not be empty".into()));
        }
        if let Some(&bad) = n.iter().find(|&&v| v < 2) {
            return Err(CliError::Config(format!("n must be >= 2, got {bad}")));
        }
        let eps = match (&raw.eps, method.is_reduced()) {
            (Some(e), _) => e.to_vec(),
            (None, true) => vec![MeshValue::Number(0.0)],
            (None, false) => return Err(CliError::Config("missing field 'eps'".into())),
        };
        if eps.is_empty() {
            return Err(CliError::Config("'eps' must not be empty".into()));
        }
        for e in &eps {
            for &nn in &n {
                let v = e.resolve(1.0 / nn as f64)?;
                if v < 0.0
                    || (method.needs_positive_eps() && v == 0.0)
                    || (method.is_reduced() && v != 0.0)
                {
                    return Err(CliError::Config(format!(
                        "eps = {v:e} not allowed for method {}",
                        method.name()
                    )));
                }
            }
        }
        let desc = raw.f.as_deref().unwrap_or("const:1");
        let f = if method.is_2d() {
            Data::TwoD(descriptor::parse_2d(desc)?)
        } else {
            Data::OneD(descriptor::parse_1d(desc)?)
        };
        if let Some(w) = &raw.window {
            for &nn in &n {
                let h = 1.0 / nn as f64;
                let (a, b) = (w[0].resolve(h)?, w[1].resolve(h)?);
                cdlab_core::Window::new(a, b).map_err(|e| CliError::Config(e.to_string()))?;
            }
        }
        let columns = raw.columns.clone().unwrap_or_default();
        if let Some(c) = columns.iter().find(|c| !COLUMNS.contains(&c.as_str())) {
            return Err(CliError::Config(format!(
                "unknown column '{c}'; valid columns: {}",
                COLUMNS.join(", ")
            )));
        }
        let sections = raw.sections.clone().unwrap_or_else(|| {
            vec![
                IndexValue::Expr("n/2".into()),
                IndexValue::Expr("n-2".into()),
            ]
        });
        if method.is_2d() {
            for s in &sections {
                for &nn in &n {
                    s.resolve(nn)?;
                }
            }
        }
        Ok(ExperimentConfig {
            name,
            description: raw.description,
            method,
            eps,
            n,
            f,
            window: raw.window,
            outputs: raw
                .outputs
                .unwrap_or_else(|| vec![OutputKind::Solution, OutputKind::Errors]),
            columns,
            sections,
        })
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }
}
