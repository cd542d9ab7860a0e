//! Text formats: code spec files (JSON), profile files, symbol files and
//! epsilon grids.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotic::{design_alpha_from_beta, discretize, DesignError, PiecewiseLinear, ProfileError};
use crate::galois::{Elem, FieldConfig, GaloisError};
use crate::product::{CodeSpec, SpecError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Shape(String),
    #[error("field: {0}")]
    Field(#[from] GaloisError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("design: {0}")]
    Design(#[from] DesignError),
    #[error("line {line}: {msg}")]
    ProfileLine { line: usize, msg: String },
    #[error("profile: {0}")]
    Profile(#[from] ProfileError),
    #[error("symbol {index}: {msg}")]
    Symbol { index: usize, msg: String },
    #[error("expected {expected} symbols, found {got}")]
    SymbolCount { expected: usize, got: usize },
    #[error("epsilon grid `{spec}`: {msg}")]
    Grid { spec: String, msg: String },
}

/// Asymptotic design directive: `α` is derived from the `β` profile file at
/// erasure probability `eps`, then discretized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignDirective {
    /// Profile file, relative to the spec file's directory.
    pub beta: PathBuf,
    pub eps: f64,
    pub min_dist: [usize; 2],
    #[serde(default)]
    pub boosts: usize,
}

/// On-disk code description: explicit `a`/`b` arrays or a `design`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldConfig>,
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignDirective>,
}

impl CodeSpecFile {
    pub fn from_spec(spec: &CodeSpec) -> Self {
        CodeSpecFile {
            field: Some(spec.field().config()),
            m: spec.m(),
            n: spec.n(),
            a: Some(spec.a().to_vec()),
            b: Some(spec.b().to_vec()),
            design: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize") + "\n"
    }

    /// Builds the spec; `base` is the directory design profiles are read from.
    pub fn resolve(&self, base: &Path) -> Result<CodeSpec, ConfigError> {
        let config = self.field.unwrap_or_else(|| FieldConfig::smallest_binary(self.m.max(self.n)));
        let field = Arc::new(config.build()?);
        let (a, b) = match (&self.a, &self.b, &self.design) {
            (Some(a), Some(b), None) => (a.clone(), b.clone()),
            (None, None, Some(d)) => {
                let path = base.join(&d.beta);
                let beta = parse_profile(&read(&path)?)?;
                let alpha = design_alpha_from_beta(&beta, d.eps)?;
                discretize(&alpha, &beta, self.m, self.n, (d.min_dist[0], d.min_dist[1]), d.boosts)?
            }
            (_, _, Some(_)) => {
                return Err(ConfigError::Shape("design: cannot be combined with explicit a/b arrays".into()))
            }
            (None, _, None) => return Err(ConfigError::Shape("a: missing (give a and b, or design)".into())),
            (_, None, None) => return Err(ConfigError::Shape("b: missing (give a and b, or design)".into())),
        };
        Ok(CodeSpec::new(field, self.m, self.n, a, b)?)
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })
}

pub fn parse_spec_file(text: &str, path: &Path) -> Result<CodeSpecFile, ConfigError> {
    serde_json::from_str(text).map_err(|source| ConfigError::Json { path: path.to_path_buf(), source })
}

/// Reads and validates a spec file.
pub fn load_spec(path: &Path) -> Result<CodeSpec, ConfigError> {
    let file = parse_spec_file(&read(path)?, path)?;
    file.resolve(path.parent().unwrap_or(Path::new(".")))
}

/// Parses `t v` breakpoint lines; blank lines and `#` comments are skipped.
pub fn parse_profile(text: &str) -> Result<PiecewiseLinear<f64>, ConfigError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: String| ConfigError::ProfileLine { line: idx + 1, msg };
        if fields.len() != 2 {
            return Err(bad(format!("expected `t v`, found {} fields", fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        points.push((num(fields[0])?, num(fields[1])?));
    }
    Ok(PiecewiseLinear::new(points)?)
}

pub fn load_profile(path: &Path) -> Result<PiecewiseLinear<f64>, ConfigError> {
    parse_profile(&read(path)?)
}

pub fn format_profile(profile: &PiecewiseLinear<f64>) -> String {
    profile.points().iter().map(|(t, v)| format!("{t} {v}\n")).collect()
}

/// Whitespace-separated symbols below `order`, `?` marking an erasure.
pub fn parse_symbols(text: &str, expected: usize, order: u32) -> Result<Vec<Option<Elem>>, ConfigError> {
    let out = text
        .split_whitespace()
        .enumerate()
        .map(|(index, tok)| {
            if tok == "?" {
                return Ok(None);
            }
            let v: Elem = tok
                .parse()
                .map_err(|_| ConfigError::Symbol { index, msg: format!("`{tok}` is not a symbol or `?`") })?;
            if v >= order {
                return Err(ConfigError::Symbol { index, msg: format!("{v} is not below the field order {order}") });
            }
            Ok(Some(v))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if out.len() != expected {
        return Err(ConfigError::SymbolCount { expected, got: out.len() });
    }
    Ok(out)
}

/// One matrix row per line.
pub fn format_symbols(n: usize, symbols: &[Option<Elem>]) -> String {
    let mut out = String::new();
    for row in symbols.chunks(n) {
        let toks: Vec<String> = row.iter().map(|s| s.map_or("?".to_string(), |v| v.to_string())).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Parses `start:stop:step` (both ends inclusive within 1e-12), a comma
/// list, or a single value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ConfigError> {
    let err = |msg: &str| ConfigError::Grid { spec: spec.to_string(), msg: msg.to_string() };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err(&format!("`{}` is not a number", s.trim())));
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.len() {
        1 => spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        3 => {
            let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if step <= 0.0 {
                return Err(err("step must be positive"));
            }
            if stop < start {
                return Err(err("stop is below start"));
            }
            let count = ((stop - start) / step + 1e-12).floor() as usize;
            (0..=count).map(|i| snap(start + i as f64 * step)).collect()
        }
        _ => return Err(err("expected start:stop:step")),
    };
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(err(&format!("{v} is outside [0, 1]")));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(err("values must increase"));
    }
    Ok(values)
}
