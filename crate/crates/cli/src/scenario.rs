//! Scenario files: TOML documents describing one run.
//!
//! ```toml
//! task = "product-criterion"
//! dim = 1
//! region = "box([0, 1])"
//! truncation = 2
//!
//! [fields]
//! f = { expr = "1 + x1", floor = 1 }
//! g = "2 - x1"
//!
//! [families]
//! phi = ["1", "x1"]
//! psi = ["1", "x1"]
//!
//! [settings]
//! method = "refine"
//! rel_tol = 1e-6
//!
//! [output]
//! report = "criterion.json"
//! csv = "criterion.csv"
//! ```
//!
//! Output paths are relative to the scenario file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;
use crate::problem::{FieldDef, Problem, Task};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    task: Spanned<String>,
    #[serde(default = "one")]
    dim: usize,
    region: Option<String>,
    region_pred: Option<String>,
    truncation: Option<usize>,
    weight: Option<String>,
    #[serde(default)]
    diagnostics: bool,
    zeta: Option<f64>,
    partition_depth: Option<u32>,
    #[serde(default)]
    fields: BTreeMap<String, Spanned<RawField>>,
    #[serde(default)]
    families: RawFamilies,
    #[serde(default)]
    settings: RawSettings,
    #[serde(default)]
    output: RawOutput,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawField {
    Expr(String),
    Table(RawFieldTable),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFieldTable {
    expr: String,
    floor: Option<f64>,
    bounds: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamilies {
    #[serde(default)]
    phi: Vec<String>,
    #[serde(default)]
    psi: Vec<String>,
}

/// Integrator overrides shared by scenario files and command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSettings {
    pub method: Option<String>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_depth: Option<u32>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub strict: Option<bool>,
}

impl RawSettings {
    /// Later values win.
    pub fn overlay(&self, top: &RawSettings) -> RawSettings {
        RawSettings {
            method: top.method.clone().or_else(|| self.method.clone()),
            rel_tol: top.rel_tol.or(self.rel_tol),
            abs_tol: top.abs_tol.or(self.abs_tol),
            max_depth: top.max_depth.or(self.max_depth),
            samples: top.samples.or(self.samples),
            seed: top.seed.or(self.seed),
            strict: top.strict.or(self.strict),
        }
    }

    pub fn apply(&self, s: &mut measure_fourier::IntegratorSettings) -> Result<(), CliError> {
        if let Some(m) = &self.method {
            s.method = m.parse().map_err(|e: measure_fourier::Error| CliError::Input(e.to_string()))?;
        }
        if let Some(v) = self.rel_tol {
            s.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            s.abs_tol = v;
        }
        if self.max_depth.is_some() {
            s.max_depth = self.max_depth;
        }
        if let Some(v) = self.samples {
            s.sample_count = v;
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.strict {
            s.strict = v;
        }
        s.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub report: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug)]
pub struct Scenario {
    pub problem: Problem,
    pub settings: RawSettings,
    pub output: RawOutput,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parse scenario text. `name` labels error messages.
pub fn parse(text: &str, name: &str) -> Result<Scenario, CliError> {
    let err = |message: String| CliError::Scenario {
        path: name.to_string(),
        message,
    };
    let raw: Raw = toml::from_str(text).map_err(|e| {
        let at = e
            .span()
            .map(|s| format!("line {}: ", line_of(text, s.start)))
            .unwrap_or_default();
        err(format!("{at}{}", e.message()))
    })?;
    let task: Task = raw
        .task
        .get_ref()
        .parse()
        .map_err(|m| err(format!("line {}: {m}", line_of(text, raw.task.span().start))))?;
    if raw.dim == 0 {
        return Err(err("dim must be >= 1".into()));
    }
    let mut problem = Problem::new(task, raw.dim);
    problem.region = raw.region;
    problem.region_pred = raw.region_pred;
    problem.truncation = raw.truncation;
    problem.weight = raw.weight;
    problem.diagnostics = raw.diagnostics;
    problem.zeta = raw.zeta;
    problem.partition_depth = raw.partition_depth;
    problem.phi = raw.families.phi;
    problem.psi = raw.families.psi;
    for (name, field) in raw.fields {
        let line = Some(line_of(text, field.span().start));
        let def = match field.into_inner() {
            RawField::Expr(expr) => FieldDef {
                line,
                ..FieldDef::new(expr)
            },
            RawField::Table(t) => FieldDef {
                expr: t.expr,
                floor: t.floor,
                bounds: t.bounds.map(|[lo, hi]| (lo, hi)),
                line,
            },
        };
        problem.fields.insert(name, def);
    }
    Ok(Scenario {
        problem,
        settings: raw.settings,
        output: raw.output,
    })
}

/// Read and parse a scenario; output paths become relative to its directory.
pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut sc = parse(&text, &path.display().to_string())?;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [&mut sc.output.report, &mut sc.output.summary, &mut sc.output.csv]
        .into_iter()
        .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(sc)
}
