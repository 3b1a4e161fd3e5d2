//! A fully specified run, independent of whether it came from flags or a
//! scenario file.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use measure_fourier::{parse_field, IntegratorSettings, Region, RegionSpec, ScalarField};
use measure_fourier::expr::parse_real;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Integrate,
    Orthogonalize,
    Expand,
    Parseval,
    PartitionParseval,
    CauchySchwarz,
    ProductCriterion,
    Corollary,
}

impl Task {
    pub const ALL: [Task; 8] = [
        Task::Integrate,
        Task::Orthogonalize,
        Task::Expand,
        Task::Parseval,
        Task::PartitionParseval,
        Task::CauchySchwarz,
        Task::ProductCriterion,
        Task::Corollary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Integrate => "integrate",
            Task::Orthogonalize => "orthogonalize",
            Task::Expand => "expand",
            Task::Parseval => "parseval",
            Task::PartitionParseval => "partition-parseval",
            Task::CauchySchwarz => "cauchy-schwarz",
            Task::ProductCriterion => "product-criterion",
            Task::Corollary => "corollary",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

/// A named field as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDef {
    pub expr: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<(f64, f64)>,
    /// Scenario line the definition came from.
    #[serde(skip)]
    pub line: Option<usize>,
}

impl FieldDef {
    pub fn new(expr: impl Into<String>) -> Self {
        FieldDef {
            expr: expr.into(),
            floor: None,
            bounds: None,
            line: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    pub task: Task,
    pub dim: usize,
    /// Region text; the unit box when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_pred: Option<String>,
    pub fields: BTreeMap<String, FieldDef>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub psi: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// Weight for `orthogonalize`: `unit`, `1/<field>` or a positive field name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    pub diagnostics: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition_depth: Option<u32>,
    pub settings: IntegratorSettings,
}

impl Problem {
    pub fn new(task: Task, dim: usize) -> Self {
        Problem {
            task,
            dim,
            region: None,
            region_pred: None,
            fields: BTreeMap::new(),
            phi: Vec::new(),
            psi: Vec::new(),
            truncation: None,
            weight: None,
            diagnostics: false,
            zeta: None,
            partition_depth: None,
            settings: IntegratorSettings::default(),
        }
    }

    pub fn region(&self) -> Result<Region, CliError> {
        let spec = match &self.region {
            Some(text) => text
                .parse::<RegionSpec>()
                .map_err(|e| CliError::Input(format!("region `{text}`: {e}")))?,
            None => RegionSpec::unit_box(self.dim),
        };
        if spec.dim() != self.dim {
            return Err(CliError::Input(format!(
                "region has dimension {} but dim = {}",
                spec.dim(),
                self.dim
            )));
        }
        let spec = match &self.region_pred {
            Some(pred) => {
                let text = format!("pred({spec}, {pred})");
                text.parse::<RegionSpec>()
                    .map_err(|e| CliError::Input(format!("region predicate `{pred}`: {e}")))?
            }
            None => spec,
        };
        Ok(Region::construct(&spec)?)
    }

    pub fn has_field(&self, name: &str) -> bool {
        self.fields.contains_key(name)
    }

    /// Build the named field, or explain why the task needs it.
    pub fn field(&self, name: &str) -> Result<ScalarField, CliError> {
        let def = self.fields.get(name).ok_or_else(|| {
            CliError::Input(format!("task {} requires field `{name}`", self.task))
        })?;
        build_field(name, def, self.dim)
    }

    /// Seeds are expressions, or names of defined fields.
    pub fn seeds(&self, texts: &[String], family: &str) -> Result<Vec<ScalarField>, CliError> {
        if texts.is_empty() {
            return Err(CliError::Input(format!(
                "task {} requires seeds for family {family}",
                self.task
            )));
        }
        texts
            .iter()
            .map(|t| match self.fields.get(t.trim()) {
                Some(def) => build_field(t.trim(), def, self.dim),
                None => parse_field(t, self.dim).map_err(|e| CliError::Expression {
                    what: format!("seed `{t}` of family {family}"),
                    line: None,
                    message: e.to_string(),
                }),
            })
            .collect()
    }
}

fn build_field(name: &str, def: &FieldDef, dim: usize) -> Result<ScalarField, CliError> {
    let expr_err = |message: String| CliError::Expression {
        what: format!("field `{name}`"),
        line: def.line,
        message,
    };
    let mut f = parse_field(&def.expr, dim).map_err(|e| expr_err(e.to_string()))?;
    if let Some((lo, hi)) = def.bounds {
        f = f.with_bounds(lo, hi).map_err(|e| expr_err(e.to_string()))?;
    }
    if let Some(floor) = def.floor.or_else(|| implied_floor(def, dim)) {
        f = f.with_floor(floor).map_err(|e| expr_err(e.to_string()))?;
    }
    Ok(f)
}

/// A floor the definition already implies: a positive declared lower bound,
/// or the value of a positive constant expression.
fn implied_floor(def: &FieldDef, dim: usize) -> Option<f64> {
    if let Some((lo, _)) = def.bounds {
        return (lo > 0.0).then_some(lo);
    }
    let e = parse_real(&def.expr, dim).ok()?;
    if e.max_var().is_some() {
        return None;
    }
    let c = e.eval_real(&vec![0.0; dim]).ok()?;
    (c > 0.0 && c.is_finite()).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_round_trip() {
        for t in Task::ALL {
            assert_eq!(t.name().parse::<Task>().unwrap(), t);
        }
        assert!("fourier".parse::<Task>().is_err());
    }

    #[test]
    fn region_defaults_and_predicates() {
        let mut p = Problem::new(Task::Integrate, 2);
        assert_eq!(p.region().unwrap().dim(), 2);
        p.region = Some("box([0, 1])".into());
        assert!(matches!(p.region(), Err(CliError::Input(_))));
        p.region = Some("box([-1, 1], [-1, 1])".into());
        p.region_pred = Some("x1 < x2".into());
        let r = p.region().unwrap();
        assert!(r.contains(&[0.0, 0.5]).unwrap());
        assert!(!r.contains(&[0.5, 0.0]).unwrap());
    }

    #[test]
    fn seeds_may_name_fields() {
        let mut p = Problem::new(Task::Expand, 1);
        p.fields.insert("f".into(), FieldDef::new("1 + x1"));
        let seeds = p.seeds(&["f".into(), "x1^2".into()], "phi").unwrap();
        assert_eq!(seeds[0].eval(&[1.0]).unwrap(), 2.0);
        assert!(p.seeds(&["x3".into()], "phi").is_err());
        assert!(p.field("g").is_err());
    }

    #[test]
    fn field_errors_name_the_field() {
        let mut p = Problem::new(Task::Integrate, 1);
        p.fields.insert("f".into(), FieldDef::new("x1 +"));
        let msg = p.field("f").unwrap_err().to_string();
        assert!(msg.contains("field `f`") && msg.contains("column"), "{msg}");
    }
}
