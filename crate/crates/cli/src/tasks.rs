//! Execute a [`Problem`] and assemble its report, summary and CSV table.

use std::fmt::Write as _;

use measure_fourier::expansion::{deviation_identity, CellSeeds};
use measure_fourier::ortho::OrthogonalFamily;
use measure_fourier::region::default_zeta;
use measure_fourier::{
    bessel_gap, cauchy_schwarz_gap, corollary_check, gram_schmidt, integrate,
    mean_square_deviation, parseval_residual, partitioned_parseval, product_criterion_check,
    sign_partition, Approx, Comparison, Expansion, ScalarField, Verdict, Weight,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::problem::{Problem, Task};

/// A property the run asserts; a false one gives exit status 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Property {
    pub name: String,
    pub holds: bool,
}

impl Property {
    fn new(name: impl Into<String>, holds: bool) -> Self {
        Property {
            name: name.into(),
            holds,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    /// Pretty-printed JSON report with a trailing newline.
    pub report: String,
    pub summary: String,
    pub csv: Option<String>,
    pub properties: Vec<Property>,
}

impl Outcome {
    pub fn violated(&self) -> bool {
        self.properties.iter().any(|p| !p.holds)
    }
}

struct Parts {
    result: Value,
    summary: Vec<String>,
    csv: Option<String>,
    properties: Vec<Property>,
}

pub fn execute(p: &Problem) -> Result<Outcome, CliError> {
    p.settings.validate()?;
    let parts = match p.task {
        Task::Integrate => run_integrate(p)?,
        Task::Orthogonalize => run_orthogonalize(p)?,
        Task::Expand => run_expand(p)?,
        Task::Parseval => run_parseval(p)?,
        Task::PartitionParseval => run_partition(p)?,
        Task::CauchySchwarz => run_cauchy_schwarz(p)?,
        Task::ProductCriterion => run_criterion(p)?,
        Task::Corollary => run_corollary(p)?,
    };
    let violated = parts.properties.iter().any(|q| !q.holds);
    let status = if violated { "property_violation" } else { "ok" };
    let report = json!({
        "task": p.task,
        "problem": p,
        "result": parts.result,
        "properties": parts.properties,
        "status": status,
    });
    let mut report = serde_json::to_string_pretty(&report).expect("report serializes");
    report.push('\n');

    let mut summary = format!("task: {}\n", p.task);
    for line in &parts.summary {
        summary.push_str(line);
        summary.push('\n');
    }
    for q in &parts.properties {
        let _ = writeln!(summary, "[{}] {}", if q.holds { "ok" } else { "VIOLATED" }, q.name);
    }
    let _ = writeln!(summary, "status: {status}");
    Ok(Outcome {
        report,
        summary,
        csv: parts.csv,
        properties: parts.properties,
    })
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn pm(a: Approx) -> String {
    format!("{:.12} ± {:.2e}", a.value, a.err)
}

fn describe(c: &Comparison) -> String {
    let rel = match c.relation {
        measure_fourier::Relation::AtMost => "<=",
        measure_fourier::Relation::AtLeast => ">=",
    };
    format!(
        "{} {rel} {}: {} (margin {:.3e}, slack {:.3e})",
        pm(c.lhs),
        pm(c.rhs),
        c.verdict.describe(),
        c.margin,
        c.slack
    )
}

fn region_line(p: &Problem) -> Result<(measure_fourier::Region, String), CliError> {
    let region = p.region()?;
    let line = format!("region: {region}");
    Ok((region, line))
}

fn family(
    p: &Problem,
    texts: &[String],
    name: &str,
    weight: &Weight,
    region: &measure_fourier::Region,
) -> Result<OrthogonalFamily, CliError> {
    let seeds = p.seeds(texts, name)?;
    Ok(gram_schmidt(&seeds, weight, region, &p.settings)?)
}

fn family_value(fam: &OrthogonalFamily) -> Value {
    let members: Vec<Value> = fam
        .members()
        .iter()
        .zip(fam.norms())
        .enumerate()
        .map(|(k, (m, norm))| {
            json!({
                "index": k + 1,
                "seed": m.seed_index + 1,
                "field": m.field.to_string(),
                "seed_coefficients": m.seed_coefficients,
                "norm": norm,
            })
        })
        .collect();
    json!({
        "weight": fam.weight().field().to_string(),
        "members": members,
        "dropped": fam.dropped().iter().map(|i| i + 1).collect::<Vec<_>>(),
        "residual": fam.residual(),
        "tolerance": fam.tolerance(),
    })
}

fn family_summary(name: &str, fam: &OrthogonalFamily) -> Vec<String> {
    let mut out = vec![format!(
        "family {name}: {} members, residual {:.3e}, dropped {:?}",
        fam.len(),
        fam.residual(),
        fam.dropped().iter().map(|i| i + 1).collect::<Vec<_>>()
    )];
    for (k, m) in fam.members().iter().enumerate() {
        out.push(format!("  {name}_{} = {}", k + 1, m.field));
    }
    out
}

fn truncation(p: &Problem, limit: usize) -> Result<usize, CliError> {
    match p.truncation {
        Some(n) if n > limit => Err(CliError::Input(format!(
            "truncation {n} exceeds family size {limit}"
        ))),
        Some(n) => Ok(n),
        None => Ok(limit),
    }
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn run_integrate(p: &Problem) -> Result<Parts, CliError> {
    let f = p.field("f")?;
    let (region, line) = region_line(p)?;
    let est = integrate(&f, &region, &p.settings)?;
    Ok(Parts {
        summary: vec![
            line,
            format!("integral of f = {}", pm(est.approx())),
            format!("evaluations: {}", est.evals),
        ],
        result: to_value(&est),
        csv: None,
        properties: Vec::new(),
    })
}

fn run_orthogonalize(p: &Problem) -> Result<Parts, CliError> {
    let (region, line) = region_line(p)?;
    let choice = p.weight.clone().unwrap_or_else(|| {
        if p.has_field("f") { "1/f" } else { "unit" }.to_string()
    });
    let weight = match choice.strip_prefix("1/") {
        _ if choice == "unit" => Weight::unit(p.dim),
        Some(name) => Weight::reciprocal(&p.field(name.trim())?)?,
        None => Weight::positive(&p.field(&choice)?)?,
    };
    let fam = family(p, &p.phi, "phi", &weight, &region)?;
    let check = measure_fourier::orthogonality_residual(&fam, &p.settings.finer())?;
    let mut summary = vec![line, format!("weight: {choice}")];
    summary.extend(family_summary("phi", &fam));
    summary.push(format!("residual under finer settings: {check:.3e}"));
    Ok(Parts {
        result: json!({ "family": family_value(&fam), "recheck_residual": check }),
        summary,
        csv: None,
        properties: vec![Property::new(
            "orthogonality residual within tolerance under finer settings",
            check <= fam.tolerance(),
        )],
    })
}

fn expansion(p: &Problem) -> Result<(ScalarField, Expansion, String), CliError> {
    let f = p.field("f")?;
    let (region, line) = region_line(p)?;
    let weight = Weight::reciprocal(&f)?;
    let fam = family(p, &p.phi, "phi", &weight, &region)?;
    let x = Expansion::new(&f, fam, &p.settings)?;
    Ok((f, x, line))
}

fn coefficient_rows(x: &Expansion) -> Vec<Value> {
    x.coefficients()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            json!({
                "n": k + 1,
                "value": c.value,
                "err": c.err,
                "numerator": c.numerator.approx(),
                "denominator": c.denominator.approx(),
            })
        })
        .collect()
}

fn run_expand(p: &Problem) -> Result<Parts, CliError> {
    let (_, x, line) = expansion(p)?;
    let n = truncation(p, x.len())?;
    let s = &p.settings;
    let mut summary = vec![line];
    summary.extend(family_summary("phi", x.family()));
    for (k, c) in x.coefficients().iter().enumerate() {
        summary.push(format!("c_{} = {}", k + 1, pm(c.approx())));
    }
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut nonneg = true;
    let mut identity = true;
    let mut monotone = true;
    let mut previous: Option<Approx> = None;
    for k in 0..=n {
        let dev = mean_square_deviation(&x, k, s)?.approx();
        let gap = bessel_gap(&x, k)?;
        let link = deviation_identity(&x, k, s)?;
        let sign = Comparison::at_least(gap, Approx::exact(0.0), s.abs_tol);
        nonneg &= sign.holds();
        identity &= link.verdict == Verdict::Equality;
        if let Some(prev) = previous {
            monotone &= Comparison::at_most(gap, prev, s.abs_tol).holds();
        }
        previous = Some(gap);
        summary.push(format!(
            "N = {k}: deviation {}, bessel gap {}, {}",
            pm(dev),
            pm(gap),
            link.verdict.describe()
        ));
        table.push(vec![
            k.to_string(),
            dev.value.to_string(),
            dev.err.to_string(),
            gap.value.to_string(),
            gap.err.to_string(),
            link.verdict.describe().to_string(),
        ]);
        rows.push(json!({ "n": k, "deviation": dev, "bessel_gap": gap, "identity": link }));
    }
    Ok(Parts {
        result: json!({
            "family": family_value(x.family()),
            "integral_f": x.integral(),
            "coefficients": coefficient_rows(&x),
            "truncations": rows,
        }),
        summary,
        csv: Some(csv_table(
            &["n", "deviation", "deviation_err", "bessel_gap", "bessel_gap_err", "identity"],
            table,
        )),
        properties: vec![
            Property::new("bessel gap nonnegative", nonneg),
            Property::new("deviation equals bessel gap", identity),
            Property::new("bessel gap nonincreasing in N", monotone),
        ],
    })
}

fn run_parseval(p: &Problem) -> Result<Parts, CliError> {
    let (_, x, line) = expansion(p)?;
    let r = parseval_residual(&x, &p.settings)?;
    let bessel = Comparison::at_most(r.parseval_sum, r.integral, p.settings.abs_tol);
    let mut summary = vec![line];
    summary.extend(family_summary("phi", x.family()));
    summary.push(format!("parseval sum = {}", pm(r.parseval_sum)));
    summary.push(format!("integral of f = {}", pm(r.integral)));
    summary.push(format!("residual = {}", pm(r.residual)));
    summary.push(format!(
        "full deviation = {} (expansion {})",
        pm(r.deviation),
        if r.expansion_exists { "exists" } else { "incomplete" }
    ));
    let mut properties = vec![Property::new("parseval sum at most integral", bessel.holds())];
    if r.expansion_exists {
        properties.push(Property::new("residual vanishes for complete expansion", r.residual_vanishes));
    }
    Ok(Parts {
        result: json!({
            "family": family_value(x.family()),
            "coefficients": coefficient_rows(&x),
            "parseval": r,
            "bessel": bessel,
        }),
        summary,
        csv: None,
        properties,
    })
}

fn run_partition(p: &Problem) -> Result<Parts, CliError> {
    let f = p.field("f")?;
    let (region, line) = region_line(p)?;
    let zeta = p.zeta.unwrap_or_else(|| default_zeta(&f));
    let depth = p
        .partition_depth
        .unwrap_or_else(|| p.settings.max_depth_for(p.dim));
    let partition = sign_partition(&f, &region, depth, zeta, p.settings.seed)?;
    let seeds = if p.phi.is_empty() {
        CellSeeds::Restricted
    } else {
        CellSeeds::Uniform(p.seeds(&p.phi, "phi")?)
    };
    let r = partitioned_parseval(&f, &partition, &seeds, &region, &p.settings)?;
    let count = |s: i8| r.cells.iter().filter(|c| c.sign == s).count();
    let summary = vec![
        line,
        format!(
            "cells: {} positive, {} negative, {} zero; {} unresolved (volume {:.3e})",
            count(1),
            count(-1),
            count(0),
            partition.unresolved.len(),
            r.unresolved_volume
        ),
        format!("signed parseval total = {}", pm(r.total)),
        format!("direct integral = {}", pm(r.direct_integral)),
        format!(
            "discrepancy = {:.3e} (unresolved bound {:.3e})",
            r.discrepancy, r.unresolved_error
        ),
    ];
    let table = r
        .cells
        .iter()
        .map(|c| {
            vec![
                c.cell_id.to_string(),
                c.sign.to_string(),
                c.bounds.to_string(),
                c.cell_parseval.value.to_string(),
                c.cell_parseval.err.to_string(),
                c.cell_integral.value.to_string(),
                c.complete.to_string(),
            ]
        })
        .collect();
    let mut properties = Vec::new();
    if r.all_complete {
        properties.push(Property::new("signed total matches direct integral", r.consistent));
    }
    Ok(Parts {
        result: json!({
            "zeta": zeta,
            "depth": depth,
            "unresolved_cells": partition.unresolved.len(),
            "partition": r,
        }),
        summary,
        csv: Some(csv_table(
            &["cell", "sign", "bounds", "parseval", "parseval_err", "integral", "complete"],
            table,
        )),
        properties,
    })
}

fn run_cauchy_schwarz(p: &Problem) -> Result<Parts, CliError> {
    let g = p.field("g")?;
    let h = p.field("h")?;
    let (region, line) = region_line(p)?;
    let r = cauchy_schwarz_gap(&g, &h, &region, &p.settings)?;
    Ok(Parts {
        summary: vec![
            line,
            format!("gap = {}", pm(r.gap)),
            format!("(∫gh)² vs (∫g²)(∫h²): {}", describe(&r.comparison)),
            format!("verdict: {}", r.comparison.verdict.describe()),
        ],
        properties: vec![Property::new("cauchy-schwarz gap nonnegative", r.comparison.holds())],
        result: to_value(&r),
        csv: None,
    })
}

struct Families {
    f: ScalarField,
    g: ScalarField,
    phi: OrthogonalFamily,
    psi: OrthogonalFamily,
    region: measure_fourier::Region,
    n: usize,
    summary: Vec<String>,
}

fn families(p: &Problem) -> Result<Families, CliError> {
    let f = p.field("f")?;
    let g = p.field("g")?;
    let (region, line) = region_line(p)?;
    let phi = family(p, &p.phi, "phi", &Weight::reciprocal(&f)?, &region)?;
    let psi_seeds = if p.psi.is_empty() { &p.phi } else { &p.psi };
    let psi = family(p, psi_seeds, "psi", &Weight::reciprocal(&g)?, &region)?;
    let n = truncation(p, phi.len().min(psi.len()))?;
    let mut summary = vec![line];
    summary.extend(family_summary("phi", &phi));
    summary.extend(family_summary("psi", &psi));
    summary.push(format!("truncation N = {n}"));
    Ok(Families {
        f,
        g,
        phi,
        psi,
        region,
        n,
        summary,
    })
}

fn run_criterion(p: &Problem) -> Result<Parts, CliError> {
    let fam = families(p)?;
    let r = product_criterion_check(
        &fam.f,
        &fam.g,
        &fam.phi,
        &fam.psi,
        fam.n,
        &fam.region,
        &p.settings,
        p.diagnostics,
    )?;
    let mut summary = fam.summary;
    summary.push(format!("measure of region = {}", pm(r.measure)));
    for e in &r.grid {
        summary.push(format!(
            "(n={}, m={}): A {}, B {}",
            e.n,
            e.m,
            e.crit_a.verdict.describe(),
            e.crit_b.verdict.describe()
        ));
    }
    summary.push(format!("all criteria hold: {}", r.all_criteria_hold));
    summary.push(format!("conclusion ∫fg >= ∫f·∫g: {}", describe(&r.conclusion)));
    let mut properties = vec![Property::new(
        "conclusion false implies a failing criterion",
        r.contrapositive_ok(),
    )];
    if let Some(d) = &r.diagnostics {
        for link in &d.links {
            summary.push(format!(
                "chain: {}: {}",
                link.name,
                link.comparison.verdict.describe()
            ));
        }
        // algebraic identities must hold numerically; the surrogate step is
        // reported but not asserted
        for link in d.links.iter().filter(|l| l.relation == "=") {
            properties.push(Property::new(format!("chain identity: {}", link.name), link.ok));
        }
    }
    Ok(Parts {
        csv: Some(r.grid_csv()),
        result: to_value(&r),
        summary,
        properties,
    })
}

fn run_corollary(p: &Problem) -> Result<Parts, CliError> {
    let fam = families(p)?;
    let r = corollary_check(&fam.f, &fam.g, &fam.phi, &fam.psi, fam.n, &fam.region, &p.settings)?;
    let mut summary = fam.summary;
    for c in &r.phi_conditions {
        summary.push(format!("phi_{} sub-condition: {}", c.index, describe(&c.comparison)));
    }
    for c in &r.psi_conditions {
        summary.push(format!("psi_{} sub-condition: {}", c.index, describe(&c.comparison)));
    }
    let mut table = Vec::new();
    for e in &r.entries {
        summary.push(format!(
            "(n={}, m={}): {}{}",
            e.n,
            e.m,
            e.comparison.verdict.describe(),
            if e.certified { ", certified" } else { "" }
        ));
        table.push(vec![
            e.n.to_string(),
            e.m.to_string(),
            e.comparison.lhs.value.to_string(),
            e.comparison.rhs.value.to_string(),
            e.comparison.verdict.describe().to_string(),
            e.certified.to_string(),
        ]);
    }
    Ok(Parts {
        properties: vec![Property::new("corollary bound holds for every pair", r.all_hold)],
        csv: Some(csv_table(&["n", "m", "lhs", "rhs", "verdict", "certified"], table)),
        result: to_value(&r),
        summary,
    })
}
