//! Integration of a sign-changing field through per-cell Parseval sums.
//!
//! On a cell where `f > 0` the machinery applies to `f` directly; where
//! `f < 0` it applies to `-f` and the result is negated; zero cells add
//! nothing. The signed total should match `∫ f` up to the combined errors
//! and the contribution of unresolved cells.

use rayon::prelude::*;
use serde::Serialize;

use super::{parseval_sum, Expansion, EXISTENCE_REL_TOL};
use crate::approx::Approx;
use crate::error::{Error, Result};
use crate::field::{ScalarField, Weight};
use crate::integrate::{integrate, IntegratorSettings};
use crate::ortho::gram_schmidt;
use crate::region::{BoundingBox, Region, Sign, SignPartition, SignedCell};

/// Seeds for the per-cell families.
#[derive(Debug, Clone, Default)]
pub enum CellSeeds {
    /// `{f}` restricted to each cell (the signed part `±f`).
    #[default]
    Restricted,
    /// The same seeds on every cell.
    Uniform(Vec<ScalarField>),
    /// One seed list per signed cell, in partition order.
    PerCell(Vec<Vec<ScalarField>>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    /// Zero-based position in the partition.
    pub cell_id: usize,
    pub sign: i8,
    pub bounds: BoundingBox,
    pub coefficients: Vec<f64>,
    /// `±Σ c_n² ∫(φ_n²/|f|)` on this cell; zero for zero cells.
    pub cell_parseval: Approx,
    /// `∫ f` over the cell.
    pub cell_integral: Approx,
    /// Full-family deviation of `|f|` on the cell, when it was expanded.
    pub deviation: Option<Approx>,
    /// The cell's expansion reproduces `|f|` to within the existence threshold.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub cells: Vec<CellReport>,
    pub total: Approx,
    pub direct_integral: Approx,
    /// `total - direct_integral`.
    pub discrepancy: f64,
    pub unresolved_volume: f64,
    /// Bound on `|∫ f|` over unresolved cells.
    pub unresolved_error: f64,
    /// `|discrepancy|` within the combined errors, the unresolved bound and `abs_tol`.
    pub consistent: bool,
    /// Every expanded cell was complete.
    pub all_complete: bool,
}

pub fn partitioned_parseval(
    f: &ScalarField,
    partition: &SignPartition,
    seeds: &CellSeeds,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<PartitionReport> {
    if let CellSeeds::PerCell(lists) = seeds {
        if lists.len() != partition.cells.len() {
            return Err(Error::InvalidParameter(format!(
                "{} seed lists for {} cells",
                lists.len(),
                partition.cells.len()
            )));
        }
    }
    let cells: Vec<Result<CellReport>> = partition
        .cells
        .par_iter()
        .enumerate()
        .map(|(id, cell)| {
            cell_report(f, id, cell, seeds, partition.zeta, s).map_err(|e| Error::Cell {
                cell: id,
                source: Box::new(e),
            })
        })
        .collect();
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;

    let total = Approx::sum(cells.iter().map(|c| c.cell_parseval));
    let direct = integrate(f, region, s)?.approx();
    let discrepancy = total.value - direct.value;
    let unresolved_volume = partition.unresolved_volume();
    let unresolved_error = partition.unresolved_error(f);
    let slack = total.err + direct.err + unresolved_error + s.abs_tol;
    let all_complete = cells.iter().all(|c| c.complete);
    Ok(PartitionReport {
        cells,
        total,
        direct_integral: direct,
        discrepancy,
        unresolved_volume,
        unresolved_error,
        consistent: discrepancy.abs() <= slack,
        all_complete,
    })
}

fn cell_report(
    f: &ScalarField,
    id: usize,
    cell: &SignedCell,
    seeds: &CellSeeds,
    zeta: f64,
    s: &IntegratorSettings,
) -> Result<CellReport> {
    let cell_integral = integrate(f, &cell.region, s)?.approx();
    let mut report = CellReport {
        cell_id: id,
        sign: cell.sign.as_i8(),
        bounds: cell.bounds().clone(),
        coefficients: Vec::new(),
        cell_parseval: Approx::exact(0.0),
        cell_integral,
        deviation: None,
        complete: true,
    };
    let g = match cell.sign {
        Sign::Zero => return Ok(report),
        Sign::Positive => match f.floor() {
            Some(_) => f.clone(),
            None => f.clone().with_floor(zeta)?,
        },
        Sign::Negative => f.neg().with_floor(zeta)?,
    };
    let seed_list = match seeds {
        CellSeeds::Restricted => vec![g.clone()],
        CellSeeds::Uniform(v) => v.clone(),
        CellSeeds::PerCell(lists) => lists[id].clone(),
    };
    let weight = Weight::reciprocal(&g)?;
    let family = gram_schmidt(&seed_list, &weight, &cell.region, s)?;
    let x = Expansion::new(&g, family, s)?;
    let sum = parseval_sum(&x, x.len());
    let deviation = super::mean_square_deviation(&x, x.len(), s)?.approx();
    report.coefficients = x.coefficient_values();
    report.cell_parseval = if cell.sign == Sign::Negative { sum.neg() } else { sum };
    report.complete = deviation.value <= EXISTENCE_REL_TOL * x.integral().value.abs();
    report.deviation = Some(deviation);
    Ok(report)
}
