//! Sign partitioning: split a region into dyadic cells on which a field is
//! positive, negative or (within a threshold) zero.

use rayon::prelude::*;
use serde::Serialize;

use super::{BoundingBox, Region};
use crate::dyadic::Cell;
use crate::error::{Error, Result};
use crate::field::ScalarField;

const MIN_CLASSIFY_DEPTH: u32 = 2;
const PARALLEL_DEPTH: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
    Zero,
}

impl Sign {
    pub fn of(value: f64, zeta: f64) -> Sign {
        if value.abs() <= zeta {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
            Sign::Zero => 0,
        }
    }
}

/// A cell of the partition (`cell box ∩ region`) on which every probe of the
/// field carried the same sign.
#[derive(Debug, Clone)]
pub struct SignedCell {
    pub region: Region,
    pub sign: Sign,
    pub depth: u32,
    /// Smallest and largest |f| seen at the probes.
    pub min_abs: f64,
    pub max_abs: f64,
}

impl SignedCell {
    pub fn bounds(&self) -> &BoundingBox {
        self.region.bounds()
    }
}

#[derive(Debug, Clone)]
pub struct UnresolvedCell {
    pub region: Region,
    pub depth: u32,
    /// Largest |f| seen at the probes that fell inside the region.
    pub sup_abs: f64,
}

#[derive(Debug, Clone)]
pub struct SignPartition {
    pub cells: Vec<SignedCell>,
    pub unresolved: Vec<UnresolvedCell>,
    pub zeta: f64,
}

impl SignPartition {
    /// Sum of the unresolved cells' box volumes.
    pub fn unresolved_volume(&self) -> f64 {
        let v: Vec<f64> = self
            .unresolved
            .iter()
            .map(|c| c.region.bounds().volume())
            .collect();
        crate::reduce::pairwise_sum(&v)
    }

    /// Bound on `|∫ f|` over the unresolved cells: volume times sup |f|.
    /// Uses the declared bound of `f` when present, else the sampled maximum.
    pub fn unresolved_error(&self, f: &ScalarField) -> f64 {
        let sampled = self.unresolved.iter().fold(0.0f64, |m, c| m.max(c.sup_abs));
        let sup = f.sup_abs().unwrap_or(sampled);
        self.unresolved_volume() * sup
    }

    /// How many cells claim `p`, signed or unresolved.
    pub fn claims(&self, p: &[f64]) -> Result<usize> {
        let mut n = 0;
        for c in &self.cells {
            n += usize::from(c.region.contains(p)?);
        }
        for c in &self.unresolved {
            n += usize::from(c.region.contains(p)?);
        }
        Ok(n)
    }
}

/// Default zero threshold: `1e-9` times the declared bound of |f|, else `1e-9`.
pub fn default_zeta(f: &ScalarField) -> f64 {
    1e-9 * f.sup_abs().filter(|s| *s > 0.0).unwrap_or(1.0)
}

#[derive(Default)]
struct Parts {
    cells: Vec<SignedCell>,
    unresolved: Vec<UnresolvedCell>,
}

impl Parts {
    fn extend(&mut self, other: Parts) {
        self.cells.extend(other.cells);
        self.unresolved.extend(other.unresolved);
    }
}

struct Ctx<'a> {
    f: &'a ScalarField,
    region: &'a Region,
    max_depth: u32,
    zeta: f64,
    seed: u64,
}

/// Partition `region` by the sign of `f`, subdividing mixed cells down to
/// `max_depth`. Cells are listed in depth-first child order.
pub fn sign_partition(
    f: &ScalarField,
    region: &Region,
    max_depth: u32,
    zeta: f64,
    seed: u64,
) -> Result<SignPartition> {
    if f.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            found: f.dim(),
        });
    }
    if max_depth == 0 {
        return Err(Error::InvalidParameter("max_depth must be >= 1".into()));
    }
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidParameter(format!("zero threshold must be > 0, got {zeta}")));
    }
    let ctx = Ctx {
        f,
        region,
        max_depth,
        zeta,
        seed,
    };
    let parts = walk(&ctx, Cell::root(region.bounds()))?;
    Ok(SignPartition {
        cells: parts.cells,
        unresolved: parts.unresolved,
        zeta,
    })
}

fn walk(ctx: &Ctx<'_>, cell: Cell) -> Result<Parts> {
    let probes = cell.probes(ctx.seed);
    let mut values = Vec::with_capacity(probes.len());
    for p in &probes {
        if ctx.region.contains(p)? {
            values.push(ctx.f.eval(p)?);
        }
    }
    let at_bottom = cell.depth >= ctx.max_depth;
    let mut parts = Parts::default();
    if values.is_empty() {
        if cell.depth < MIN_CLASSIFY_DEPTH {
            if at_bottom {
                parts.unresolved.push(UnresolvedCell {
                    region: ctx.region.restrict_to_cell(cell.half_open()),
                    depth: cell.depth,
                    sup_abs: 0.0,
                });
                return Ok(parts);
            }
            return subdivide(ctx, cell);
        }
        return Ok(parts);
    }
    let first = Sign::of(values[0], ctx.zeta);
    let uniform = values.iter().all(|&v| Sign::of(v, ctx.zeta) == first);
    let (min_abs, max_abs) = values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
    if uniform {
        parts.cells.push(SignedCell {
            region: ctx.region.restrict_to_cell(cell.half_open()),
            sign: first,
            depth: cell.depth,
            min_abs,
            max_abs,
        });
        Ok(parts)
    } else if at_bottom {
        parts.unresolved.push(UnresolvedCell {
            region: ctx.region.restrict_to_cell(cell.half_open()),
            depth: cell.depth,
            sup_abs: max_abs,
        });
        Ok(parts)
    } else {
        subdivide(ctx, cell)
    }
}

fn subdivide(ctx: &Ctx<'_>, cell: Cell) -> Result<Parts> {
    let children = cell.children();
    let results: Vec<Result<Parts>> = if cell.depth < PARALLEL_DEPTH {
        children.into_par_iter().map(|c| walk(ctx, c)).collect()
    } else {
        children.into_iter().map(|c| walk(ctx, c)).collect()
    };
    let mut out = Parts::default();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
