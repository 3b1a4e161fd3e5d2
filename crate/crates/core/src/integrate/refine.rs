use rayon::prelude::*;

use super::gauss::product_rule;
use super::{IntegralEstimate, IntegratorSettings, Method};
use crate::dyadic::Cell;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::reduce::pairwise;
use crate::region::Region;

/// Cells shallower than this are split even when no probe lands in the
/// region, so small regions inside large boxes are not skipped outright.
pub(crate) const MIN_CLASSIFY_DEPTH: u32 = 2;
/// Subtrees above this depth are processed on the rayon pool.
const PARALLEL_DEPTH: u32 = 3;

#[derive(Debug, Clone, Copy)]
struct Partial {
    value: f64,
    err: f64,
    evals: u64,
}

impl Partial {
    const ZERO: Partial = Partial {
        value: 0.0,
        err: 0.0,
        evals: 0,
    };

    fn combine(a: Partial, b: Partial) -> Partial {
        Partial {
            value: a.value + b.value,
            err: a.err + b.err,
            evals: a.evals + b.evals,
        }
    }
}

struct Ctx<'a> {
    f: &'a ScalarField,
    region: &'a Region,
    settings: &'a IntegratorSettings,
    max_depth: u32,
    root_volume: f64,
}

pub(super) fn integrate(
    f: &ScalarField,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<IntegralEstimate> {
    let dim = region.dim();
    if dim > 3 {
        return Err(Error::DimensionTooHigh(dim));
    }
    let ctx = Ctx {
        f,
        region,
        settings: s,
        max_depth: s.max_depth_for(dim),
        root_volume: region.bounds().volume(),
    };
    let total = walk(&ctx, Cell::root(region.bounds()))?;
    Ok(IntegralEstimate {
        value: total.value,
        err: total.err,
        evals: total.evals.max(1),
        method: Method::Refine,
        seed: None,
    })
}

/// Map children in order (in parallel near the root) and reduce pairwise.
fn over_children(
    depth: u32,
    children: Vec<Cell>,
    each: impl Fn(Cell) -> Result<Partial> + Sync + Send,
) -> Result<Partial> {
    let results: Vec<Result<Partial>> = if depth < PARALLEL_DEPTH {
        children.into_par_iter().map(&each).collect()
    } else {
        children.into_iter().map(&each).collect()
    };
    let parts = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pairwise(&parts, Partial::ZERO, &Partial::combine))
}

fn walk(ctx: &Ctx<'_>, cell: Cell) -> Result<Partial> {
    let probes = cell.membership_probes(ctx.settings.seed);
    let mut inside = Vec::with_capacity(probes.len());
    for p in &probes {
        if ctx.region.contains(p)? {
            inside.push(p);
        }
    }
    let probe_evals = probes.len() as u64;
    let at_bottom = cell.depth >= ctx.max_depth;

    let part = if inside.len() == probes.len() {
        interior(ctx, cell, None)?
    } else if inside.is_empty() && (cell.depth >= MIN_CLASSIFY_DEPTH || at_bottom) {
        Partial::ZERO
    } else if at_bottom {
        // value with the inset probes: exact corners can sit on a zero of f
        let inset = cell.probes(ctx.settings.seed);
        let mut inner = Vec::with_capacity(inset.len());
        for p in &inset {
            if ctx.region.contains(p)? {
                inner.push(p);
            }
        }
        boundary(ctx, &cell, &inner, inset.len())?
    } else {
        let depth = cell.depth;
        over_children(depth, cell.children(), |c| walk(ctx, c))?
    };
    Ok(Partial {
        evals: part.evals + probe_evals,
        ..part
    })
}

/// Boundary cell at the depth limit: inside-fraction weighting, with the
/// cell's whole `|f|·volume` charged as error.
fn boundary(ctx: &Ctx<'_>, cell: &Cell, inside: &[&Vec<f64>], total: usize) -> Result<Partial> {
    if inside.is_empty() {
        return Ok(Partial::ZERO);
    }
    let mut values = Vec::with_capacity(inside.len());
    for p in inside {
        values.push(ctx.f.eval(p)?);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let volume = cell.volume();
    let fraction = inside.len() as f64 / total as f64;
    Ok(Partial {
        value: mean * volume * fraction,
        err: sup * volume,
        evals: values.len() as u64,
    })
}

/// Adaptive Gauss refinement of `f·1_E` on a cell whose probes all lie in E.
/// Nodes outside E count as zero, so a boundary the probes missed shows up
/// as coarse/fine disagreement. `coarse` is the whole-cell rule if known.
fn interior(ctx: &Ctx<'_>, cell: Cell, coarse: Option<f64>) -> Result<Partial> {
    let mut evals = 0;
    let coarse = match coarse {
        Some(v) => v,
        None => {
            let (v, n) = product_rule(ctx.f, Some(ctx.region), &cell.lo, &cell.hi)?;
            evals += n;
            v
        }
    };
    let children = cell.children();
    let mut fine_parts = Vec::with_capacity(children.len());
    for c in &children {
        let (v, n) = product_rule(ctx.f, Some(ctx.region), &c.lo, &c.hi)?;
        evals += n;
        fine_parts.push(v);
    }
    let fine = crate::reduce::pairwise_sum(&fine_parts);
    let diff = (fine - coarse).abs();
    let s = ctx.settings;
    let tol = (s.abs_tol * cell.volume() / ctx.root_volume).max(s.rel_tol * fine.abs());
    if diff <= tol || cell.depth + 1 >= ctx.max_depth {
        return Ok(Partial {
            value: fine,
            err: diff,
            evals,
        });
    }
    let depth = cell.depth;
    let paired: Vec<(Cell, f64)> = children.into_iter().zip(fine_parts).collect();
    let results: Vec<Result<Partial>> = if depth < PARALLEL_DEPTH {
        paired
            .into_par_iter()
            .map(|(c, v)| interior(ctx, c, Some(v)))
            .collect()
    } else {
        paired
            .into_iter()
            .map(|(c, v)| interior(ctx, c, Some(v)))
            .collect()
    };
    let parts = results.into_iter().collect::<Result<Vec<_>>>()?;
    let sub = pairwise(&parts, Partial::ZERO, &Partial::combine);
    Ok(Partial {
        evals: sub.evals + evals,
        ..sub
    })
}
