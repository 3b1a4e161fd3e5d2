use rayon::prelude::*;
use serde::Serialize;

use super::{grid_indices, Pair};
use crate::approx::{Approx, Comparison};
use crate::error::Result;
use crate::field::ScalarField;
use crate::integrate::{integrate, IntegratorSettings};
use crate::ortho::OrthogonalFamily;
use crate::region::Region;

/// `∫φ⁴/w² <= (∫φ²/w)²` for one family member, index 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubCondition {
    pub index: usize,
    pub comparison: Comparison,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryEntry {
    pub n: usize,
    pub m: usize,
    /// `∫φ_n²ψ_m²/(fg) <= sqrt(∫φ_n⁴/f² · ∫ψ_m⁴/g²)`
    pub comparison: Comparison,
    pub holds: bool,
    /// Both sub-conditions hold for this pair, which implies the first
    /// product hypothesis there.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub truncation: usize,
    pub entries: Vec<CorollaryEntry>,
    pub phi_conditions: Vec<SubCondition>,
    pub psi_conditions: Vec<SubCondition>,
    pub all_hold: bool,
    /// 1-based `(n, m)` pairs certified by the sub-conditions.
    pub certified: Vec<(usize, usize)>,
}

pub fn corollary_check(
    f: &ScalarField,
    g: &ScalarField,
    phi: &OrthogonalFamily,
    psi: &OrthogonalFamily,
    n: usize,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<CorollaryReport> {
    let pair = Pair::new(f, g, phi, psi, n, region, s)?;
    let inv_f = f.reciprocal()?;
    let inv_g = g.reciprocal()?;
    let phi_conditions = conditions(pair.x.family(), &inv_f, n, region, s)?;
    let psi_conditions = conditions(pair.y.family(), &inv_g, n, region, s)?;

    let entries: Vec<Result<CorollaryEntry>> = grid_indices(n)
        .into_par_iter()
        .map(|(i, j)| {
            let lhs = pair.joint_square(i, j, s)?;
            let a = phi_conditions[i].comparison.lhs;
            let b = psi_conditions[j].comparison.lhs;
            let comparison = Comparison::at_most(lhs, a.mul(b).sqrt(), s.abs_tol);
            Ok(CorollaryEntry {
                n: i + 1,
                m: j + 1,
                holds: comparison.holds(),
                comparison,
                certified: phi_conditions[i].holds && psi_conditions[j].holds,
            })
        })
        .collect();
    let entries = entries.into_iter().collect::<Result<Vec<_>>>()?;
    let certified = entries
        .iter()
        .filter(|e| e.certified)
        .map(|e| (e.n, e.m))
        .collect();
    Ok(CorollaryReport {
        truncation: n,
        all_hold: entries.iter().all(|e| e.holds),
        entries,
        phi_conditions,
        psi_conditions,
        certified,
    })
}

/// Comparison lhs is `∫φ⁴w²`, rhs `(∫φ²w)²` with `w` the reciprocal weight.
fn conditions(
    family: &OrthogonalFamily,
    inv: &ScalarField,
    n: usize,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<Vec<SubCondition>> {
    (0..n)
        .into_par_iter()
        .map(|k| {
            let ratio = family.member(k).square().mul(inv);
            let fourth: Approx = integrate(&ratio.square(), region, s)?.approx();
            let second = integrate(&ratio, region, s)?.approx();
            let comparison = Comparison::at_most(fourth, second.square(), s.abs_tol);
            Ok(SubCondition {
                index: k + 1,
                holds: comparison.holds(),
                comparison,
            })
        })
        .collect()
}
