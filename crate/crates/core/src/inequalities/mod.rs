//! Integral Cauchy-Schwarz and the sufficient criterion for
//! `∫fg ≥ ∫f·∫g` built from two weighted orthogonal expansions.

mod corollary;
mod criterion;

use serde::Serialize;

use crate::approx::{Approx, Comparison, Verdict};
use crate::error::{Error, Result};
use crate::expansion::Expansion;
use crate::field::ScalarField;
use crate::integrate::{integrate, IntegratorSettings};
use crate::ortho::OrthogonalFamily;
use crate::region::Region;

pub use corollary::{corollary_check, CorollaryEntry, CorollaryReport, SubCondition};
pub use criterion::{product_criterion_check, CriterionReport, Diagnostics, GridEntry, Link};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchySchwarzReport {
    /// `∫g²`
    pub gg: Approx,
    /// `∫h²`
    pub hh: Approx,
    /// `∫gh`
    pub gh: Approx,
    /// `(∫g²)(∫h²) - (∫gh)²`
    pub gap: Approx,
    /// `(∫gh)² <= (∫g²)(∫h²)`
    pub comparison: Comparison,
    /// The gap is indistinguishable from zero (`h` proportional to `g`).
    pub equality: bool,
}

pub fn cauchy_schwarz_gap(
    g: &ScalarField,
    h: &ScalarField,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<CauchySchwarzReport> {
    let gg = integrate(&g.square(), region, s)?.approx();
    let hh = integrate(&h.square(), region, s)?.approx();
    let gh = integrate(&g.mul(h), region, s)?.approx();
    let product = gg.mul(hh);
    let cross = gh.square();
    let comparison = Comparison::at_most(cross, product, s.abs_tol);
    Ok(CauchySchwarzReport {
        gg,
        hh,
        gh,
        gap: product.sub(cross),
        comparison,
        equality: comparison.verdict == Verdict::Equality,
    })
}

/// The two expansions shared by the criterion and corollary checks.
struct Pair {
    x: Expansion,
    y: Expansion,
    /// `1/(fg)`
    inv_fg: ScalarField,
    region: Region,
}

impl Pair {
    fn new(
        f: &ScalarField,
        g: &ScalarField,
        phi: &OrthogonalFamily,
        psi: &OrthogonalFamily,
        n: usize,
        region: &Region,
        s: &IntegratorSettings,
    ) -> Result<Pair> {
        if n == 0 {
            return Err(Error::InvalidParameter("truncation must be >= 1".into()));
        }
        for fam in [phi, psi] {
            if n > fam.len() {
                return Err(Error::Truncation { n, size: fam.len() });
            }
        }
        let inv_fg = f.reciprocal()?.mul(&g.reciprocal()?);
        let x = Expansion::new(f, phi.clone(), s)?;
        let y = Expansion::new(g, psi.clone(), s)?;
        Ok(Pair {
            x,
            y,
            inv_fg,
            region: region.clone(),
        })
    }

    fn phi(&self, n: usize) -> &ScalarField {
        self.x.family().member(n)
    }

    fn psi(&self, m: usize) -> &ScalarField {
        self.y.family().member(m)
    }

    /// `∫ φ_n²ψ_m²/(fg)`
    fn joint_square(&self, n: usize, m: usize, s: &IntegratorSettings) -> Result<Approx> {
        let integrand = self.phi(n).square().mul(&self.psi(m).square()).mul(&self.inv_fg);
        Ok(integrate(&integrand, &self.region, s)?.approx())
    }
}

/// Every `(n, m)` with `n, m < size`, row-major.
fn grid_indices(size: usize) -> Vec<(usize, usize)> {
    (0..size).flat_map(|n| (0..size).map(move |m| (n, m))).collect()
}
