use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{grid_indices, Pair};
use crate::approx::{Approx, Comparison, Verdict};
use crate::error::Result;
use crate::field::ScalarField;
use crate::integrate::{integrate, IntegratorSettings};
use crate::ortho::OrthogonalFamily;
use crate::region::Region;

/// The two hypotheses at one `(n, m)`, indices 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEntry {
    pub n: usize,
    pub m: usize,
    /// `∫φ_n²ψ_m²/(fg) <= ∫φ_n²/f · ∫ψ_m²/g`
    pub crit_a: Comparison,
    /// `c_n d_m ∫φ_nψ_m >= c_n d_m ∫φ_n ∫ψ_m`, the factor kept on both sides.
    pub crit_b: Comparison,
    pub crit_a_holds: bool,
    pub crit_b_holds: bool,
    /// `∫φ_nψ_m`, reused by the diagnostics.
    #[serde(skip)]
    joint: Approx,
    /// `∫φ_n²ψ_m²/(fg)`
    #[serde(skip)]
    joint_square: Approx,
}

/// One step of the proof chain: `lhs = rhs` or `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub name: &'static str,
    pub relation: &'static str,
    pub comparison: Comparison,
    pub ok: bool,
}

impl Link {
    fn equal(name: &'static str, lhs: Approx, rhs: Approx, abs_tol: f64) -> Link {
        let comparison = Comparison::at_most(lhs, rhs, abs_tol);
        Link {
            name,
            relation: "=",
            ok: comparison.verdict == Verdict::Equality,
            comparison,
        }
    }

    fn at_most(name: &'static str, lhs: Approx, rhs: Approx, abs_tol: f64) -> Link {
        let comparison = Comparison::at_most(lhs, rhs, abs_tol);
        Link {
            name,
            relation: "<=",
            ok: comparison.holds(),
            comparison,
        }
    }
}

/// Quantities along the mean-square-deviation argument for the product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `∫(fg - s_N t_N)²/(fg)`
    pub product_deviation: Approx,
    /// `∫fg - 2ΣΣ c_n d_m ∫φ_nψ_m + ∫(s_N t_N)²/(fg)`
    pub expanded: Approx,
    /// Same with `(Σc_n²φ_n²)(Σd_m²ψ_m²)` in place of `(s_N t_N)²`.
    pub surrogate: Approx,
    /// Same with the last term as `ΣΣ c_n²d_m² ∫φ_n²ψ_m²/(fg)`.
    pub double_sum: Approx,
    /// The double sum after applying both hypotheses termwise.
    pub criterion_bound: Approx,
    /// `∫fg - ΣΣ (∫φ_n)²(∫ψ_m)² / (∫φ_n²/f ∫ψ_m²/g)`
    pub bessel_bound: Approx,
    /// `(Σ(∫φ_n)²/∫φ_n²/f)(Σ(∫ψ_m)²/∫ψ_m²/g)`
    pub product_of_sums: Approx,
    pub integral_fg: Approx,
    pub links: Vec<Link>,
    pub chain_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub truncation: usize,
    /// `μ(D)`; the conclusion is evaluated without normalizing by it.
    pub measure: Approx,
    pub coefficients_f: Vec<Approx>,
    pub coefficients_g: Vec<Approx>,
    /// Row-major over `(n, m)`.
    pub grid: Vec<GridEntry>,
    /// No hypothesis is violated beyond tolerance.
    pub all_criteria_hold: bool,
    /// Every hypothesis holds with a margin exceeding its error bound.
    pub all_criteria_strict: bool,
    /// `∫fg >= ∫f · ∫g`
    pub conclusion: Comparison,
    pub conclusion_holds: bool,
    pub diagnostics: Option<Diagnostics>,
}

impl CriterionReport {
    pub fn entry(&self, n: usize, m: usize) -> &GridEntry {
        &self.grid[(n - 1) * self.truncation + (m - 1)]
    }

    /// A failing conclusion must come with a failing hypothesis.
    pub fn contrapositive_ok(&self) -> bool {
        self.conclusion_holds || !self.all_criteria_hold
    }

    /// Rows `n`, columns `m`; each cell is `A B AB` flags as `T`/`F`.
    pub fn grid_csv(&self) -> String {
        let flag = |b: bool| if b { 'T' } else { 'F' };
        let mut out = String::from("n\\m");
        for m in 1..=self.truncation {
            let _ = write!(out, ",{m}");
        }
        out.push('\n');
        for n in 1..=self.truncation {
            let _ = write!(out, "{n}");
            for m in 1..=self.truncation {
                let e = self.entry(n, m);
                let _ = write!(
                    out,
                    ",{}{}{}",
                    flag(e.crit_a_holds),
                    flag(e.crit_b_holds),
                    flag(e.crit_a_holds && e.crit_b_holds)
                );
            }
            out.push('\n');
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
pub fn product_criterion_check(
    f: &ScalarField,
    g: &ScalarField,
    phi: &OrthogonalFamily,
    psi: &OrthogonalFamily,
    n: usize,
    region: &Region,
    s: &IntegratorSettings,
    diagnostics: bool,
) -> Result<CriterionReport> {
    let pair = Pair::new(f, g, phi, psi, n, region, s)?;
    let c: Vec<Approx> = pair.x.coefficients()[..n].iter().map(|c| c.approx()).collect();
    let d: Vec<Approx> = pair.y.coefficients()[..n].iter().map(|c| c.approx()).collect();

    let grid: Vec<Result<GridEntry>> = grid_indices(n)
        .into_par_iter()
        .map(|(i, j)| grid_entry(&pair, i, j, c[i], d[j], s))
        .collect();
    let grid = grid.into_iter().collect::<Result<Vec<_>>>()?;

    let fg = f.mul(g);
    let integral_fg = integrate(&fg, region, s)?.approx();
    let rhs = pair.x.integral().approx().mul(pair.y.integral().approx());
    let conclusion = Comparison::at_least(integral_fg, rhs, s.abs_tol);
    let one = ScalarField::constant(1.0, f.dim());
    let measure = integrate(&one, region, s)?.approx();

    let all_criteria_hold = grid.iter().all(|e| e.crit_a_holds && e.crit_b_holds);
    let all_criteria_strict = grid
        .iter()
        .all(|e| e.crit_a.strictly_holds() && e.crit_b.strictly_holds());
    let diagnostics = if diagnostics {
        Some(chain(&pair, &grid, &c, &d, &fg, integral_fg, n, s)?)
    } else {
        None
    };
    Ok(CriterionReport {
        truncation: n,
        measure,
        coefficients_f: c,
        coefficients_g: d,
        grid,
        all_criteria_hold,
        all_criteria_strict,
        conclusion_holds: conclusion.holds(),
        conclusion,
        diagnostics,
    })
}

fn grid_entry(
    pair: &Pair,
    i: usize,
    j: usize,
    c: Approx,
    d: Approx,
    s: &IntegratorSettings,
) -> Result<GridEntry> {
    let xi = &pair.x.coefficients()[i];
    let yj = &pair.y.coefficients()[j];
    let joint_square = pair.joint_square(i, j, s)?;
    let crit_a = Comparison::at_most(
        joint_square,
        xi.denominator.approx().mul(yj.denominator.approx()),
        s.abs_tol,
    );
    let joint = integrate(&pair.phi(i).mul(pair.psi(j)), &pair.region, s)?.approx();
    let cd = c.mul(d);
    let crit_b = Comparison::at_least(
        cd.mul(joint),
        cd.mul(xi.numerator.approx().mul(yj.numerator.approx())),
        s.abs_tol,
    );
    Ok(GridEntry {
        n: i + 1,
        m: j + 1,
        crit_a_holds: crit_a.holds(),
        crit_b_holds: crit_b.holds(),
        crit_a,
        crit_b,
        joint,
        joint_square,
    })
}

#[allow(clippy::too_many_arguments)]
fn chain(
    pair: &Pair,
    grid: &[GridEntry],
    c: &[Approx],
    d: &[Approx],
    fg: &ScalarField,
    integral_fg: Approx,
    n: usize,
    s: &IntegratorSettings,
) -> Result<Diagnostics> {
    let region = &pair.region;
    let st = pair.x.partial_sum(n)?.mul(&pair.y.partial_sum(n)?);
    let diff = fg.sub(&st);
    let product_deviation = integrate(&diff.square().mul(&pair.inv_fg), region, s)?.approx();

    let xs = pair.x.coefficients();
    let ys = pair.y.coefficients();
    let mut cross = Vec::with_capacity(grid.len());
    let mut squares = Vec::with_capacity(grid.len());
    let mut bounded_cross = Vec::with_capacity(grid.len());
    let mut bounded_squares = Vec::with_capacity(grid.len());
    let mut bessel_terms = Vec::with_capacity(grid.len());
    for e in grid {
        let (i, j) = (e.n - 1, e.m - 1);
        let cd = c[i].mul(d[j]);
        let dens = xs[i].denominator.approx().mul(ys[j].denominator.approx());
        let nums = xs[i].numerator.approx().mul(ys[j].numerator.approx());
        cross.push(cd.mul(e.joint));
        squares.push(cd.square().mul(e.joint_square));
        bounded_cross.push(cd.mul(nums));
        bounded_squares.push(cd.square().mul(dens));
        bessel_terms.push(nums.square().div(dens));
    }
    let cross = Approx::sum(cross).scale(2.0);
    let last = integrate(&st.square().mul(&pair.inv_fg), region, s)?.approx();
    let expanded = integral_fg.sub(cross).add(last);

    let sq = |exp: &crate::expansion::Expansion, coeffs: &[Approx]| {
        let terms = coeffs
            .iter()
            .zip(exp.family().members())
            .map(|(a, m)| (a.value * a.value, m.field.square()))
            .collect();
        ScalarField::linear_combination(fg.dim(), terms)
    };
    let surrogate_field = sq(&pair.x, c).mul(&sq(&pair.y, d)).mul(&pair.inv_fg);
    let surrogate_last = integrate(&surrogate_field, region, s)?.approx();
    let surrogate = integral_fg.sub(cross).add(surrogate_last);
    let double_sum = integral_fg.sub(cross).add(Approx::sum(squares));
    let criterion_bound = integral_fg
        .sub(Approx::sum(bounded_cross).scale(2.0))
        .add(Approx::sum(bounded_squares));
    let bessel_bound = integral_fg.sub(Approx::sum(bessel_terms));
    let bessel_sum = |xs: &[crate::expansion::Coefficient]| {
        Approx::sum(xs[..n].iter().map(|c| c.parseval_term()))
    };
    let product_of_sums = bessel_sum(xs).mul(bessel_sum(ys));

    let tol = s.abs_tol;
    let links = vec![
        Link::equal("deviation = expanded square", product_deviation, expanded, tol),
        Link::at_most("expanded square <= finite-sum surrogate", expanded, surrogate, tol),
        Link::equal("surrogate = double sum", surrogate, double_sum, tol),
        Link::at_most("double sum <= criterion bound", double_sum, criterion_bound, tol),
        Link::equal("criterion bound = double-sum Bessel bound", criterion_bound, bessel_bound, tol),
        Link::at_most("deviation <= double-sum Bessel bound", product_deviation, bessel_bound, tol),
        Link::at_most("product of Bessel sums <= integral of fg", product_of_sums, integral_fg, tol),
    ];
    let chain_holds = links.iter().all(|l| l.ok);
    Ok(Diagnostics {
        product_deviation,
        expanded,
        surrogate,
        double_sum,
        criterion_bound,
        bessel_bound,
        product_of_sums,
        integral_fg,
        links,
        chain_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_field, Weight};
    use crate::ortho::gram_schmidt;

    fn family(f: &ScalarField, seeds: &[&str]) -> OrthogonalFamily {
        let s = IntegratorSettings::default();
        let seeds: Vec<_> = seeds.iter().map(|t| parse_field(t, 1).unwrap()).collect();
        gram_schmidt(&seeds, &Weight::reciprocal(f).unwrap(), &Region::unit_box(1), &s).unwrap()
    }

    fn check(f: &ScalarField, g: &ScalarField, seeds: &[&str], n: usize) -> CriterionReport {
        let s = IntegratorSettings::default();
        let phi = family(f, seeds);
        let psi = family(g, seeds);
        product_criterion_check(f, g, &phi, &psi, n, &Region::unit_box(1), &s, true).unwrap()
    }

    #[test]
    fn constants_are_equalities() {
        let one = ScalarField::constant(1.0, 1);
        let r = check(&one, &one, &["1"], 1);
        let e = r.entry(1, 1);
        assert_eq!(e.crit_a.verdict, Verdict::Equality);
        assert_eq!(e.crit_b.verdict, Verdict::Equality);
        assert_eq!(r.conclusion.verdict, Verdict::Equality);
        assert!(r.all_criteria_hold && r.conclusion_holds);
        assert!(r.diagnostics.unwrap().chain_holds);
    }

    #[test]
    fn comonotone_pair() {
        let f = parse_field("1 + x1", 1).unwrap().with_floor(1.0).unwrap();
        let r = check(&f, &f, &["1", "x1"], 2);
        assert!((r.conclusion.lhs.value - 7.0 / 3.0).abs() < 1e-9, "{:?}", r.conclusion);
        assert!((r.conclusion.rhs.value - 2.25).abs() < 1e-9);
        assert!(r.conclusion.margin > 0.08);
        assert_eq!(r.grid.len(), 4);
        assert!((r.measure.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opposite_pair_has_failing_flag() {
        let f = parse_field("1 + x1", 1).unwrap().with_floor(1.0).unwrap();
        let g = parse_field("2 - x1", 1).unwrap().with_floor(1.0).unwrap();
        let r = check(&f, &g, &["1", "x1"], 2);
        assert!((r.conclusion.lhs.value - 13.0 / 6.0).abs() < 1e-9);
        assert!(!r.conclusion_holds);
        assert!(!r.all_criteria_hold);
        assert!(r.contrapositive_ok());
    }

    #[test]
    fn csv_has_rows_and_columns() {
        let f = parse_field("1 + x1", 1).unwrap().with_floor(1.0).unwrap();
        let r = check(&f, &f, &["1", "x1"], 2);
        let csv = r.grid_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "n\\m,1,2");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 3);
    }

    #[test]
    fn diagnostic_identities() {
        let f = parse_field("1 + x1", 1).unwrap().with_floor(1.0).unwrap();
        let r = check(&f, &f, &["1", "x1"], 2);
        let d = r.diagnostics.unwrap();
        for name in [
            "deviation = expanded square",
            "surrogate = double sum",
            "criterion bound = double-sum Bessel bound",
        ] {
            let link = d.links.iter().find(|l| l.name == name).unwrap();
            assert!(link.ok, "{link:?}");
        }
    }

    #[test]
    fn truncation_is_checked() {
        let s = IntegratorSettings::default();
        let one = ScalarField::constant(1.0, 1);
        let phi = family(&one, &["1"]);
        let r = product_criterion_check(&one, &one, &phi, &phi, 2, &Region::unit_box(1), &s, false);
        assert!(r.is_err());
    }
}
