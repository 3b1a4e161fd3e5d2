//! Fourier coefficients with respect to a family orthogonal under `1/f`,
//! partial sums, the mean-square deviation and the Bessel/Parseval chain.
//!
//! For a positive `f` and a family `{φ_n}` orthogonal under `1/f`, the
//! coefficients are `c_n = ∫φ_n / ∫(φ_n²/f)` and
//!
//! ```text
//! ∫ (f - s_N)²/f  =  ∫f - Σ_{n≤N} (∫φ_n)² / ∫(φ_n²/f)
//! ```
//!
//! so the right-hand side (the Bessel gap) is nonnegative, and it vanishes
//! when `f` lies in the span of the family.

mod partitioned;

use serde::Serialize;

use crate::approx::{Approx, Comparison};
use crate::error::{Error, Result};
use crate::field::{ScalarField, Weight};
use crate::integrate::{inner_product, integrate, IntegralEstimate, IntegratorSettings};
use crate::ortho::OrthogonalFamily;
use crate::region::Region;

pub use partitioned::{partitioned_parseval, CellReport, CellSeeds, PartitionReport};

/// Relative threshold on the full-family deviation below which the
/// expansion of `f` is taken to exist.
pub const EXISTENCE_REL_TOL: f64 = 1e-6;

/// `c = ∫φ / ∫(φ²/f)` with its two integral estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub value: f64,
    pub err: f64,
    pub numerator: IntegralEstimate,
    pub denominator: IntegralEstimate,
}

impl Coefficient {
    pub fn approx(&self) -> Approx {
        Approx::new(self.value, self.err)
    }

    /// `(∫φ)² / ∫(φ²/f)`, equal to `c²·∫(φ²/f)`.
    pub fn parseval_term(&self) -> Approx {
        self.numerator.approx().square().div(self.denominator.approx())
    }
}

pub fn fourier_coefficient(
    phi: &ScalarField,
    f: &ScalarField,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<Coefficient> {
    let weight = Weight::reciprocal(f)?;
    let numerator = integrate(phi, region, s)?;
    let denominator = inner_product(phi, phi, &weight, region, s)?;
    coefficient_from(numerator, denominator)
}

fn coefficient_from(numerator: IntegralEstimate, denominator: IntegralEstimate) -> Result<Coefficient> {
    if denominator.value.abs() <= denominator.err {
        return Err(Error::ZeroDenominator {
            value: denominator.value,
            err: denominator.err,
        });
    }
    let c = numerator.approx().div(denominator.approx());
    Ok(Coefficient {
        value: c.value,
        err: c.err,
        numerator,
        denominator,
    })
}

/// The expansion of `f` in a family orthogonal under `1/f`.
#[derive(Debug, Clone)]
pub struct Expansion {
    f: ScalarField,
    family: OrthogonalFamily,
    coefficients: Vec<Coefficient>,
    integral: IntegralEstimate,
}

impl Expansion {
    pub fn new(f: &ScalarField, family: OrthogonalFamily, s: &IntegratorSettings) -> Result<Self> {
        if !family.weight().is_reciprocal_of(f) {
            return Err(Error::WeightMismatch(f.to_string()));
        }
        let region = family.region();
        let mut coefficients = Vec::with_capacity(family.len());
        for (member, norm) in family.members().iter().zip(family.norms()) {
            // the family already holds ∫φ²/f
            let numerator = integrate(&member.field, region, s)?;
            coefficients.push(coefficient_from(numerator, norm.clone())?);
        }
        let integral = integrate(f, region, s)?;
        Ok(Expansion {
            f: f.clone(),
            family,
            coefficients,
            integral,
        })
    }

    pub fn f(&self) -> &ScalarField {
        &self.f
    }

    pub fn family(&self) -> &OrthogonalFamily {
        &self.family
    }

    pub fn region(&self) -> &Region {
        self.family.region()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coefficients
    }

    pub fn coefficient_values(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.value).collect()
    }

    /// `∫ f dμ` over the family's region.
    pub fn integral(&self) -> &IntegralEstimate {
        &self.integral
    }

    fn check_truncation(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::Truncation { n, size: self.len() });
        }
        Ok(())
    }

    /// `s_N = Σ_{n≤N} c_n φ_n`.
    pub fn partial_sum(&self, n: usize) -> Result<ScalarField> {
        self.check_truncation(n)?;
        Ok(self.sum_with(&self.coefficient_values()[..n]))
    }

    /// `Σ a_n φ_n` for arbitrary coefficients `a`.
    pub fn sum_with(&self, coeffs: &[f64]) -> ScalarField {
        let terms = coeffs
            .iter()
            .zip(self.family.members())
            .map(|(&a, m)| (a, m.field.clone()))
            .collect();
        ScalarField::linear_combination(self.f.dim(), terms)
    }

    /// Bound on the cross terms `Σ_{i≠j} c_i c_j ∫φ_iφ_j/f` dropped by the
    /// orthogonality assumption, from the family's certified residual.
    pub fn cross_term_bound(&self, n: usize) -> f64 {
        let norms = self.family.norms();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let scale = (norms[i].value * norms[j].value).sqrt();
                    total +=
                        (self.coefficients[i].value * self.coefficients[j].value).abs() * scale;
                }
            }
        }
        total * self.family.residual()
    }
}

/// `∫ (f - s_N)²/f dμ`.
pub fn mean_square_deviation(x: &Expansion, n: usize, s: &IntegratorSettings) -> Result<IntegralEstimate> {
    x.check_truncation(n)?;
    deviation_with_coefficients(x, &x.coefficient_values()[..n], s)
}

/// `∫ (f - Σ a_n φ_n)²/f dμ` for arbitrary coefficients.
pub fn deviation_with_coefficients(
    x: &Expansion,
    coeffs: &[f64],
    s: &IntegratorSettings,
) -> Result<IntegralEstimate> {
    x.check_truncation(coeffs.len())?;
    let residual = x.f.sub(&x.sum_with(coeffs));
    let weight = x.family.weight();
    inner_product(&residual, &residual, weight, x.region(), s)
}

/// `∫f - Σ_{n≤N} (∫φ_n)² / ∫(φ_n²/f)`.
pub fn bessel_gap(x: &Expansion, n: usize) -> Result<Approx> {
    x.check_truncation(n)?;
    Ok(x.integral.approx().sub(parseval_sum(x, n)))
}

fn parseval_sum(x: &Expansion, n: usize) -> Approx {
    Approx::sum(x.coefficients[..n].iter().map(Coefficient::parseval_term))
}

/// Check that the deviation and the Bessel gap agree for truncation `n`.
pub fn deviation_identity(x: &Expansion, n: usize, s: &IntegratorSettings) -> Result<Comparison> {
    let deviation = mean_square_deviation(x, n, s)?.approx();
    let gap = bessel_gap(x, n)?;
    let slack = Approx::new(gap.value, gap.err + x.cross_term_bound(n));
    // the identity holds when the verdict is Equality
    Ok(Comparison::at_most(deviation, slack, s.abs_tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsevalReport {
    /// `Σ c_n² ∫(φ_n²/f) - ∫f` over the whole family.
    pub residual: Approx,
    pub parseval_sum: Approx,
    pub integral: Approx,
    /// Full-family mean-square deviation.
    pub deviation: Approx,
    pub existence_tol: f64,
    /// Deviation below `existence_tol`: the expansion of `f` is taken to exist.
    pub expansion_exists: bool,
    /// `|residual|` within its combined error (plus the orthogonality
    /// cross-term bound and `abs_tol`).
    pub residual_vanishes: bool,
}

pub fn parseval_residual(x: &Expansion, s: &IntegratorSettings) -> Result<ParsevalReport> {
    let n = x.len();
    let sum = parseval_sum(x, n);
    let integral = x.integral.approx();
    let residual = sum.sub(integral);
    let deviation = mean_square_deviation(x, n, s)?.approx();
    let existence_tol = EXISTENCE_REL_TOL * integral.value.abs();
    let slack = residual.err + x.cross_term_bound(n) + s.abs_tol;
    Ok(ParsevalReport {
        residual,
        parseval_sum: sum,
        integral,
        deviation,
        existence_tol,
        expansion_exists: deviation.value <= existence_tol,
        residual_vanishes: residual.value.abs() <= slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_field;
    use crate::approx::Verdict;
    use crate::ortho::gram_schmidt;

    fn f1(src: &str) -> ScalarField {
        parse_field(src, 1).unwrap()
    }

    fn expansion(f: &ScalarField, seeds: &[ScalarField]) -> Expansion {
        let s = IntegratorSettings::default();
        let w = Weight::reciprocal(f).unwrap();
        let fam = gram_schmidt(seeds, &w, &Region::unit_box(1), &s).unwrap();
        Expansion::new(f, fam, &s).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let s = IntegratorSettings::default();
        let unit = Region::unit_box(1);
        let f = f1("1 + x1").with_floor(1.0).unwrap();
        let c = fourier_coefficient(&f, &f, &unit, &s).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);

        let one = ScalarField::constant(1.0, 1);
        let c = fourier_coefficient(&one, &one, &unit, &s).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);

        let c = fourier_coefficient(&one, &f, &unit, &s).unwrap();
        assert!((c.value - 1.0 / 2f64.ln()).abs() < 1e-9, "{c:?}");
        assert!(c.err < 1e-6);
    }

    #[test]
    fn coefficient_needs_floor_and_nonzero_denominator() {
        let s = IntegratorSettings::default();
        let unit = Region::unit_box(1);
        let f = f1("1 + x1");
        assert!(matches!(
            fourier_coefficient(&f, &f, &unit, &s),
            Err(Error::MissingFloor(_))
        ));
        let f = f.with_floor(1.0).unwrap();
        let zero = f1("0");
        assert!(matches!(
            fourier_coefficient(&zero, &f, &unit, &s),
            Err(Error::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn deviation_and_gap_examples() {
        let s = IntegratorSettings::default();
        let f = f1("1 + x1").with_floor(1.0).unwrap();
        let x = expansion(&f, &[f1("1")]);
        let expected = 1.5 - 1.0 / 2f64.ln();
        let d0 = mean_square_deviation(&x, 0, &s).unwrap();
        assert!((d0.value - 1.5).abs() < 1e-9);
        let d1 = mean_square_deviation(&x, 1, &s).unwrap();
        assert!((d1.value - expected).abs() < 1e-9, "{d1:?}");
        let gap = bessel_gap(&x, 1).unwrap();
        assert!((gap.value - expected).abs() < 1e-9);
        assert_eq!(deviation_identity(&x, 1, &s).unwrap().verdict, Verdict::Equality);
        assert!(mean_square_deviation(&x, 2, &s).is_err());
    }

    #[test]
    fn function_in_its_own_family() {
        let s = IntegratorSettings::default();
        let f = f1("1 + x1").with_floor(1.0).unwrap();
        let x = expansion(&f, std::slice::from_ref(&f));
        let gap = bessel_gap(&x, 1).unwrap();
        assert!(gap.value.abs() <= gap.err + 1e-9);
        let dev = mean_square_deviation(&x, 1, &s).unwrap();
        assert!(dev.value.abs() < 1e-12);
        let p = parseval_residual(&x, &s).unwrap();
        assert!(p.expansion_exists && p.residual_vanishes);
    }

    #[test]
    fn parseval_examples() {
        let s = IntegratorSettings::default();
        let two = f1("2").with_floor(2.0).unwrap();
        let x = expansion(&two, &[f1("1")]);
        assert!((x.coefficients()[0].value - 2.0).abs() < 1e-12);
        let p = parseval_residual(&x, &s).unwrap();
        assert!(p.residual.value.abs() < 1e-12);
        assert!(p.expansion_exists && p.residual_vanishes);

        let f = f1("1 + x1").with_floor(1.0).unwrap();
        let x = expansion(&f, &[f1("1")]);
        let p = parseval_residual(&x, &s).unwrap();
        assert!((p.residual.value - (1.0 / 2f64.ln() - 1.5)).abs() < 1e-9);
        assert!(!p.expansion_exists);
        assert!(!p.residual_vanishes);
    }

    #[test]
    fn weight_must_match_function() {
        let s = IntegratorSettings::default();
        let f = f1("1 + x1").with_floor(1.0).unwrap();
        let g = f1("2 - x1").with_floor(1.0).unwrap();
        let fam = gram_schmidt(
            &[f1("1")],
            &Weight::reciprocal(&g).unwrap(),
            &Region::unit_box(1),
            &s,
        )
        .unwrap();
        assert!(matches!(Expansion::new(&f, fam, &s), Err(Error::WeightMismatch(_))));
    }
}
