//! Families of fields that are mutually orthogonal under a positive weight,
//! built by Gram-Schmidt in the inner product `⟨u, v⟩ = ∫ u·v·w dμ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ScalarField, Weight};
use crate::integrate::{inner_product, IntegralEstimate, IntegratorSettings};
use crate::region::Region;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramSchmidtOptions {
    /// Largest accepted normalized off-diagonal inner product.
    pub orth_tol: f64,
    /// A member is dropped when its squared norm falls below this fraction
    /// of the largest seed's squared norm.
    pub drop_rel: f64,
}

impl Default for GramSchmidtOptions {
    fn default() -> Self {
        GramSchmidtOptions {
            orth_tol: 1e-6,
            drop_rel: 1e-10,
        }
    }
}

/// One member `φ_k = Σ_i a_i · seed_i`.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub field: ScalarField,
    /// Zero-based index of the seed this member was derived from.
    pub seed_index: usize,
    /// Coefficients over all seeds; zero for seeds not involved.
    pub seed_coefficients: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OrthogonalFamily {
    region: Region,
    weight: Weight,
    members: Vec<FamilyMember>,
    norms: Vec<IntegralEstimate>,
    residual: f64,
    dropped: Vec<usize>,
    tolerance: f64,
}

impl OrthogonalFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn member(&self, n: usize) -> &ScalarField {
        &self.members[n].field
    }

    pub fn fields(&self) -> Vec<ScalarField> {
        self.members.iter().map(|m| m.field.clone()).collect()
    }

    /// `∫ φ_n² w dμ` for each member.
    pub fn norms(&self) -> &[IntegralEstimate] {
        &self.norms
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Zero-based indices of seeds discarded as dependent.
    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Orthogonal projection of `g` onto the span of the family.
    pub fn project(&self, g: &ScalarField, s: &IntegratorSettings) -> Result<ScalarField> {
        let mut terms = Vec::with_capacity(self.len());
        for (m, norm) in self.members.iter().zip(&self.norms) {
            let ip = inner_product(g, &m.field, &self.weight, &self.region, s)?;
            terms.push((ip.value / norm.value, m.field.clone()));
        }
        Ok(ScalarField::linear_combination(g.dim(), terms))
    }
}

fn combine(seeds: &[ScalarField], own: usize, coeffs: &[f64]) -> ScalarField {
    let untouched = coeffs
        .iter()
        .enumerate()
        .all(|(i, &c)| if i == own { c == 1.0 } else { c == 0.0 });
    if untouched {
        return seeds[own].clone();
    }
    // own seed first, then the subtracted earlier directions
    let mut terms = vec![(coeffs[own], seeds[own].clone())];
    terms.extend(
        coeffs
            .iter()
            .enumerate()
            .filter(|&(i, &c)| i != own && c != 0.0)
            .map(|(i, &c)| (c, seeds[i].clone())),
    );
    ScalarField::linear_combination(seeds[own].dim(), terms)
}

pub fn gram_schmidt(
    seeds: &[ScalarField],
    weight: &Weight,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<OrthogonalFamily> {
    gram_schmidt_with(seeds, weight, region, s, GramSchmidtOptions::default())
}

/// Classical Gram-Schmidt with one full re-orthogonalization pass. The first
/// surviving seed is kept as is.
pub fn gram_schmidt_with(
    seeds: &[ScalarField],
    weight: &Weight,
    region: &Region,
    s: &IntegratorSettings,
    opts: GramSchmidtOptions,
) -> Result<OrthogonalFamily> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed is required".into()));
    }
    for seed in seeds {
        for dim in [weight.dim(), region.dim()] {
            if seed.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: seed.dim(),
                });
            }
        }
    }
    let mut max_norm = 0.0f64;
    for seed in seeds {
        max_norm = max_norm.max(inner_product(seed, seed, weight, region, s)?.value);
    }
    let threshold = opts.drop_rel * max_norm;

    let mut members: Vec<FamilyMember> = Vec::new();
    let mut norms: Vec<IntegralEstimate> = Vec::new();
    let mut dropped = Vec::new();
    for k in 0..seeds.len() {
        let mut coeffs = vec![0.0; seeds.len()];
        coeffs[k] = 1.0;
        let mut field = seeds[k].clone();
        for _pass in 0..2 {
            if members.is_empty() {
                break;
            }
            let mut projections = Vec::with_capacity(members.len());
            for (m, norm) in members.iter().zip(&norms) {
                let ip = inner_product(&field, &m.field, weight, region, s)?;
                projections.push(ip.value / norm.value);
            }
            for (m, r) in members.iter().zip(projections) {
                for (c, a) in coeffs.iter_mut().zip(&m.seed_coefficients) {
                    *c -= r * a;
                }
            }
            field = combine(seeds, k, &coeffs);
        }
        let norm = inner_product(&field, &field, weight, region, s)?;
        // negated so that a NaN norm is dropped too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        let degenerate = !(norm.value > threshold);
        if degenerate {
            dropped.push(k);
            continue;
        }
        members.push(FamilyMember {
            field,
            seed_index: k,
            seed_coefficients: coeffs,
        });
        norms.push(norm);
    }
    if members.is_empty() {
        return Err(Error::AllSeedsDropped(seeds.len()));
    }
    let fields: Vec<ScalarField> = members.iter().map(|m| m.field.clone()).collect();
    let residual = normalized_residual(&fields, &norms, weight, region, s)?;
    if residual > opts.orth_tol {
        return Err(Error::NotOrthogonal {
            residual,
            tol: opts.orth_tol,
        });
    }
    Ok(OrthogonalFamily {
        region: region.clone(),
        weight: weight.clone(),
        members,
        norms,
        residual,
        dropped,
        tolerance: opts.orth_tol,
    })
}

fn normalized_residual(
    fields: &[ScalarField],
    norms: &[IntegralEstimate],
    weight: &Weight,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let ip = inner_product(&fields[i], &fields[j], weight, region, s)?;
            let scale = (norms[i].value * norms[j].value).sqrt();
            worst = worst.max(ip.value.abs() / scale);
        }
    }
    Ok(worst)
}

/// Max over `i ≠ j` of `|⟨φ_i, φ_j⟩| / sqrt(⟨φ_i, φ_i⟩⟨φ_j, φ_j⟩)` for an
/// arbitrary list of fields; zero when there are no pairs.
pub fn pairwise_residual(
    fields: &[ScalarField],
    weight: &Weight,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<f64> {
    let mut norms = Vec::with_capacity(fields.len());
    for f in fields {
        norms.push(inner_product(f, f, weight, region, s)?);
    }
    normalized_residual(fields, &norms, weight, region, s)
}

/// Recompute the family's orthogonality residual under `s`.
pub fn orthogonality_residual(family: &OrthogonalFamily, s: &IntegratorSettings) -> Result<f64> {
    pairwise_residual(&family.fields(), &family.weight, &family.region, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_field;

    fn field(src: &str) -> ScalarField {
        parse_field(src, 1).unwrap()
    }

    #[test]
    fn constant_and_linear_seeds() {
        let s = IntegratorSettings::default();
        let seeds = [field("1"), field("x1")];
        let fam = gram_schmidt(&seeds, &Weight::unit(1), &Region::unit_box(1), &s).unwrap();
        assert_eq!(fam.len(), 2);
        assert!(fam.residual() <= 1e-8);
        let c = &fam.members()[1].seed_coefficients;
        assert!((c[0] + 0.5).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-15);
        for x in [0.0, 0.3, 1.0] {
            assert!((fam.member(1).eval(&[x]).unwrap() - (x - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn dependent_seed_is_dropped() {
        let s = IntegratorSettings::default();
        let seeds = [field("1"), field("1")];
        let fam = gram_schmidt(&seeds, &Weight::unit(1), &Region::unit_box(1), &s).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.dropped(), &[1]);
    }

    #[test]
    fn orthogonal_seeds_are_unchanged() {
        let s = IntegratorSettings::default();
        let pi = std::f64::consts::PI;
        let region = Region::boxed(vec![-pi], vec![pi]).unwrap();
        let seeds = [field("sin(x1)"), field("cos(x1)")];
        let fam = gram_schmidt(&seeds, &Weight::unit(1), &region, &s).unwrap();
        assert!(fam.residual() <= 1e-8);
        let coeffs = &fam.members()[1].seed_coefficients;
        assert!(coeffs[0].abs() < 1e-8);
        for x in [-2.0, 0.1, 1.5] {
            let v = fam.member(1).eval(&[x]).unwrap();
            assert!((v - f64::cos(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn residual_of_singleton_is_zero() {
        let s = IntegratorSettings::default();
        let fam = gram_schmidt(&[field("1")], &Weight::unit(1), &Region::unit_box(1), &s).unwrap();
        assert_eq!(orthogonality_residual(&fam, &s).unwrap(), 0.0);
    }

    #[test]
    fn residual_of_non_orthogonal_pair() {
        let s = IntegratorSettings::default();
        let r = pairwise_residual(
            &[field("1"), field("x1")],
            &Weight::unit(1),
            &Region::unit_box(1),
            &s,
        )
        .unwrap();
        // ⟨1,x⟩ = 1/2, norms 1 and 1/3
        assert!((r - 0.5 / (1.0f64 / 3.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn all_zero_seeds_fail() {
        let s = IntegratorSettings::default();
        let err = gram_schmidt(&[field("0")], &Weight::unit(1), &Region::unit_box(1), &s).unwrap_err();
        assert_eq!(err, Error::AllSeedsDropped(1));
        assert!(gram_schmidt(&[], &Weight::unit(1), &Region::unit_box(1), &s).is_err());
    }

    #[test]
    fn weighted_family_under_reciprocal() {
        let s = IntegratorSettings::default();
        let f = field("1 + x1").with_floor(1.0).unwrap();
        let w = Weight::reciprocal(&f).unwrap();
        let seeds = [field("1"), field("x1"), field("x1^2")];
        let fam = gram_schmidt(&seeds, &w, &Region::unit_box(1), &s).unwrap();
        assert_eq!(fam.len(), 3);
        let check = orthogonality_residual(&fam, &s.finer()).unwrap();
        assert!(check <= 1e-6, "{check}");
    }
}
