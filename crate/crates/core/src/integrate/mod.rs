//! Numerical integration over regions, with error estimates.
//!
//! Two methods are available. `Refine` subdivides the region's bounding box
//! dyadically, applies a 5-point product Gauss rule on cells that lie inside
//! the region and charges boundary cells their full `|f|·volume` as error.
//! `Stochastic` samples the bounding box on a stratified grid and reports a
//! 3σ error bar.

mod gauss;
mod refine;
mod stochastic;

use serde::Serialize;

use crate::approx::Approx;
use crate::error::{Error, Result};
use crate::field::{ScalarField, Weight};
use crate::region::Region;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Refine,
    Stochastic,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "refine" => Ok(Method::Refine),
            "stochastic" => Ok(Method::Stochastic),
            other => Err(Error::InvalidParameter(format!(
                "unknown method `{other}` (expected refine or stochastic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorSettings {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Subdivision depth; `None` picks a default from the dimension.
    pub max_depth: Option<u32>,
    pub sample_count: usize,
    pub seed: u64,
    /// Fail instead of returning an estimate whose error misses the target.
    pub strict: bool,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            method: Method::Refine,
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_depth: None,
            sample_count: 100_000,
            seed: 0,
            strict: false,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.max_depth == Some(0) {
            return Err(Error::InvalidParameter("max_depth must be >= 1".into()));
        }
        if self.method == Method::Stochastic && self.sample_count < 2 {
            return Err(Error::InvalidParameter("sample_count must be >= 2".into()));
        }
        Ok(())
    }

    pub fn max_depth_for(&self, dim: usize) -> u32 {
        self.max_depth.unwrap_or(match dim {
            1 => 14,
            2 => 9,
            _ => 6,
        })
    }

    /// A tighter, deeper setting used to cross-check results computed with
    /// `self`.
    pub fn finer(&self) -> Self {
        IntegratorSettings {
            rel_tol: self.rel_tol * 1e-2,
            abs_tol: self.abs_tol * 1e-2,
            max_depth: self.max_depth.map(|d| d + 1),
            sample_count: self.sample_count * 4,
            seed: self.seed.wrapping_add(1),
            ..self.clone()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// An integral value with its absolute error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub err: f64,
    pub evals: u64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl IntegralEstimate {
    pub fn approx(&self) -> Approx {
        Approx::new(self.value, self.err)
    }
}

/// Integrate `f` over `region`.
pub fn integrate(f: &ScalarField, region: &Region, s: &IntegratorSettings) -> Result<IntegralEstimate> {
    s.validate()?;
    if f.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            found: f.dim(),
        });
    }
    let estimate = match s.method {
        Method::Refine => refine::integrate(f, region, s)?,
        Method::Stochastic => stochastic::integrate(f, region, s)?,
    };
    let target = s.target(estimate.value);
    if s.strict && estimate.err > target {
        return Err(Error::ToleranceNotMet {
            err: estimate.err,
            target,
        });
    }
    Ok(estimate)
}

/// `∫ u·v·w dμ` over `region`.
pub fn inner_product(
    u: &ScalarField,
    v: &ScalarField,
    w: &Weight,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<IntegralEstimate> {
    for dim in [v.dim(), w.dim()] {
        if dim != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: dim,
            });
        }
    }
    integrate(&u.mul(v).mul(w.field()), region, s)
}
