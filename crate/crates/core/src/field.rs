//! Scalar fields: bounded functions on R^n built from parsed expressions or by
//! pointwise composition.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{self, EvalError, Expr};
use crate::region::Region;

#[derive(Debug)]
enum Node {
    Expr(Expr),
    Const(f64),
    Neg(ScalarField),
    Abs(ScalarField),
    Product(ScalarField, ScalarField),
    Reciprocal(ScalarField),
    /// Σ coeff_i · field_i, summed left to right.
    Combination(Vec<(f64, ScalarField)>),
    /// The inner field on the region, zero elsewhere.
    Masked(Region, ScalarField),
}

/// A real-valued function of `dim` variables with optional declared bounds
/// and positivity floor.
///
/// Cloning is cheap; the evaluation tree is shared.
#[derive(Debug, Clone)]
pub struct ScalarField {
    dim: usize,
    node: Arc<Node>,
    bounds: Option<(f64, f64)>,
    floor: Option<f64>,
}

pub fn parse_field(source: &str, dim: usize) -> Result<ScalarField> {
    let expr = expr::parse_real(source, dim)?;
    Ok(ScalarField::from_expr(expr, dim))
}

impl ScalarField {
    fn new(dim: usize, node: Node) -> Self {
        ScalarField {
            dim,
            node: Arc::new(node),
            bounds: None,
            floor: None,
        }
    }

    pub fn from_expr(expr: Expr, dim: usize) -> Self {
        debug_assert!(expr.max_var().is_none_or(|i| i < dim));
        ScalarField::new(dim, Node::Expr(expr))
    }

    pub fn constant(value: f64, dim: usize) -> Self {
        let mut f = ScalarField::new(dim, Node::Const(value));
        f.bounds = Some((value, value));
        if value > 0.0 {
            f.floor = Some(value);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    pub fn floor(&self) -> Option<f64> {
        self.floor
    }

    /// Declare `lo <= f <= hi`. A positive `lo` also acts as a floor.
    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParameter(format!("bounds [{lo}, {hi}]")));
        }
        self.bounds = Some((lo, hi));
        if lo > 0.0 && self.floor.is_none_or(|f| f < lo) {
            self.floor = Some(lo);
        }
        Ok(self)
    }

    /// Declare `f >= floor > 0` on the regions where this field is used.
    pub fn with_floor(mut self, floor: f64) -> Result<Self> {
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "positivity floor must be finite and > 0, got {floor}"
            )));
        }
        self.floor = Some(floor);
        Ok(self)
    }

    /// Largest declared |f|, if bounds are known.
    pub fn sup_abs(&self) -> Option<f64> {
        self.bounds.map(|(lo, hi)| lo.abs().max(hi.abs()))
    }

    /// True when both handles point at the same definition.
    pub fn same_as(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.node, &other.node)
            || (self.dim == other.dim && self.to_string() == other.to_string())
    }

    pub fn eval(&self, p: &[f64]) -> std::result::Result<f64, EvalError> {
        let v = match &*self.node {
            Node::Expr(e) => e.eval_real(p)?,
            Node::Const(c) => *c,
            Node::Neg(a) => -a.eval(p)?,
            Node::Abs(a) => a.eval(p)?.abs(),
            Node::Product(a, b) => {
                let x = a.eval(p)?;
                let v = x * b.eval(p)?;
                if !v.is_finite() {
                    return Err(EvalError::NonFinite { op: "*" });
                }
                v
            }
            Node::Reciprocal(a) => {
                let x = a.eval(p)?;
                let floor = a.floor.unwrap_or(f64::MIN_POSITIVE);
                if x < floor {
                    return Err(EvalError::FloorViolated { value: x, floor });
                }
                1.0 / x
            }
            Node::Combination(terms) => {
                let mut acc = 0.0;
                for (c, g) in terms {
                    acc += c * g.eval(p)?;
                }
                if !acc.is_finite() {
                    return Err(EvalError::NonFinite { op: "+" });
                }
                acc
            }
            Node::Masked(region, g) => {
                if region.contains(p)? {
                    g.eval(p)?
                } else {
                    0.0
                }
            }
        };
        Ok(v)
    }

    pub fn neg(&self) -> ScalarField {
        let mut out = ScalarField::new(self.dim, Node::Neg(self.clone()));
        out.bounds = self.bounds.map(|(lo, hi)| (-hi, -lo));
        out.floor = self.bounds.and_then(|(_, hi)| (hi < 0.0).then_some(-hi));
        out
    }

    pub fn abs(&self) -> ScalarField {
        let mut out = ScalarField::new(self.dim, Node::Abs(self.clone()));
        out.bounds = self.sup_abs().map(|s| (0.0, s));
        out.floor = self.floor;
        out
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        assert_eq!(self.dim, other.dim, "field dimensions differ");
        let mut out = ScalarField::new(self.dim, Node::Product(self.clone(), other.clone()));
        if let (Some((a, b)), Some((c, d))) = (self.bounds, other.bounds) {
            let corners = [a * c, a * d, b * c, b * d];
            out.bounds = Some((
                corners.iter().copied().fold(f64::INFINITY, f64::min),
                corners.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ));
        }
        if let (Some(a), Some(b)) = (self.floor, other.floor) {
            out.floor = Some(a * b);
        }
        out
    }

    pub fn scale(&self, factor: f64) -> ScalarField {
        ScalarField::linear_combination(self.dim, vec![(factor, self.clone())])
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        ScalarField::linear_combination(self.dim, vec![(1.0, self.clone()), (1.0, other.clone())])
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        ScalarField::linear_combination(self.dim, vec![(1.0, self.clone()), (-1.0, other.clone())])
    }

    pub fn square(&self) -> ScalarField {
        self.mul(self)
    }

    /// `1/f`. Refused unless `f` declares a positivity floor; evaluation
    /// checks the floor at every point.
    pub fn reciprocal(&self) -> Result<ScalarField> {
        let floor = self.floor.ok_or_else(|| Error::MissingFloor(self.to_string()))?;
        let mut out = ScalarField::new(self.dim, Node::Reciprocal(self.clone()));
        out.bounds = self
            .bounds
            .map(|(_, hi)| (1.0 / hi.max(floor), 1.0 / floor))
            .or(Some((0.0, 1.0 / floor)));
        if let Some((_, hi)) = self.bounds {
            out.floor = Some(1.0 / hi.max(floor));
        }
        Ok(out)
    }

    pub fn linear_combination(dim: usize, terms: Vec<(f64, ScalarField)>) -> ScalarField {
        for (_, g) in &terms {
            assert_eq!(g.dim, dim, "field dimensions differ");
        }
        let bounds = terms.iter().try_fold((0.0, 0.0), |(lo, hi), (c, g)| {
            g.bounds.map(|(a, b)| {
                let (x, y) = (c * a, c * b);
                (lo + x.min(y), hi + x.max(y))
            })
        });
        let mut out = ScalarField::new(dim, Node::Combination(terms));
        out.bounds = bounds;
        out
    }

    /// Restrict to `region`: equal to `self` inside, zero outside.
    pub fn masked(&self, region: &Region) -> Result<ScalarField> {
        if region.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: region.dim(),
            });
        }
        let mut out = ScalarField::new(self.dim, Node::Masked(region.clone(), self.clone()));
        out.bounds = self.bounds.map(|(lo, hi)| (lo.min(0.0), hi.max(0.0)));
        Ok(out)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Expr(e) => write!(f, "{e}"),
            Node::Const(c) => write!(f, "{}", Expr::Num(*c)),
            Node::Neg(a) => write!(f, "-({a})"),
            Node::Abs(a) => write!(f, "abs({a})"),
            Node::Product(a, b) => write!(f, "({a})*({b})"),
            Node::Reciprocal(a) => write!(f, "1/({a})"),
            Node::Combination(terms) => {
                if terms.is_empty() {
                    return f.write_str("0.0");
                }
                for (i, (c, g)) in terms.iter().enumerate() {
                    let (sign, mag) = if *c < 0.0 { ("-", -c) } else { ("+", *c) };
                    match (i, sign) {
                        (0, "-") => f.write_str("-")?,
                        (0, _) => {}
                        _ => write!(f, " {sign} ")?,
                    }
                    if mag == 1.0 {
                        write!(f, "({g})")?;
                    } else {
                        write!(f, "{mag:?}*({g})")?;
                    }
                }
                Ok(())
            }
            Node::Masked(r, g) => write!(f, "mask[{r}]({g})"),
        }
    }
}

/// A positive weight for inner products. Reciprocal weights `1/f` can only
/// be built from a field that declares a positivity floor.
#[derive(Debug, Clone)]
pub struct Weight {
    field: ScalarField,
    base: Option<ScalarField>,
}

impl Weight {
    pub fn unit(dim: usize) -> Self {
        Weight {
            field: ScalarField::constant(1.0, dim),
            base: None,
        }
    }

    /// The weight `1/f`.
    pub fn reciprocal(f: &ScalarField) -> Result<Self> {
        Ok(Weight {
            field: f.reciprocal()?,
            base: Some(f.clone()),
        })
    }

    /// Use `w` directly as a weight; it must declare a positivity floor.
    pub fn positive(w: &ScalarField) -> Result<Self> {
        if w.floor().is_none() {
            return Err(Error::MissingFloor(w.to_string()));
        }
        Ok(Weight {
            field: w.clone(),
            base: None,
        })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    /// The field `f` when this weight is `1/f`.
    pub fn base(&self) -> Option<&ScalarField> {
        self.base.as_ref()
    }

    pub fn is_reciprocal_of(&self, f: &ScalarField) -> bool {
        self.base.as_ref().is_some_and(|b| b.same_as(f))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.field.fmt(f)
    }
}
