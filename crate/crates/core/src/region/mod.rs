//! Bounded regions of R^n given by a bounding box and a membership test.
//!
//! Regions are built from boxes, balls and predicates combined with union,
//! intersection and difference. Membership is pure and always false outside
//! the bounding box.

mod partition;
mod spec;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{EvalError, Predicate};

pub use partition::{default_zeta, sign_partition, Sign, SignPartition, SignedCell, UnresolvedCell};
pub use spec::RegionSpec;

/// Axis-aligned box `[lo, hi]` with `lo_i < hi_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::InvalidParameter("box needs at least one axis".into()));
        }
        for (axis, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::EmptyBox { axis, lo: a, hi: b });
            }
        }
        Ok(BoundingBox { lo, hi })
    }

    pub fn unit(dim: usize) -> Self {
        BoundingBox {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn centroid(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() >= self.dim()
            && self
                .lo
                .iter()
                .zip(&self.hi)
                .zip(p)
                .all(|((a, b), x)| a <= x && x <= b)
    }

    fn hull(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("box(")?;
        for (i, (a, b)) in self.lo.iter().zip(&self.hi).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{a:?}, {b:?}]")?;
        }
        f.write_str(")")
    }
}

/// A dyadic cell: half-open on each upper face unless that face lies on the
/// parent box boundary, so sibling cells never share points.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct HalfOpenBox {
    pub bounds: BoundingBox,
    pub closed_hi: Vec<bool>,
}

impl HalfOpenBox {
    fn contains(&self, p: &[f64]) -> bool {
        let b = &self.bounds;
        (0..b.dim()).all(|i| {
            let x = p[i];
            b.lo[i] <= x && (x < b.hi[i] || (self.closed_hi[i] && x == b.hi[i]))
        })
    }
}

#[derive(Debug)]
enum Node {
    Box,
    Ball { center: Vec<f64>, radius: f64 },
    Predicate { within: Region, predicate: Predicate },
    Union(Region, Region),
    Intersection(Region, Region),
    Difference(Region, Region),
    Cell(HalfOpenBox),
}

/// A bounded region with a pure membership test.
#[derive(Debug, Clone)]
pub struct Region {
    bounds: BoundingBox,
    node: Arc<Node>,
}

impl Region {
    fn with_node(bounds: BoundingBox, node: Node) -> Self {
        Region {
            bounds,
            node: Arc::new(node),
        }
    }

    /// Build a region from its construction tree.
    pub fn construct(spec: &RegionSpec) -> Result<Region> {
        spec.build()
    }

    pub fn from_box(bounds: BoundingBox) -> Region {
        Region::with_node(bounds, Node::Box)
    }

    pub fn unit_box(dim: usize) -> Region {
        Region::from_box(BoundingBox::unit(dim))
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Region> {
        Ok(Region::from_box(BoundingBox::new(lo, hi)?))
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Region> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be > 0, got {radius}"
            )));
        }
        let lo = center.iter().map(|c| c - radius).collect();
        let hi = center.iter().map(|c| c + radius).collect();
        let bounds = BoundingBox::new(lo, hi)?;
        Ok(Region::with_node(bounds, Node::Ball { center, radius }))
    }

    /// Points of `within` satisfying `predicate`.
    pub fn predicate(within: &Region, predicate: Predicate) -> Result<Region> {
        check_dims(within.dim(), predicate.dim())?;
        Ok(Region::with_node(
            within.bounds.clone(),
            Node::Predicate {
                within: within.clone(),
                predicate,
            },
        ))
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        check_dims(self.dim(), other.dim())?;
        Ok(Region::with_node(
            self.bounds.hull(&other.bounds),
            Node::Union(self.clone(), other.clone()),
        ))
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        check_dims(self.dim(), other.dim())?;
        Ok(Region::with_node(
            self.bounds.clone(),
            Node::Intersection(self.clone(), other.clone()),
        ))
    }

    pub fn difference(&self, other: &Region) -> Result<Region> {
        check_dims(self.dim(), other.dim())?;
        Ok(Region::with_node(
            self.bounds.clone(),
            Node::Difference(self.clone(), other.clone()),
        ))
    }

    /// `cell ∩ self` for a dyadic cell of this region's bounding box.
    pub(crate) fn restrict_to_cell(&self, cell: HalfOpenBox) -> Region {
        let cell = Region::with_node(cell.bounds.clone(), Node::Cell(cell));
        Region::with_node(
            cell.bounds.clone(),
            Node::Intersection(cell, self.clone()),
        )
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &BoundingBox {
        &self.bounds
    }

    /// Membership test. Fails only when a predicate cannot be evaluated.
    pub fn contains(&self, p: &[f64]) -> std::result::Result<bool, EvalError> {
        if p.len() < self.dim() {
            return Err(EvalError::PointDimension {
                expected: self.dim(),
                found: p.len(),
            });
        }
        if !self.bounds.contains(p) {
            return Ok(false);
        }
        Ok(match &*self.node {
            Node::Box => true,
            Node::Ball { center, radius } => {
                let d2: f64 = center.iter().zip(p).map(|(c, x)| (x - c) * (x - c)).sum();
                d2 <= radius * radius
            }
            Node::Predicate { within, predicate } => {
                within.contains(p)? && predicate.eval(p)?
            }
            Node::Union(a, b) => a.contains(p)? || b.contains(p)?,
            Node::Intersection(a, b) => a.contains(p)? && b.contains(p)?,
            Node::Difference(a, b) => a.contains(p)? && !b.contains(p)?,
            Node::Cell(cell) => cell.contains(p),
        })
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Box => self.bounds.fmt(f),
            Node::Ball { center, radius } => {
                f.write_str("ball([")?;
                for (i, c) in center.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c:?}")?;
                }
                write!(f, "], {radius:?})")
            }
            Node::Predicate { within, predicate } => write!(f, "pred({within}, {predicate})"),
            Node::Union(a, b) => write!(f, "union({a}, {b})"),
            Node::Intersection(a, b) => write!(f, "intersect({a}, {b})"),
            Node::Difference(a, b) => write!(f, "diff({a}, {b})"),
            Node::Cell(c) => write!(f, "cell{}", &c.bounds.to_string()[3..]),
        }
    }
}
