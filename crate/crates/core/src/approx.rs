//! Values with absolute error bounds and tolerance-aware comparisons.

use serde::Serialize;

/// A value with an absolute error bound, propagated to first order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approx {
    pub value: f64,
    pub err: f64,
}

// Arithmetic here propagates error bounds; explicit method calls keep that
// visible at the call site.
#[allow(clippy::should_implement_trait)]
impl Approx {
    pub fn new(value: f64, err: f64) -> Self {
        Approx {
            value,
            err: err.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Approx { value, err: 0.0 }
    }

    pub fn add(self, o: Approx) -> Approx {
        Approx::new(self.value + o.value, self.err + o.err)
    }

    pub fn sub(self, o: Approx) -> Approx {
        Approx::new(self.value - o.value, self.err + o.err)
    }

    pub fn neg(self) -> Approx {
        Approx::new(-self.value, self.err)
    }

    pub fn scale(self, k: f64) -> Approx {
        Approx::new(k * self.value, k.abs() * self.err)
    }

    pub fn mul(self, o: Approx) -> Approx {
        Approx::new(
            self.value * o.value,
            self.value.abs() * o.err + o.value.abs() * self.err + self.err * o.err,
        )
    }

    /// `|Δ(a/b)| ≤ (|Δa| + |a/b|·|Δb|) / |b|`.
    pub fn div(self, o: Approx) -> Approx {
        let q = self.value / o.value;
        Approx::new(q, (self.err + q.abs() * o.err) / o.value.abs())
    }

    pub fn square(self) -> Approx {
        self.mul(self)
    }

    pub fn sqrt(self) -> Approx {
        let r = self.value.max(0.0).sqrt();
        let err = if r > 0.0 {
            self.err / (2.0 * r)
        } else {
            self.err.sqrt()
        };
        Approx::new(r, err)
    }

    pub fn sum(items: impl IntoIterator<Item = Approx>) -> Approx {
        let items: Vec<Approx> = items.into_iter().collect();
        let values: Vec<f64> = items.iter().map(|a| a.value).collect();
        let errs: Vec<f64> = items.iter().map(|a| a.err).collect();
        Approx::new(
            crate::reduce::pairwise_sum(&values),
            crate::reduce::pairwise_sum(&errs),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Holds with a margin larger than the combined error.
    Holds,
    /// Both sides agree within the combined error.
    Equality,
    /// Violated by more than the combined error.
    Fails,
}

impl Verdict {
    pub fn describe(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Equality => "equality within tolerance",
            Verdict::Fails => "fails",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// The numerical check `lhs <= rhs` or `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub lhs: Approx,
    pub relation: Relation,
    pub rhs: Approx,
    /// Signed distance in the claimed direction: `rhs - lhs` for `<=`,
    /// `lhs - rhs` for `>=`.
    pub margin: f64,
    /// `err_lhs + err_rhs + abs_tol`.
    pub slack: f64,
    pub verdict: Verdict,
}

impl Comparison {
    fn new(lhs: Approx, relation: Relation, rhs: Approx, abs_tol: f64) -> Self {
        let margin = match relation {
            Relation::AtMost => rhs.value - lhs.value,
            Relation::AtLeast => lhs.value - rhs.value,
        };
        let slack = lhs.err + rhs.err + abs_tol;
        let verdict = if margin > slack {
            Verdict::Holds
        } else if margin >= -slack {
            Verdict::Equality
        } else {
            Verdict::Fails
        };
        Comparison {
            lhs,
            relation,
            rhs,
            margin,
            slack,
            verdict,
        }
    }

    pub fn at_most(lhs: Approx, rhs: Approx, abs_tol: f64) -> Self {
        Comparison::new(lhs, Relation::AtMost, rhs, abs_tol)
    }

    pub fn at_least(lhs: Approx, rhs: Approx, abs_tol: f64) -> Self {
        Comparison::new(lhs, Relation::AtLeast, rhs, abs_tol)
    }

    /// True unless the inequality is violated beyond the combined error.
    pub fn holds(&self) -> bool {
        self.verdict != Verdict::Fails
    }

    /// True when the inequality holds with margin exceeding the error.
    pub fn strictly_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_way_verdicts() {
        let tol = 1e-9;
        assert_eq!(
            Comparison::at_most(Approx::new(1.0, 0.01), Approx::new(2.0, 0.01), tol).verdict,
            Verdict::Holds
        );
        assert_eq!(
            Comparison::at_most(Approx::new(1.0, 0.01), Approx::new(1.005, 0.0), tol).verdict,
            Verdict::Equality
        );
        assert_eq!(
            Comparison::at_most(Approx::new(1.0, 0.01), Approx::new(0.995, 0.0), tol).verdict,
            Verdict::Equality
        );
        let c = Comparison::at_most(Approx::new(1.0, 0.01), Approx::new(0.9, 0.01), tol);
        assert_eq!(c.verdict, Verdict::Fails);
        assert!(!c.holds());
        let ge = Comparison::at_least(Approx::exact(3.0), Approx::exact(2.0), tol);
        assert!(ge.strictly_holds());
    }

    #[test]
    fn ratio_error_propagation() {
        let q = Approx::new(2.0, 0.1).div(Approx::new(4.0, 0.2));
        assert_eq!(q.value, 0.5);
        assert!((q.err - (0.1 + 0.5 * 0.2) / 4.0).abs() < 1e-15);
    }
}
