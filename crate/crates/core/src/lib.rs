//! Weighted orthogonal expansions over bounded regions of R^n.
//!
//! The crate builds scalar fields and regions from a small expression
//! language, integrates them numerically with error estimates, constructs
//! families orthogonal under the weight `1/f`, and checks the resulting
//! Fourier-coefficient identities (Bessel, Parseval, sign-partitioned
//! integration) and integral inequalities (Cauchy-Schwarz, a sufficient
//! criterion for `∫fg ≥ ∫f·∫g`) as tolerance-aware numerical comparisons.
//!
//! ```
//! use measure_fourier::{integrate, parse_field, IntegratorSettings, Region};
//!
//! let f = parse_field("x1^2 + 1", 1).unwrap();
//! let est = integrate(&f, &Region::unit_box(1), &IntegratorSettings::default()).unwrap();
//! assert!((est.value - 4.0 / 3.0).abs() < 1e-12);
//! ```

pub mod approx;
mod dyadic;
pub mod error;
pub mod expansion;
pub mod expr;
pub mod field;
pub mod inequalities;
pub mod integrate;
pub mod ortho;
pub mod reduce;
pub mod region;

pub use approx::{Approx, Comparison, Relation, Verdict};
pub use error::{Error, Result};
pub use expansion::{
    bessel_gap, fourier_coefficient, mean_square_deviation, parseval_residual,
    partitioned_parseval, CellReport, CellSeeds, Coefficient, Expansion, ParsevalReport,
    PartitionReport,
};
pub use expr::{parse_predicate, EvalError, Expr, ParseError, Predicate};
pub use field::{parse_field, ScalarField, Weight};
pub use inequalities::{
    cauchy_schwarz_gap, corollary_check, product_criterion_check, CauchySchwarzReport,
    CorollaryReport, CriterionReport,
};
pub use integrate::{inner_product, integrate, IntegralEstimate, IntegratorSettings, Method};
pub use ortho::{gram_schmidt, orthogonality_residual, GramSchmidtOptions, OrthogonalFamily};
pub use region::{sign_partition, Region, RegionSpec, Sign, SignPartition};
