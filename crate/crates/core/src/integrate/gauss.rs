//! 5-point Gauss-Legendre product rule; exact for polynomials of degree 9
//! in each variable.

use crate::error::Result;
use crate::field::ScalarField;
use crate::region::Region;

const NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];

const WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

pub(crate) const POINTS_PER_AXIS: usize = NODES.len();

/// Apply the product rule to `f·1_region` on `[lo, hi]`, visiting nodes in
/// lexicographic order. Returns the estimate and the number of evaluations.
pub(crate) fn product_rule(
    f: &ScalarField,
    region: Option<&Region>,
    lo: &[f64],
    hi: &[f64],
) -> Result<(f64, u64)> {
    let dim = lo.len();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let jacobian: f64 = half.iter().product();
    let mut idx = vec![0usize; dim];
    let mut point = mid.clone();
    let mut sum = 0.0;
    let mut evals = 0u64;
    loop {
        let mut weight = 1.0;
        for axis in 0..dim {
            point[axis] = mid[axis] + half[axis] * NODES[idx[axis]];
            weight *= WEIGHTS[idx[axis]];
        }
        let inside = match region {
            Some(r) => r.contains(&point)?,
            None => true,
        };
        if inside {
            sum += weight * f.eval(&point)?;
            evals += 1;
        }
        // odometer increment, last axis fastest
        let mut axis = dim;
        loop {
            if axis == 0 {
                return Ok((sum * jacobian, evals));
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < POINTS_PER_AXIS {
                break;
            }
            idx[axis] = 0;
        }
    }
}
