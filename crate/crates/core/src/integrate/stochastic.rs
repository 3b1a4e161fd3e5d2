use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{IntegralEstimate, IntegratorSettings, Method};
use crate::error::Result;
use crate::field::ScalarField;
use crate::reduce::pairwise;
use crate::region::Region;

const STRATA_PER_CHUNK: usize = 256;

/// Running sample statistics, merged with Chan's pairwise update.
#[derive(Debug, Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments {
        n: 0.0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        Moments {
            n,
            mean: a.mean + delta * b.n / n,
            m2: a.m2 + b.m2 + delta * delta * a.n * b.n / n,
        }
    }
}

/// Stratified uniform sampling of the bounding box, masked by membership.
pub(super) fn integrate(
    f: &ScalarField,
    region: &Region,
    s: &IntegratorSettings,
) -> Result<IntegralEstimate> {
    let bounds = region.bounds();
    let dim = bounds.dim();
    let volume = bounds.volume();
    let per_axis = ((s.sample_count as f64).powf(1.0 / dim as f64).floor() as usize).max(1);
    let strata = per_axis.pow(dim as u32);
    let per_stratum = (s.sample_count / strata).max(1);
    let chunks = strata.div_ceil(STRATA_PER_CHUNK);
    let lo = bounds.lo();
    let width: Vec<f64> = lo.iter().zip(bounds.hi()).map(|(a, b)| (b - a) / per_axis as f64).collect();

    let results: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            rng.set_stream(chunk as u64);
            let mut moments = Moments::EMPTY;
            let mut point = vec![0.0; dim];
            let first = chunk * STRATA_PER_CHUNK;
            for stratum in first..(first + STRATA_PER_CHUNK).min(strata) {
                let mut rest = stratum;
                let mut cell = vec![0usize; dim];
                for c in cell.iter_mut() {
                    *c = rest % per_axis;
                    rest /= per_axis;
                }
                for _ in 0..per_stratum {
                    for axis in 0..dim {
                        let u: f64 = rng.gen();
                        point[axis] = lo[axis] + (cell[axis] as f64 + u) * width[axis];
                    }
                    let sample = if region.contains(&point)? {
                        volume * f.eval(&point)?
                    } else {
                        0.0
                    };
                    moments.push(sample);
                }
            }
            Ok(moments)
        })
        .collect();
    let parts = results.into_iter().collect::<Result<Vec<_>>>()?;
    let total = pairwise(&parts, Moments::EMPTY, &Moments::merge);
    let sd = if total.n > 1.0 {
        (total.m2 / (total.n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(IntegralEstimate {
        value: total.mean,
        err: 3.0 * sd / total.n.sqrt(),
        evals: total.n as u64,
        method: Method::Stochastic,
        seed: Some(s.seed),
    })
}
