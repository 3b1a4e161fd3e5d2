//! Dyadic subdivision cells and their probe points, shared by the refine
//! integrator and the sign partitioner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::region::{BoundingBox, HalfOpenBox};

/// Corner probes sit this fraction of the cell width inside each corner.
const PROBE_INSET: f64 = 1.0 / 64.0;
const EDGE_INSET: f64 = 1.0 / (1u64 << 30) as f64;
pub(crate) const RANDOM_PROBES: usize = 4;

#[derive(Debug, Clone)]
pub(crate) struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub depth: u32,
    index: Vec<u64>,
    closed_hi: Vec<bool>,
}

impl Cell {
    pub fn root(bounds: &BoundingBox) -> Cell {
        let dim = bounds.dim();
        Cell {
            lo: bounds.lo().to_vec(),
            hi: bounds.hi().to_vec(),
            depth: 0,
            index: vec![0; dim],
            closed_hi: vec![true; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn centroid(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// The 2^dim children, child `k` taking the upper half on axis `i` when
    /// bit `i` of `k` is set.
    pub fn children(&self) -> Vec<Cell> {
        let dim = self.dim();
        (0..1usize << dim)
            .map(|k| {
                let mut child = Cell {
                    lo: self.lo.clone(),
                    hi: self.hi.clone(),
                    depth: self.depth + 1,
                    index: self.index.iter().map(|i| i * 2).collect(),
                    closed_hi: vec![false; dim],
                };
                for axis in 0..dim {
                    let mid = 0.5 * (self.lo[axis] + self.hi[axis]);
                    if k >> axis & 1 == 1 {
                        child.lo[axis] = mid;
                        child.index[axis] += 1;
                        child.closed_hi[axis] = self.closed_hi[axis];
                    } else {
                        child.hi[axis] = mid;
                    }
                }
                child
            })
            .collect()
    }

    fn key(&self) -> u64 {
        self.index.iter().fold(u64::from(self.depth), |acc, &i| {
            acc.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i)
        })
    }

    /// Inset corners, the centroid, then seeded random points.
    pub fn probes(&self, seed: u64) -> Vec<Vec<f64>> {
        let dim = self.dim();
        let mut out = Vec::with_capacity((1 << dim) + 1 + RANDOM_PROBES);
        for k in 0..1usize << dim {
            out.push(
                (0..dim)
                    .map(|axis| {
                        let t = if k >> axis & 1 == 1 { 1.0 - PROBE_INSET } else { PROBE_INSET };
                        self.lo[axis] + t * (self.hi[axis] - self.lo[axis])
                    })
                    .collect(),
            );
        }
        out.push(self.centroid());
        self.random_points(seed, &mut out);
        out
    }

    /// Corners and face centres pulled in by a hair, the centroid, then
    /// seeded random points. Used to classify cells against a region
    /// boundary: a boundary crossing the cell cannot slip between them unless
    /// it cuts off less than `EDGE_INSET` of the width, and half-open cells
    /// still see every probe as inside.
    pub fn membership_probes(&self, seed: u64) -> Vec<Vec<f64>> {
        let dim = self.dim();
        let at = |axis: usize, t: f64| self.lo[axis] + t * (self.hi[axis] - self.lo[axis]);
        let ends = [EDGE_INSET, 1.0 - EDGE_INSET];
        let mut out = Vec::with_capacity((1 << dim) + 2 * dim + 1 + RANDOM_PROBES);
        for k in 0..1usize << dim {
            out.push((0..dim).map(|axis| at(axis, ends[k >> axis & 1])).collect());
        }
        let centroid = self.centroid();
        for axis in 0..dim {
            for t in ends {
                let mut p = centroid.clone();
                p[axis] = at(axis, t);
                out.push(p);
            }
        }
        out.push(centroid);
        self.random_points(seed, &mut out);
        out
    }

    fn random_points(&self, seed: u64, out: &mut Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(self.key());
        for _ in 0..RANDOM_PROBES {
            out.push(
                (0..self.dim())
                    .map(|axis| rng.gen_range(self.lo[axis]..self.hi[axis]))
                    .collect(),
            );
        }
    }

    pub fn half_open(&self) -> HalfOpenBox {
        HalfOpenBox {
            bounds: BoundingBox::new(self.lo.clone(), self.hi.clone())
                .expect("dyadic cells are non-degenerate"),
            closed_hi: self.closed_hi.clone(),
        }
    }
}
