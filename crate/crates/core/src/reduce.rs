//! Fixed-shape pairwise reductions. The tree shape depends only on the input
//! length, so results do not depend on how the inputs were scheduled.

pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise(values, 0.0, &|a, b| a + b)
}

/// Pairwise fold with an arbitrary associative combiner.
pub fn pairwise<T: Clone>(values: &[T], empty: T, combine: &impl Fn(T, T) -> T) -> T {
    match values.len() {
        0 => empty,
        1 => values[0].clone(),
        n => {
            let (a, b) = values.split_at(n / 2);
            combine(pairwise(a, empty.clone(), combine), pairwise(b, empty, combine))
        }
    }
}
