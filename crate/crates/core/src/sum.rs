//! Reductions whose result does not depend on the rayon thread count.
//!
//! Values are split into fixed chunks; each chunk is summed sequentially with
//! Neumaier compensation and the chunk sums are combined in index order.

use rayon::prelude::*;

const CHUNK: usize = 4096;

#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn sum_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = len.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Neumaier::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    let mut acc = Neumaier::default();
    for p in partial {
        acc.add(p);
    }
    acc.value()
}

pub(crate) fn sum(values: &[f64]) -> f64 {
    sum_by(values.len(), |i| values[i])
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    sum(values) / values.len() as f64
}

/// Maximum of `f` over `0..len`; NaN-free inputs assumed.
pub(crate) fn max_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..len)
        .into_par_iter()
        .map(&f)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

pub(crate) fn min_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..len)
        .into_par_iter()
        .map(&f)
        .reduce(|| f64::INFINITY, f64::min)
}
