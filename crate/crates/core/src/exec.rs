//! Deterministic batch execution.
//!
//! Work is cut into fixed-size batches, each with its own ChaCha stream derived
//! from the run seed and the batch index, so results never depend on how many
//! workers pick the batches up.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_BATCH: usize = 512;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Evaluates `f` on `0..n` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            Exec::Parallel => par_map(n, f),
        }
    }

    /// Splits `count` samples into batches and maps each `(batch, len)` pair.
    pub fn map_batches<T, F>(self, count: usize, batch: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, usize) -> T + Sync + Send,
    {
        let batch = batch.max(1);
        let nb = count.div_ceil(batch);
        self.map(nb, |b| f(b, batch.min(count - b * batch)))
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// RNG for one batch of a seeded run.
pub fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Sets the size of the global worker pool. Only the first call has an effect.
pub fn configure_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn modes_agree() {
        let f = |b: usize, len: usize| {
            let mut rng = batch_rng(7, b);
            (0..len).map(|_| rng.random::<f64>()).sum::<f64>()
        };
        let a = Exec::Sequential.map_batches(1000, 64, f);
        let b = Exec::Parallel.map_batches(1000, 64, f);
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn streams_differ() {
        let x: u64 = batch_rng(1, 0).random();
        let y: u64 = batch_rng(1, 1).random();
        assert_ne!(x, y);
    }
}
