//! Wall-clock comparison of the naive and fast decomposition paths on random
//! ensembles. Both paths run on a dedicated single-thread pool.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decompose::{decompose, Algorithm, DecomposeOptions};
use crate::error::{Error, Result};
use crate::synth::{random_dataset, random_ensemble, RandomEnsembleSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub n: usize,
    pub d: usize,
    pub rounds: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    pub d: usize,
    pub rounds: usize,
    pub depth: usize,
    pub realized_subsets: usize,
    pub naive_secs: f64,
    pub fast_secs: f64,
    /// `naive_secs / fast_secs`.
    pub speedup: f64,
    /// `fast_secs / naive_secs`.
    pub fast_over_naive: f64,
    /// Largest component difference between the two paths.
    pub max_diff: f64,
}

pub fn run_bench(points: &[BenchPoint], seed: u64, opts: &DecomposeOptions) -> Result<Vec<BenchRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let point_seed = seed.wrapping_add(i as u64);
            let mut spec = RandomEnsembleSpec::new(p.d, p.rounds, p.depth, point_seed);
            spec.full = true;
            let model = random_ensemble(&spec)?;
            let data = random_dataset(p.n, p.d, point_seed);
            pool.install(|| {
                let t0 = Instant::now();
                let naive = decompose(&model, &data, Algorithm::Naive, opts)?;
                let naive_secs = t0.elapsed().as_secs_f64();
                let t1 = Instant::now();
                let fast = decompose(&model, &data, Algorithm::Fast, opts)?;
                let fast_secs = t1.elapsed().as_secs_f64();
                Ok(BenchRecord {
                    n: p.n,
                    d: p.d,
                    rounds: p.rounds,
                    depth: p.depth,
                    realized_subsets: fast.realized_count(),
                    naive_secs,
                    fast_secs,
                    speedup: naive_secs / fast_secs.max(1e-12),
                    fast_over_naive: fast_secs / naive_secs.max(1e-12),
                    max_diff: naive.max_abs_diff(&fast),
                })
            })
        })
        .collect()
}
