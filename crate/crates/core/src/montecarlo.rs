//! Replicate driver and small Monte Carlo accumulators.
//!
//! Replicates are computed in fixed-size chunks, possibly in parallel, and
//! folded strictly in replicate order, so results do not depend on the number
//! of workers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding the default worker count.
pub const JOBS_ENV: &str = "TAILIND_JOBS";

/// Worker count from `TAILIND_JOBS`, else the available cores.
pub fn default_jobs() -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&j| j > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(feature = "parallel")]
const CHUNK: u64 = 1024;

/// Runs `work(replicate, scratch)` for every replicate in `0..reps` and feeds
/// the results to `fold` in replicate order. Each worker owns one `W`.
pub fn for_each_replicate<T, W, F, G>(reps: u64, jobs: usize, work: F, mut fold: G) -> Result<()>
where
    T: Send,
    W: Default,
    F: Fn(u64, &mut W) -> T + Sync + Send,
    G: FnMut(u64, T),
{
    if jobs == 0 {
        return Err(Error::arg("jobs must be at least 1"));
    }
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::arg(format!("thread pool: {e}")))?;
        let chunk = CHUNK * jobs as u64;
        let mut start = 0;
        while start < reps {
            let end = (start + chunk).min(reps);
            let out: Vec<T> = pool.install(|| (start..end).into_par_iter().map_init(W::default, |w, r| work(r, w)).collect());
            for (k, t) in out.into_iter().enumerate() {
                fold(start + k as u64, t);
            }
            start = end;
        }
        return Ok(());
    }
    let mut w = W::default();
    for r in 0..reps {
        fold(r, work(r, &mut w));
    }
    Ok(())
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// A hit count out of a number of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        Self { hits, trials }
    }

    pub fn record(&mut self, hit: bool) {
        self.trials += 1;
        self.hits += hit as u64;
    }

    pub fn merge(&mut self, other: Proportion) {
        self.hits += other.hits;
        self.trials += other.trials;
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.hits as f64 / self.trials as f64
    }

    /// Binomial standard error at the estimate.
    pub fn se(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Wilson score interval at normal quantile `z`.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        let n = self.trials as f64;
        let p = self.estimate();
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }
}

/// Running mean and standard error of a real-valued replicate statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    count: u64,
    sum: NeumaierSum,
    sum_sq: NeumaierSum,
}

impl MeanAccumulator {
    pub fn add(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.sum.value() / self.count as f64
    }

    pub fn se(&self) -> f64 {
        let n = self.count as f64;
        let m = self.mean();
        let var = (self.sum_sq.value() / n - m * m).max(0.0) * n / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }
}
