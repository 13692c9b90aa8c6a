//! Level exceedences: extraction, block decomposition and cluster counts,
//! Monte Carlo tail probabilities, and the count coupling between dependent
//! and independent panels.

mod blocks;
mod coupling;
mod tails;

pub use blocks::{block_scheme, cluster_stats, Block, BlockKind, BlockScheme, ClusterStats};
pub use coupling::{coupling_bound, coupling_estimate, shared_uniform_match, CouplingEstimate, CouplingOptions};
pub use tails::{
    tail_probability_pair, tail_probability_single, tail_survey, PairEstimate, TailEstimate, TailSurvey,
    MIN_EXPECTED_HITS,
};

use serde::{Deserialize, Serialize};

use crate::studentize::StudentizedRow;

/// Indices (zero-based, increasing) whose statistic exceeds `level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceSet {
    pub level: f64,
    pub p: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl ExceedanceSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The subset exceeding a (higher or equal) level.
    pub fn refine(&self, level: f64) -> ExceedanceSet {
        let (indices, values) = self
            .indices
            .iter()
            .zip(&self.values)
            .filter(|(_, &v)| v > level)
            .map(|(&i, &v)| (i, v))
            .unzip();
        ExceedanceSet { level, p: self.p, indices, values }
    }
}

/// Exceedences of a plain sequence of statistics.
pub fn extract_values(stats: &[f64], level: f64) -> ExceedanceSet {
    let (indices, values) = stats.iter().enumerate().filter(|(_, &v)| v > level).map(|(i, &v)| (i, v)).unzip();
    ExceedanceSet { level, p: stats.len(), indices, values }
}

/// Exceedences of level `t` by `T_i`. Constant nonzero rows (`±∞`) and the
/// all-zero convention `T = 1` flow through the comparison unchanged.
pub fn extract(rows: &[StudentizedRow], level: f64) -> ExceedanceSet {
    let (indices, values) = rows.iter().filter(|r| r.t > level).map(|r| (r.index, r.t)).unzip();
    ExceedanceSet { level, p: rows.len(), indices, values }
}

/// Exceedences of an `R`-level by `R_i`.
pub fn extract_r(rows: &[StudentizedRow], r_level: f64) -> ExceedanceSet {
    let (indices, values) = rows.iter().filter(|r| r.r > r_level).map(|r| (r.index, r.r)).unzip();
    ExceedanceSet { level: r_level, p: rows.len(), indices, values }
}

#[cfg(test)]
mod tests;
