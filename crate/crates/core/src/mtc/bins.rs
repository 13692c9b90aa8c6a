use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::ln_gamma;
use crate::numerics::MarginalLaw;
use crate::studentize::StudentizedRow;

/// Thresholds `t_1 > … > t_k` with `P(T > t_j) = jβ/p`, so every bin
/// `(t_j, t_{j−1}]` (with `t_0 = ∞`) has probability `β/p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub p: usize,
    pub beta: f64,
    pub thresholds: Vec<f64>,
    pub marginal: MarginalLaw,
    /// Lower end of the admissible threshold regime.
    pub t_min: f64,
    /// Whether `t_j ≥ t_min`.
    pub valid: Vec<bool>,
}

impl BinSpec {
    pub fn k(&self) -> usize {
        self.thresholds.len()
    }

    /// Probability of each bin.
    pub fn bin_probability(&self) -> f64 {
        self.beta / self.p as f64
    }
}

/// Bin thresholds for `k` bins. `t_min` only sets the validity flags.
pub fn bin_thresholds(p: usize, beta: f64, k: usize, marginal: &MarginalLaw, t_min: f64) -> Result<BinSpec> {
    if !(beta > 0.0) || k == 0 {
        return Err(Error::arg(format!("bins need β > 0 and k ≥ 1, got β = {beta}, k = {k}")));
    }
    if k as f64 * beta >= p as f64 {
        return Err(Error::arg(format!("kβ = {} must be below p = {p}", k as f64 * beta)));
    }
    marginal.validate()?;
    let thresholds: Vec<f64> = (1..=k).map(|j| marginal.upper_quantile(j as f64 * beta / p as f64)).collect();
    let valid = thresholds.iter().map(|&t| t >= t_min).collect();
    Ok(BinSpec { p, beta, thresholds, marginal: marginal.clone(), t_min, valid })
}

/// `Q_1..Q_k` and the count below `t_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinCounts {
    pub counts: Vec<usize>,
    pub remainder: usize,
}

pub fn bin_counts_values(values: &[f64], bins: &BinSpec) -> Result<BinCounts> {
    if values.len() != bins.p {
        return Err(Error::arg(format!("{} statistics for bins over p = {}", values.len(), bins.p)));
    }
    let mut counts = vec![0; bins.k()];
    let lowest = *bins.thresholds.last().unwrap();
    for &t in values {
        if t > lowest {
            // First j with t > t_j; thresholds are decreasing.
            let j = bins.thresholds.partition_point(|&tj| t <= tj);
            counts[j] += 1;
        }
    }
    let remainder = values.len() - counts.iter().sum::<usize>();
    Ok(BinCounts { counts, remainder })
}

pub fn bin_counts(rows: &[StudentizedRow], bins: &BinSpec) -> Result<BinCounts> {
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    bin_counts_values(&t, bins)
}

/// Probability of `counts` (plus the remainder `p − Σ counts`) under a
/// multinomial with cell probabilities `q` and remainder `1 − Σ q`.
pub fn multinomial_pmf(p: usize, q: &[f64], counts: &[usize]) -> f64 {
    let used: usize = counts.iter().sum();
    if used > p || q.len() != counts.len() {
        return 0.0;
    }
    let rest_q = 1.0 - q.iter().sum::<f64>();
    let rest = p - used;
    let mut ln = ln_gamma(p as f64 + 1.0) - ln_gamma(rest as f64 + 1.0);
    if rest > 0 {
        ln += rest as f64 * rest_q.ln();
    }
    for (&c, &qj) in counts.iter().zip(q) {
        if c > 0 {
            ln += c as f64 * qj.ln() - ln_gamma(c as f64 + 1.0);
        }
    }
    ln.exp()
}
