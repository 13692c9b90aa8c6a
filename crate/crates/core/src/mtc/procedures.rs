use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{phi_bound, MarginalLaw};
use crate::studentize::StudentizedRow;

pub const REPORT_SCHEMA: &str = "tailind.decision/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Procedure {
    Bh { q: f64 },
    StepdownFwer { a: f64 },
    SingleThreshold { t: f64 },
}

impl Procedure {
    pub fn name(&self) -> &'static str {
        match self {
            Procedure::Bh { .. } => "bh",
            Procedure::StepdownFwer { .. } => "stepdown-fwer",
            Procedure::SingleThreshold { .. } => "single-threshold",
        }
    }
}

/// How joint exceedence probabilities are computed in the step-down test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JointModel {
    /// `P(T_i > t for all i in a set of size k) = (1 − F(t))^k`.
    #[default]
    Independence,
}

impl JointModel {
    /// Probability that all of `k` given statistics exceed a level whose
    /// single-test tail probability is `q`.
    pub fn joint_exceedance(&self, q: f64, k: usize) -> f64 {
        match self {
            JointModel::Independence => q.powi(k as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub schema: String,
    pub procedure: Procedure,
    /// The error rate the procedure targets (for a single threshold, the
    /// familywise rate it implies under independence).
    pub nominal: f64,
    pub p: usize,
    /// Rejected indices, zero-based and increasing.
    pub rejected: Vec<usize>,
    /// One-sided p-values, one per index.
    pub p_values: Vec<f64>,
    /// Level on the `T` scale at which the procedure stopped, when known.
    pub operative_threshold: Option<f64>,
    pub phi_nominal: Option<f64>,
    pub false_rejections: Option<usize>,
    pub fdp: Option<f64>,
}

impl DecisionReport {
    fn new(procedure: Procedure, nominal: f64, p_values: Vec<f64>, rejected: Vec<usize>, operative: Option<f64>) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            procedure,
            nominal,
            p: p_values.len(),
            rejected,
            p_values,
            operative_threshold: operative,
            phi_nominal: None,
            false_rejections: None,
            fdp: None,
        }
    }

    /// Attaches `φ` at the operative threshold.
    pub fn attach_phi(&mut self, gamma: f64) {
        self.phi_nominal = self.operative_threshold.map(|t| phi_bound(t, self.p as f64, gamma).phi_nominal);
    }

    /// Scores the decision against the truth; `null[i]` marks true nulls.
    pub fn score(&mut self, null: &[bool]) -> Result<()> {
        if null.len() != self.p {
            return Err(Error::arg(format!("truth covers {} indices, report {}", null.len(), self.p)));
        }
        let false_rej = self.rejected.iter().filter(|&&i| null[i]).count();
        self.false_rejections = Some(false_rej);
        self.fdp = Some(if self.rejected.is_empty() { 0.0 } else { false_rej as f64 / self.rejected.len() as f64 });
        Ok(())
    }
}

/// One-sided p-values `P(T > T_i)`; `+∞ ↦ 0`, `−∞ ↦ 1`.
pub fn p_values(rows: &[StudentizedRow], marginal: &MarginalLaw) -> Vec<f64> {
    rows.iter()
        .map(|r| match r.t {
            t if t == f64::INFINITY => 0.0,
            t if t == f64::NEG_INFINITY => 1.0,
            t => marginal.sf(t),
        })
        .collect()
}

fn check_level(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::arg(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

fn check_p_values(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::arg("p-values must lie in [0, 1]"));
    }
    Ok(())
}

fn sort_candidates(c: &mut [(usize, f64)]) {
    c.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
}

/// Step-up selection among `m` tests. Only p-values at most `q` can be
/// rejected, so `candidates` may omit the rest. Returns the rejected
/// indices in increasing order and the number of rejections.
pub fn bh_select(mut candidates: Vec<(usize, f64)>, m: usize, q: f64) -> Vec<usize> {
    candidates.retain(|c| c.1 <= q);
    sort_candidates(&mut candidates);
    let k = candidates
        .iter()
        .enumerate()
        .rev()
        .find(|(i, c)| c.1 <= (i + 1) as f64 * q / m as f64)
        .map_or(0, |(i, _)| i + 1);
    let mut out: Vec<usize> = candidates[..k].iter().map(|c| c.0).collect();
    out.sort_unstable();
    out
}

/// Step-down selection among `m` tests at familywise level `a` under
/// independence: at step `k` the `m − k + 1` remaining hypotheses face the
/// critical value `1 − (1 − a)^{1/(m−k+1)}`. Ties go to the lower index.
pub fn stepdown_select(mut candidates: Vec<(usize, f64)>, m: usize, a: f64) -> Vec<usize> {
    candidates.retain(|c| c.1 <= a);
    sort_candidates(&mut candidates);
    let mut k = 0;
    for (step, c) in candidates.iter().enumerate() {
        let remaining = (m - step) as f64;
        let critical = -f64::exp_m1(f64::ln_1p(-a) / remaining);
        if c.1 > critical {
            break;
        }
        k = step + 1;
    }
    let mut out: Vec<usize> = candidates[..k].iter().map(|c| c.0).collect();
    out.sort_unstable();
    out
}

/// Benjamini–Hochberg step-up at level `q`.
pub fn bh_fdr(p_values: &[f64], q: f64) -> Result<DecisionReport> {
    check_level("q", q)?;
    check_p_values(p_values)?;
    let m = p_values.len();
    let rejected = bh_select(p_values.iter().copied().enumerate().collect(), m, q);
    Ok(DecisionReport::new(Procedure::Bh { q }, q, p_values.to_vec(), rejected, None))
}

/// [`bh_fdr`] on statistics, recording the operative `T` level.
pub fn bh_fdr_rows(rows: &[StudentizedRow], q: f64, marginal: &MarginalLaw) -> Result<DecisionReport> {
    let mut report = bh_fdr(&p_values(rows, marginal), q)?;
    let k = report.rejected.len().max(1);
    report.operative_threshold = Some(marginal.upper_quantile(k as f64 * q / rows.len() as f64));
    Ok(report)
}

/// Step-down familywise control at level `a`.
pub fn stepdown_fwer(rows: &[StudentizedRow], a: f64, marginal: &MarginalLaw, joint: JointModel) -> Result<DecisionReport> {
    check_level("a", a)?;
    let JointModel::Independence = joint;
    let pv = p_values(rows, marginal);
    let m = pv.len();
    let rejected = stepdown_select(pv.iter().copied().enumerate().collect(), m, a);
    // The first, most stringent step sets the familywise level.
    let first = -f64::exp_m1(f64::ln_1p(-a) / m as f64);
    let operative = Some(marginal.upper_quantile(first));
    Ok(DecisionReport::new(Procedure::StepdownFwer { a }, a, pv, rejected, operative))
}

/// Rejects every `T_i > t`.
pub fn single_threshold(rows: &[StudentizedRow], t: f64, marginal: &MarginalLaw) -> Result<DecisionReport> {
    if !t.is_finite() {
        return Err(Error::arg(format!("threshold must be finite, got {t}")));
    }
    let pv = p_values(rows, marginal);
    let rejected = rows.iter().filter(|r| r.t > t).map(|r| r.index).collect();
    let nominal = crate::numerics::any_exceedence_prob(rows.len() as f64, marginal.sf(t));
    Ok(DecisionReport::new(Procedure::SingleThreshold { t }, nominal, pv, rejected, Some(t)))
}
