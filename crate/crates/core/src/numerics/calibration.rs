//! The α / γ / threshold / error-bound calculus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default for the constant `A` in the moving-average threshold
/// `√(2γ⁻¹(log p + A log log p))`.
pub const DEFAULT_MA_CONSTANT: f64 = 3.0;

/// Strength of dependence summarised by the largest off-diagonal correlation.
///
/// Under κ-dependence every pair further apart than κ is uncorrelated, so
/// `rho_max` is the largest correlation over lags `1..=κ` (floored at 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceSummary {
    pub rho_max: f64,
    pub alpha: f64,
    pub gamma: f64,
}

pub fn dependence_summary(rho_max: f64) -> Result<DependenceSummary> {
    if !(0.0..1.0).contains(&rho_max) {
        return Err(Error::arg(format!(
            "maximal correlation must lie in [0, 1), got {rho_max}"
        )));
    }
    let alpha = 0.25 * (1.0 - rho_max);
    Ok(DependenceSummary { rho_max, alpha, gamma: alpha + 1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThresholdVariant {
    Standard,
    /// Moving-average refinement with constant `A`.
    MovingAverage { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRegime {
    pub p: u64,
    pub eta: f64,
    pub gamma: f64,
    /// `(1 + η) √(2 γ⁻¹ log p)`.
    pub t_min: f64,
    /// `√(2 γ⁻¹ (log p + A log log p))`, only for the moving-average variant.
    pub t_ma: Option<f64>,
}

pub fn threshold_regime(p: u64, eta: f64, gamma: f64, variant: ThresholdVariant) -> Result<ThresholdRegime> {
    if p < 2 {
        return Err(Error::arg(format!("need at least two tests, got p = {p}")));
    }
    if !(eta >= 0.0) || !(gamma >= 1.0) {
        return Err(Error::arg(format!(
            "need eta >= 0 and gamma >= 1, got eta = {eta}, gamma = {gamma}"
        )));
    }
    let log_p = (p as f64).ln();
    let t_min = (1.0 + eta) * (2.0 * log_p / gamma).sqrt();
    let t_ma = match variant {
        ThresholdVariant::Standard => None,
        ThresholdVariant::MovingAverage { a } => {
            let inner = log_p + a * log_p.ln();
            Some((2.0 * inner.max(0.0) / gamma).sqrt())
        }
    };
    Ok(ThresholdRegime { p, eta, gamma, t_min, t_ma })
}

/// Nominal error bound with the `exp{o(t²)}` factor set to one. It describes
/// the shape of the bound, not a certified value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub t: f64,
    pub p: f64,
    pub gamma: f64,
    pub phi_nominal: f64,
}

/// `exp(-t²/4) + p exp(-γ t²/2)`.
pub fn phi_bound(t: f64, p: f64, gamma: f64) -> ErrorBound {
    let t2 = t * t;
    let phi_nominal = (-0.25 * t2).exp() + p * (-0.5 * gamma * t2).exp();
    ErrorBound { t, p, gamma, phi_nominal }
}

/// `1 - (1 - q)^p`, the chance that at least one of `p` independent
/// statistics exceeds a level each exceeds with probability `q`.
pub fn any_exceedence_prob(p: f64, q_single: f64) -> f64 {
    if q_single >= 1.0 {
        return 1.0;
    }
    -(p * (-q_single).ln_1p()).exp_m1()
}
