use serde::{Deserialize, Serialize};

use super::normal::{normal_quantile, normal_sf};
use super::student_t::StudentT;
use crate::error::{Error, Result};

/// A reference law for one-sided p-values and bin thresholds of `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MarginalLaw {
    /// Plain Student t with `df` degrees of freedom.
    StudentT { df: f64 },
    /// Exact law of `T` (divisor-`n` scale) for normal samples of size `n`:
    /// `T = √(n/(n−1)) t_{n−1}`.
    ExactStudentized { n: usize },
    Normal,
    /// Empirical law of a reference sample (sorted ascending).
    Empirical { sample: Vec<f64> },
}

impl MarginalLaw {
    /// Student t with `n − 1` degrees of freedom.
    pub fn student_for(n: usize) -> Self {
        MarginalLaw::StudentT { df: n as f64 - 1.0 }
    }

    pub fn empirical(mut sample: Vec<f64>) -> Result<Self> {
        if sample.is_empty() || sample.iter().any(|x| x.is_nan()) {
            return Err(Error::arg("empirical law needs a non-empty sample without NaN"));
        }
        sample.sort_by(f64::total_cmp);
        Ok(MarginalLaw::Empirical { sample })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MarginalLaw::StudentT { df } => StudentT::new(*df).map(|_| ()),
            MarginalLaw::ExactStudentized { n } if *n < 2 => {
                Err(Error::arg(format!("exact studentized law needs n ≥ 2, got {n}")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MarginalLaw::StudentT { .. } => "student-t",
            MarginalLaw::ExactStudentized { .. } => "exact-studentized",
            MarginalLaw::Normal => "normal",
            MarginalLaw::Empirical { .. } => "empirical",
        }
    }

    /// `P(T > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            MarginalLaw::StudentT { df } => StudentT::new(*df).map_or(f64::NAN, |t| t.sf(x)),
            MarginalLaw::ExactStudentized { n } => studentized_normal_sf(x, *n),
            MarginalLaw::Normal => normal_sf(x),
            MarginalLaw::Empirical { sample } => {
                let above = sample.len() - sample.partition_point(|&v| v <= x);
                above as f64 / sample.len() as f64
            }
        }
    }

    /// Smallest `x` with `P(T > x) ≤ tail` (for continuous laws, the solution
    /// of `P(T > x) = tail`).
    pub fn upper_quantile(&self, tail: f64) -> f64 {
        match self {
            MarginalLaw::StudentT { df } => StudentT::new(*df).map_or(f64::NAN, |t| t.upper_quantile(tail)),
            MarginalLaw::ExactStudentized { n } => {
                let nf = *n as f64;
                StudentT::new(nf - 1.0).map_or(f64::NAN, |t| t.upper_quantile(tail) * (nf / (nf - 1.0)).sqrt())
            }
            MarginalLaw::Normal => -normal_quantile(tail),
            MarginalLaw::Empirical { sample } => {
                let len = sample.len();
                // At most floor(tail·len) points may lie strictly above.
                let allowed = (tail * len as f64).floor() as usize;
                if allowed >= len {
                    return f64::NEG_INFINITY;
                }
                sample[len - 1 - allowed]
            }
        }
    }
}

/// `P(T > x)` for the divisor-`n` studentized mean of `n` i.i.d. normals.
pub fn studentized_normal_sf(x: f64, n: usize) -> f64 {
    let nf = n as f64;
    match StudentT::new(nf - 1.0) {
        Ok(t) => t.sf(x * ((nf - 1.0) / nf).sqrt()),
        Err(_) => f64::NAN,
    }
}
