use serde::{Deserialize, Serialize};

use super::procedures::DecisionReport;
use crate::error::{Error, Result};
use crate::montecarlo::{MeanAccumulator, Proportion};

const Z95: f64 = 1.959963984540054;

/// Realized error rates over replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub replicates: u64,
    /// Replicates with at least one false rejection.
    pub fwer: Proportion,
    pub fwer_estimate: f64,
    pub fwer_se: f64,
    pub fwer_ci: (f64, f64),
    /// Mean false-discovery proportion.
    pub fdr: f64,
    pub fdr_se: f64,
    pub mean_rejections: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ErrorRateAccumulator {
    fwer: Proportion,
    fdp: MeanAccumulator,
    rejections: MeanAccumulator,
}

impl ErrorRateAccumulator {
    pub fn add(&mut self, rejections: usize, false_rejections: usize) {
        self.fwer.record(false_rejections > 0);
        self.fdp.add(if rejections == 0 { 0.0 } else { false_rejections as f64 / rejections as f64 });
        self.rejections.add(rejections as f64);
    }

    pub fn finish(&self) -> ErrorRates {
        ErrorRates {
            replicates: self.fwer.trials,
            fwer: self.fwer,
            fwer_estimate: self.fwer.estimate(),
            fwer_se: self.fwer.se(),
            fwer_ci: self.fwer.wilson(Z95),
            fdr: self.fdp.mean(),
            fdr_se: self.fdp.se(),
            mean_rejections: self.rejections.mean(),
        }
    }
}

/// Error rates of scored reports (see [`DecisionReport::score`]).
pub fn realized_error_rates(reports: &[DecisionReport]) -> Result<ErrorRates> {
    if reports.is_empty() {
        return Err(Error::arg("no reports"));
    }
    let mut acc = ErrorRateAccumulator::default();
    for r in reports {
        let f = r.false_rejections.ok_or_else(|| Error::arg("report has no truth attached; score it first"))?;
        acc.add(r.rejected.len(), f);
    }
    Ok(acc.finish())
}
