//! Multiple-testing layer: bin thresholds and counts, Benjamini–Hochberg,
//! step-down FWER control under the independence approximation, and
//! realized error rates on simulated panels.

mod bins;
mod procedures;
mod rates;

pub use bins::{bin_counts, bin_counts_values, bin_thresholds, multinomial_pmf, BinCounts, BinSpec};
pub use procedures::{
    bh_fdr, bh_fdr_rows, bh_select, p_values, single_threshold, stepdown_fwer, stepdown_select, DecisionReport,
    JointModel, Procedure, REPORT_SCHEMA,
};
pub use rates::{realized_error_rates, ErrorRateAccumulator, ErrorRates};

#[cfg(test)]
mod tests;
