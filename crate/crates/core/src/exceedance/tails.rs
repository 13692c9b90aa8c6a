use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{for_each_replicate, Proportion};
use crate::numerics::{bivariate_normal_tail, normal_sf};
use crate::panelgen::{PanelGenerator, PanelSpec, RowMoments, Workspace};
use crate::studentize::studentize_moments;

/// Smallest acceptable expected hit count for a tail estimate.
pub const MIN_EXPECTED_HITS: f64 = 50.0;

const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub s: f64,
    pub hits: Proportion,
    pub estimate: f64,
    pub se: f64,
    /// 95% Wilson interval.
    pub ci: (f64, f64),
    /// `−log(estimate) / (s²/2)`.
    pub exponent: f64,
}

impl TailEstimate {
    fn new(s: f64, hits: Proportion) -> Self {
        let estimate = hits.estimate();
        Self { s, hits, estimate, se: hits.se(), ci: hits.wilson(Z95), exponent: -estimate.ln() / (0.5 * s * s) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEstimate {
    pub i1: usize,
    pub i2: usize,
    pub pair: TailEstimate,
    pub first: TailEstimate,
    pub second: TailEstimate,
    /// Product of the two single estimates.
    pub product: f64,
    /// `(se_pair² + (p̂₂ se₁)² + (p̂₁ se₂)²)^{1/2}`, for comparing the pair
    /// estimate with the product.
    pub combined_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSurvey {
    pub s: f64,
    pub reps: u64,
    pub singles: Vec<(usize, TailEstimate)>,
    pub pairs: Vec<PairEstimate>,
}

/// Monte Carlo estimates of `P(R_i > s)` for each `singles` row and
/// `P(R_i1 > s, R_i2 > s)` for each pair, all from the same `reps` panels.
/// Only the rows up to the largest requested index are generated.
///
/// Fails when the large-`n` reference probability predicts fewer than
/// [`MIN_EXPECTED_HITS`] hits for some quantity.
pub fn tail_survey(
    spec: &PanelSpec,
    s: f64,
    singles: &[usize],
    pairs: &[(usize, usize)],
    reps: u64,
    jobs: usize,
) -> Result<TailSurvey> {
    if !s.is_finite() {
        return Err(Error::arg(format!("tail level must be finite, got {s}")));
    }
    let mut rows: Vec<usize> = singles.iter().copied().chain(pairs.iter().flat_map(|&(a, b)| [a, b])).collect();
    rows.sort_unstable();
    rows.dedup();
    if rows.is_empty() {
        return Err(Error::arg("no rows requested"));
    }
    if rows.len() > 64 {
        return Err(Error::arg("at most 64 distinct rows per survey"));
    }
    let top = *rows.last().unwrap();
    if top >= spec.p {
        return Err(Error::arg(format!("row {} outside panel of {} rows", top + 1, spec.p)));
    }
    if pairs.iter().any(|&(a, b)| a == b) {
        return Err(Error::arg("pair rows must differ"));
    }

    let single_guide = normal_sf(s);
    let mut guide = single_guide;
    for &(a, b) in pairs {
        let rho = spec.model.lag_correlation(a.abs_diff(b));
        let g = if rho == 0.0 { single_guide * single_guide } else { bivariate_normal_tail(s, rho)? };
        guide = guide.min(g);
    }
    let required = (MIN_EXPECTED_HITS / guide).ceil();
    if (reps as f64) < required {
        return Err(Error::InsufficientReplicates {
            guard: "expected-hits",
            reps,
            required: if required.is_finite() { required as u64 } else { u64::MAX },
        });
    }

    let gen = PanelGenerator::new(truncated(spec, top + 1))?;
    let slot = |i: usize| rows.binary_search(&i).unwrap();
    let pair_slots: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (slot(a), slot(b))).collect();
    let mut row_hits = vec![Proportion::default(); rows.len()];
    let mut pair_hits = vec![Proportion::default(); pairs.len()];
    for_each_replicate(
        reps,
        jobs,
        |r, (ws, moments): &mut (Workspace, Vec<RowMoments>)| {
            gen.moments_into(r, false, ws, moments);
            let mut mask = 0u64;
            for (k, &i) in rows.iter().enumerate() {
                if studentize_moments(i, &moments[i]).r > s {
                    mask |= 1 << k;
                }
            }
            mask
        },
        |_, mask| {
            let hit = |k: usize| mask >> k & 1 == 1;
            for (k, h) in row_hits.iter_mut().enumerate() {
                h.record(hit(k));
            }
            for (h, &(a, b)) in pair_hits.iter_mut().zip(&pair_slots) {
                h.record(hit(a) && hit(b));
            }
        },
    )?;

    let single = |i: usize| TailEstimate::new(s, row_hits[slot(i)]);
    let pairs = pairs
        .iter()
        .zip(pair_hits)
        .map(|(&(i1, i2), hits)| {
            let (first, second) = (single(i1), single(i2));
            let pair = TailEstimate::new(s, hits);
            let combined_se = (pair.se.powi(2)
                + (second.estimate * first.se).powi(2)
                + (first.estimate * second.se).powi(2))
            .sqrt();
            PairEstimate { i1, i2, pair, first, second, product: first.estimate * second.estimate, combined_se }
        })
        .collect();
    Ok(TailSurvey { s, reps, singles: singles.iter().map(|&i| (i, single(i))).collect(), pairs })
}

/// Estimate of `P(R_i > s)`.
pub fn tail_probability_single(spec: &PanelSpec, i: usize, s: f64, reps: u64, jobs: usize) -> Result<TailEstimate> {
    Ok(tail_survey(spec, s, &[i], &[], reps, jobs)?.singles[0].1)
}

/// Estimate of `P(R_i1 > s, R_i2 > s)` with both marginals.
pub fn tail_probability_pair(
    spec: &PanelSpec,
    i1: usize,
    i2: usize,
    s: f64,
    reps: u64,
    jobs: usize,
) -> Result<PairEstimate> {
    Ok(tail_survey(spec, s, &[], &[(i1, i2)], reps, jobs)?.pairs[0])
}

fn truncated(spec: &PanelSpec, p: usize) -> PanelSpec {
    let mut out = spec.clone();
    out.p = p;
    if let Some(sizes) = &mut out.sizes {
        sizes.truncate(p);
    }
    out.offsets.retain(|&(i, _)| i < p);
    out
}
