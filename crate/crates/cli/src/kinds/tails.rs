use std::fmt::Write as _;

use tailind::config::Count;
use tailind::exceedance::{tail_survey, TailEstimate};
use tailind::numerics::{bivariate_normal_tail, normal_sf};
use tailind::{Error, Result};

use crate::config::{line_error, LevelPolicy, ExperimentConfig};
use crate::output::{Outputs, Table};
use crate::row;

/// One-based `a:b` pairs.
fn parse_pairs(cfg: &ExperimentConfig) -> Result<Vec<(usize, usize)>> {
    let Some(e) = cfg.doc.get("tails", "pairs") else { return Ok(vec![(0, 1)]) };
    e.value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            item.split_once(':')
                .and_then(|(a, b)| {
                    let a = a.trim().parse::<usize>().ok()?.checked_sub(1)?;
                    let b = b.trim().parse::<usize>().ok()?.checked_sub(1)?;
                    Some((a, b))
                })
                .ok_or_else(|| Error::Config { line: e.line, message: format!("pair `{item}` is not `i:j` (one-based)") })
        })
        .collect()
}

/// The R-level `s`: `[tails] s`, else an explicit `--level`.
pub fn level_s(cfg: &ExperimentConfig, section: &str) -> Result<f64> {
    let s = match (cfg.doc.parsed::<f64>(section, "s")?, cfg.level) {
        (Some(s), _) => s,
        (None, LevelPolicy::Explicit(t)) => t,
        (None, _) => {
            return Err(Error::Config { line: 0, message: format!("{section} needs a level: set [{section}] s or --level") })
        }
    };
    if !s.is_finite() || s < 0.0 {
        return Err(line_error(&cfg.doc, section, "s", format!("level s must be finite and nonnegative, got {s}")));
    }
    Ok(s)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outputs> {
    let spec = cfg.panel()?;
    let s = level_s(cfg, "tails")?;
    let rows: Vec<usize> = match cfg.doc.list::<Count>("tails", "rows")? {
        Some(list) => list
            .into_iter()
            .map(|c| (c.0 as usize).checked_sub(1).ok_or_else(|| line_error(&cfg.doc, "tails", "rows", "rows are one-based".into())))
            .collect::<Result<_>>()?,
        None => vec![0],
    };
    let pairs = parse_pairs(cfg)?;
    let survey = tail_survey(spec, s, &rows, &pairs, cfg.reps, cfg.jobs)?;

    let mut table = Table::new(
        "tails",
        &[
            "quantity", "i1", "i2", "lag", "s", "reps", "hits", "estimate", "se", "ci_lo", "ci_hi", "exponent",
            "reference", "product", "combined_se",
        ],
    );
    let push = |table: &mut Table, quantity: &str, i1: usize, i2: Option<usize>, est: &TailEstimate, reference: f64, product: f64, cse: f64| {
        let (i2_cell, lag) = match i2 {
            Some(j) => ((j + 1) as u64, i1.abs_diff(j) as u64),
            None => (0, 0),
        };
        table.push(row![
            quantity, (i1 + 1) as u64, i2_cell, lag, s, cfg.reps, est.hits.hits, est.estimate, est.se, est.ci.0, est.ci.1,
            est.exponent, reference, product, cse
        ]);
    };
    let single_ref = normal_sf(s);
    let mut summary = format!("s = {s}, reps = {}\n", cfg.reps);
    for (i, est) in &survey.singles {
        push(&mut table, "single", *i, None, est, single_ref, f64::NAN, est.se);
        let _ = writeln!(
            summary,
            "P(R_{} > s) = {:.6e} ± {:.2e}  (large-n reference {single_ref:.6e}, exponent {:.4})",
            i + 1,
            est.estimate,
            est.se,
            est.exponent
        );
    }
    for pe in &survey.pairs {
        let lag = pe.i1.abs_diff(pe.i2);
        let rho = spec.model.lag_correlation(lag);
        let reference = if rho == 0.0 { single_ref * single_ref } else { bivariate_normal_tail(s, rho)? };
        push(&mut table, "pair", pe.i1, Some(pe.i2), &pe.pair, reference, pe.product, pe.combined_se);
        let _ = writeln!(
            summary,
            "P(R_{} > s, R_{} > s) = {:.6e} ± {:.2e}  (lag {lag}, reference {reference:.6e}, product {:.6e}, exponent {:.4})",
            pe.i1 + 1,
            pe.i2 + 1,
            pe.pair.estimate,
            pe.pair.se,
            pe.product,
            pe.pair.exponent
        );
    }
    let mut out = Outputs { summary, ..Default::default() };
    out.add(&table, cfg.format);
    Ok(out)
}
