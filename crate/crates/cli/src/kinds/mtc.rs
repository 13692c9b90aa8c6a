use std::fmt::Write as _;

use tailind::montecarlo::{for_each_replicate, MeanAccumulator};
use tailind::mtc::{
    bh_fdr_rows, bh_select, bin_counts_values, bin_thresholds, single_threshold, stepdown_fwer, stepdown_select,
    BinSpec, DecisionReport, ErrorRateAccumulator, JointModel, Procedure,
};
use tailind::numerics::{any_exceedence_prob, phi_bound, MarginalLaw};
use tailind::panelgen::{PanelGenerator, RowMoments, Workspace};
use tailind::studentize::{studentize_moments, StudentizedRow};
use tailind::{Error, Result};

use crate::config::{line_error, ExperimentConfig};
use crate::output::{OutputFile, Outputs, Table};
use crate::row;

/// Dense decision reports are only written for panels up to this size.
const DECISIONS_MAX_P: usize = 100_000;

struct Replicate {
    /// `(rejections, false rejections)` per procedure.
    outcomes: Vec<(usize, usize)>,
    bins: Option<Vec<usize>>,
}

fn p_value(t: f64, marginal: &MarginalLaw) -> f64 {
    match t {
        t if t == f64::INFINITY => 0.0,
        t if t == f64::NEG_INFINITY => 1.0,
        t => marginal.sf(t),
    }
}

fn level(cfg: &ExperimentConfig, key: &str, default: f64) -> Result<f64> {
    let x = cfg.f64_or("mtc", key, default)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(line_error(&cfg.doc, "mtc", key, format!("{key} must lie in (0, 1), got {x}")));
    }
    Ok(x)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outputs> {
    let spec = cfg.panel()?;
    let p = spec.p;
    let q = level(cfg, "q", 0.1)?;
    let a = level(cfg, "a", 0.05)?;
    let t_single = match cfg.doc.parsed::<f64>("mtc", "t")? {
        Some(t) => t,
        None => cfg.level_t(p as u64)?,
    };
    cfg.check_level_positive("single-threshold level t", t_single)?;
    let marginal = cfg.marginal("mtc", spec.n, "student-t")?;
    let gamma = cfg.gamma()?;
    let t_min = cfg.t_min(p as u64)?;
    let bins = match cfg.doc.count("mtc", "k")? {
        Some(k) => {
            let beta = cfg.f64_or("mtc", "beta", 1.0)?;
            Some(
                bin_thresholds(p, beta, k as usize, &marginal, t_min)
                    .map_err(|e| line_error(&cfg.doc, "mtc", "k", e.to_string()))?,
            )
        }
        None => None,
    };
    let null = spec.null_mask();
    let procedures = [Procedure::Bh { q }, Procedure::StepdownFwer { a }, Procedure::SingleThreshold { t: t_single }];
    let first_step = -f64::exp_m1(f64::ln_1p(-a) / p as f64);
    // Levels on the T scale at which each procedure makes its first rejection.
    let operative = [marginal.upper_quantile(q / p as f64), marginal.upper_quantile(first_step), t_single];
    let nominal = [q, a, any_exceedence_prob(p as f64, marginal.sf(t_single))];
    // Only statistics with p-value at most max(q, a) can be rejected by BH or step-down.
    let candidate_t = marginal.upper_quantile(q.max(a)) * (1.0 - 1e-9) - 1e-12;
    let gen = PanelGenerator::new(spec.clone())?;

    let started = std::time::Instant::now();
    let mut table = Table::new("mtc", &["replicate", "procedure", "nominal", "rejections", "false_rejections", "fdp"]);
    let mut acc = vec![ErrorRateAccumulator::default(); procedures.len()];
    let k_bins = bins.as_ref().map_or(0, BinSpec::k);
    let mut bin_means = vec![MeanAccumulator::default(); k_bins];
    for_each_replicate(
        cfg.reps,
        cfg.jobs,
        |r, (ws, moments): &mut (Workspace, Vec<RowMoments>)| -> Result<Replicate> {
            gen.moments_into(r, false, ws, moments);
            let t: Vec<f64> = moments.iter().enumerate().map(|(i, m)| studentize_moments(i, m).t).collect();
            let candidates: Vec<(usize, f64)> = t
                .iter()
                .enumerate()
                .filter(|(_, &x)| x >= candidate_t)
                .map(|(i, &x)| (i, p_value(x, &marginal)))
                .collect();
            let rejected = [
                bh_select(candidates.clone(), p, q),
                stepdown_select(candidates, p, a),
                t.iter().enumerate().filter(|(_, &x)| x > t_single).map(|(i, _)| i).collect(),
            ];
            let outcomes = rejected.iter().map(|set| (set.len(), set.iter().filter(|&&i| null[i]).count())).collect();
            let bins = match &bins {
                Some(b) => Some(bin_counts_values(&t, b)?.counts),
                None => None,
            };
            Ok(Replicate { outcomes, bins })
        },
        |r, rep| {
            let rep = rep.expect("statistics match the bin spec");
            for (k, &(rejections, false_rejections)) in rep.outcomes.iter().enumerate() {
                let fdp = if rejections == 0 { 0.0 } else { false_rejections as f64 / rejections as f64 };
                table.push(row![r, procedures[k].name(), nominal[k], rejections, false_rejections, fdp]);
                acc[k].add(rejections, false_rejections);
            }
            for (m, &c) in bin_means.iter_mut().zip(rep.bins.iter().flatten()) {
                m.add(c as f64);
            }
        },
    )?;
    let simulate = started.elapsed().as_secs_f64();

    let mut summary_table = Table::new(
        "mtc-summary",
        &[
            "procedure", "nominal", "replicates", "fwer", "fwer_se", "fwer_ci_lo", "fwer_ci_hi", "fdr", "fdr_se",
            "mean_rejections", "operative_t", "t_min", "above_t_min", "phi_nominal",
        ],
    );
    let mut summary = String::new();
    let _ = writeln!(summary, "p = {p}, n = {}, marginal {}, t_min = {t_min:.6}", spec.n, marginal.name());
    for (k, proc_) in procedures.iter().enumerate() {
        let rates = acc[k].finish();
        let phi = phi_bound(operative[k], p as f64, gamma).phi_nominal;
        summary_table.push(row![
            proc_.name(),
            nominal[k],
            rates.replicates,
            rates.fwer_estimate,
            rates.fwer_se,
            rates.fwer_ci.0,
            rates.fwer_ci.1,
            rates.fdr,
            rates.fdr_se,
            rates.mean_rejections,
            operative[k],
            t_min,
            operative[k] >= t_min,
            phi
        ]);
        let _ = writeln!(
            summary,
            "{:<17} nominal {:.5}: FWER {:.5} ± {:.5}, FDR {:.5} ± {:.5}, operative t {:.4}",
            proc_.name(),
            nominal[k],
            rates.fwer_estimate,
            rates.fwer_se,
            rates.fdr,
            rates.fdr_se,
            operative[k]
        );
    }
    let mut out = Outputs { summary, stages: vec![("simulate".into(), simulate)], ..Default::default() };
    out.add(&table, cfg.format);
    out.add(&summary_table, cfg.format);

    if let Some(b) = &bins {
        let mut bin_table = Table::new("mtc-bins", &["j", "threshold", "valid", "expected", "mean_count", "mean_se"]);
        for (j, m) in bin_means.iter().enumerate() {
            bin_table.push(row![j + 1, b.thresholds[j], b.valid[j], b.beta, m.mean(), m.se()]);
        }
        out.add(&bin_table, cfg.format);
    }

    if p <= DECISIONS_MAX_P {
        out.files.push(decisions(&gen, q, a, t_single, &marginal, gamma, &null)?);
    }
    Ok(out)
}

/// Full decision reports for replicate 0.
fn decisions(
    gen: &PanelGenerator,
    q: f64,
    a: f64,
    t: f64,
    marginal: &MarginalLaw,
    gamma: f64,
    null: &[bool],
) -> Result<OutputFile> {
    let rows: Vec<StudentizedRow> = gen.moments(0).iter().enumerate().map(|(i, m)| studentize_moments(i, m)).collect();
    let mut reports: Vec<DecisionReport> = vec![
        bh_fdr_rows(&rows, q, marginal)?,
        stepdown_fwer(&rows, a, marginal, JointModel::Independence)?,
        single_threshold(&rows, t, marginal)?,
    ];
    for r in &mut reports {
        r.attach_phi(gamma);
        r.score(null)?;
    }
    let doc = serde_json::json!({ "schema": tailind::mtc::REPORT_SCHEMA, "replicate": 0, "reports": reports });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| Error::Format(e.to_string()))?;
    bytes.push(b'\n');
    Ok(OutputFile { name: "mtc-decisions.json".into(), bytes })
}
