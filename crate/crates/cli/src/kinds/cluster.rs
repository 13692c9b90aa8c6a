use std::collections::BTreeMap;
use std::fmt::Write as _;

use tailind::exceedance::{cluster_stats, ClusterStats, ExceedanceSet};
use tailind::montecarlo::{for_each_replicate, MeanAccumulator, Proportion};
use tailind::numerics::special::ln_gamma;
use tailind::numerics::{any_exceedence_prob, phi_bound};
use tailind::panelgen::{PanelGenerator, RowMoments, Workspace};
use tailind::studentize::{studentize_moments, t_level_to_r_level};
use tailind::Result;

use crate::config::ExperimentConfig;
use crate::kinds::coupling::scheme_for;
use crate::output::{Outputs, Table};
use crate::row;

/// `Binomial(p, q)` probability of `k`.
pub fn binomial_pmf(p: u64, q: f64, k: u64) -> f64 {
    if k > p {
        return 0.0;
    }
    let (pf, kf) = (p as f64, k as f64);
    let ln_choose = ln_gamma(pf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(pf - kf + 1.0);
    let ln_tail = if k == p { 0.0 } else { (pf - kf) * (-q).ln_1p() };
    let ln_hit = if k == 0 { 0.0 } else { kf * q.ln() };
    (ln_choose + ln_hit + ln_tail).exp()
}

/// Total-variation distance between an empirical count distribution
/// (`histogram[k]` = replicates with `k` exceedences) and `Binomial(p, q)`.
pub fn tv_to_binomial(histogram: &BTreeMap<u64, u64>, reps: u64, p: u64, q: f64) -> f64 {
    let top = histogram.keys().next_back().copied().unwrap_or(0);
    let mean = p as f64 * q;
    let limit = top.max((mean + 40.0 * mean.sqrt() + 40.0) as u64).min(p);
    let (mut diff, mut covered) = (0.0, 0.0);
    for k in 0..=limit {
        let b = binomial_pmf(p, q, k);
        let e = histogram.get(&k).copied().unwrap_or(0) as f64 / reps as f64;
        diff += (e - b).abs();
        covered += b;
    }
    0.5 * (diff + (1.0 - covered).max(0.0))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outputs> {
    let spec = cfg.panel()?;
    let p = spec.p as u64;
    let t = cfg.level_t(p)?;
    cfg.check_level_positive("cluster level t", t)?;
    let s = t_level_to_r_level(t, spec.n);
    let scheme = scheme_for(cfg, "cluster", s)?;
    let marginal = cfg.marginal("cluster", spec.n, cfg.default_marginal_name())?;
    let gamma = cfg.gamma()?;
    let gen = PanelGenerator::new(spec.clone())?;

    let started = std::time::Instant::now();
    let mut table = Table::new(
        "cluster",
        &[
            "replicate", "exceedances", "large_blocks_hit", "large_blocks_multi", "small_block_hits",
            "fragment_hits", "max_in_block", "within_kappa_pairs", "longest_run", "min_gap", "event_f",
        ],
    );
    let mut any = Proportion::default();
    let mut within = Proportion::default();
    let mut f_fail = Proportion::default();
    let mut mean_count = MeanAccumulator::default();
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for_each_replicate(
        cfg.reps,
        cfg.jobs,
        |r, (ws, moments): &mut (Workspace, Vec<RowMoments>)| -> Result<ClusterStats> {
            gen.moments_into(r, false, ws, moments);
            let (indices, values) = moments
                .iter()
                .enumerate()
                .map(|(i, m)| (i, studentize_moments(i, m).t))
                .filter(|&(_, v)| v > t)
                .unzip();
            cluster_stats(&ExceedanceSet { level: t, p: spec.p, indices, values }, &scheme)
        },
        |r, stats| {
            // Errors cannot occur: the scheme was built for this panel.
            let st = stats.expect("scheme matches panel");
            table.push(row![
                r,
                st.total,
                st.large_blocks_hit,
                st.large_blocks_multi,
                st.small_block_hits,
                st.fragment_hits,
                st.max_in_block,
                st.within_kappa_pairs,
                st.longest_run,
                st.min_gap.map_or(String::new(), |g| g.to_string()),
                st.event_f
            ]);
            any.record(st.total > 0);
            within.record(st.within_kappa_pairs > 0);
            f_fail.record(!st.event_f);
            mean_count.add(st.total as f64);
            *histogram.entry(st.total as u64).or_insert(0) += 1;
        },
    )?;
    let simulate = started.elapsed().as_secs_f64();

    let q = marginal.sf(t);
    let reference = any_exceedence_prob(p as f64, q);
    let phi = phi_bound(t, p as f64, gamma).phi_nominal;
    let tv = tv_to_binomial(&histogram, cfg.reps, p, q);
    let mut summary_table = Table::new(
        "cluster-summary",
        &[
            "p", "n", "kappa", "t", "s", "ell", "m", "reps", "marginal", "q_single", "p_any_independent", "p_any",
            "p_any_se", "phi_nominal", "within_kappa_fraction", "within_kappa_se", "f_fail_fraction", "f_fail_se",
            "mean_exceedances", "tv_binomial",
        ],
    );
    summary_table.push(row![
        p,
        spec.n,
        scheme.kappa,
        t,
        s,
        scheme.ell,
        scheme.m,
        cfg.reps,
        marginal.name(),
        q,
        reference,
        any.estimate(),
        any.se(),
        phi,
        within.estimate(),
        within.se(),
        f_fail.estimate(),
        f_fail.se(),
        mean_count.mean(),
        tv
    ]);
    let mut summary = String::new();
    let _ = writeln!(summary, "t = {t:.6} (R-level s = {s:.6}), blocks ell = {}, m = {}", scheme.ell, scheme.m);
    let _ = writeln!(
        summary,
        "P(>= 1 exceedence) = {:.5} ± {:.5}; independent reference {reference:.5}; phi_nominal(t) = {phi:.5}",
        any.estimate(),
        any.se()
    );
    let _ = writeln!(
        summary,
        "within-kappa clusters: {:.5} ± {:.5}; event F fails: {:.5}; TV to Binomial(p, q) = {tv:.5}",
        within.estimate(),
        within.se(),
        f_fail.estimate()
    );
    let mut out = Outputs { summary, stages: vec![("simulate".into(), simulate)], ..Default::default() };
    out.add(&table, cfg.format);
    out.add(&summary_table, cfg.format);
    Ok(out)
}
