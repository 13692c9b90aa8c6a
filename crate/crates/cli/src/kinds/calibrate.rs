//! `calibrate` and `paper-table`: analytic constants, no simulation.

use std::fmt::Write as _;

use tailind::config::Count;
use tailind::numerics::{
    any_exceedence_prob, dependence_summary, phi_bound, threshold_regime, MarginalLaw, ThresholdVariant,
};
use tailind::Result;

use crate::config::ExperimentConfig;
use crate::output::{Outputs, Table};
use crate::row;

fn p_list(cfg: &ExperimentConfig, section: &str, default: &[u64]) -> Result<Vec<u64>> {
    if let Some(list) = cfg.doc.list::<Count>(section, "p")? {
        return Ok(list.into_iter().map(|c| c.0).collect());
    }
    if let Some(p) = cfg.doc.count("panel", "p")? {
        return Ok(vec![p]);
    }
    Ok(default.to_vec())
}

fn group_size(cfg: &ExperimentConfig, section: &str) -> Result<u64> {
    Ok(cfg.doc.count(section, "n")?.or(cfg.doc.count("panel", "n")?).unwrap_or(100))
}

pub fn calibrate(cfg: &ExperimentConfig) -> Result<Outputs> {
    let ps = p_list(cfg, "calibrate", &[10_000, 100_000, 1_000_000])?;
    let n = group_size(cfg, "calibrate")?;
    let dep = dependence_summary(cfg.rho_max())?;
    let eta = match cfg.level {
        crate::config::LevelPolicy::Regime { eta, .. } => eta,
        crate::config::LevelPolicy::Explicit(_) => cfg.f64_or("level", "eta", 0.05)?,
    };
    let law = MarginalLaw::student_for(n as usize);
    law.validate()?;
    let mut table = Table::new(
        "calibrate",
        &["p", "n", "rho_max", "alpha", "gamma", "eta", "t_min", "t_ma", "phi_nominal", "q_single", "p_any"],
    );
    let mut summary = String::new();
    let _ = writeln!(summary, "rho_max = {}\nalpha = {}\ngamma = {}\neta = {eta}", dep.rho_max, dep.alpha, dep.gamma);
    for &p in &ps {
        let variant = ThresholdVariant::MovingAverage { a: cfg.ma_constant };
        let regime = threshold_regime(p, eta, dep.gamma, variant)?;
        let t_ma = regime.t_ma.unwrap_or(f64::NAN);
        let phi = phi_bound(regime.t_min, p as f64, dep.gamma).phi_nominal;
        let q = law.sf(regime.t_min);
        let any = any_exceedence_prob(p as f64, q);
        table.push(row![p, n, dep.rho_max, dep.alpha, dep.gamma, eta, regime.t_min, t_ma, phi, q, any]);
        let _ = writeln!(
            summary,
            "p = {p}: t_min = {:.6}, t_ma = {t_ma:.6}, phi_nominal(t_min) = {phi:.6}, P(any exceedence) = {any:.6}",
            regime.t_min
        );
    }
    let mut out = Outputs { summary, ..Default::default() };
    out.add(&table, cfg.format);
    Ok(out)
}

pub fn paper_table(cfg: &ExperimentConfig) -> Result<Outputs> {
    let ps = p_list(cfg, "paper-table", &[10_000, 100_000, 1_000_000])?;
    let n = group_size(cfg, "paper-table")?;
    let p0 = cfg.doc.count("paper-table", "p0")?.unwrap_or(1_000_000);
    let rho_max = cfg.f64_or("paper-table", "rho_max", cfg.rho_max.unwrap_or(0.1))?;
    let gamma = dependence_summary(rho_max)?.gamma;
    let law = MarginalLaw::student_for(n as usize);
    law.validate()?;
    let t = law.upper_quantile(1.0 / p0 as f64);
    let q = 1.0 / p0 as f64;
    let mut table = Table::new("paper-table", &["p", "n", "t", "q_single", "p_any", "gamma", "phi_nominal", "phi_ratio"]);
    let mut summary = format!("t = {t:.6} (upper 1/{p0} quantile, {} df), gamma = {gamma}\n", n - 1);
    let _ = writeln!(summary, "{:>10}  {:>16}  {:>12}  {:>10}", "p", "P(any exceed.)", "phi_nominal", "ratio");
    for &p in &ps {
        let any = any_exceedence_prob(p as f64, q);
        let phi = phi_bound(t, p as f64, gamma).phi_nominal;
        table.push(row![p, n, t, q, any, gamma, phi, phi / any]);
        let _ = writeln!(summary, "{p:>10}  {any:>16.5}  {phi:>12.5}  {:>9.2}%", 100.0 * phi / any);
    }
    let mut out = Outputs { summary, ..Default::default() };
    out.add(&table, cfg.format);
    Ok(out)
}
