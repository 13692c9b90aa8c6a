use std::fmt::Write as _;

use tailind::exceedance::{block_scheme, coupling_estimate, BlockKind, BlockScheme, CouplingOptions};
use tailind::Result;

use crate::config::ExperimentConfig;
use crate::kinds::tails::level_s;
use crate::output::{Outputs, Table};
use crate::row;

pub fn scheme_for(cfg: &ExperimentConfig, section: &str, s: f64) -> Result<BlockScheme> {
    let spec = cfg.panel()?;
    let kappa = spec.model.kappa();
    match cfg.doc.count(section, "ell")? {
        Some(ell) => BlockScheme::with_ell(spec.p, kappa, ell as usize),
        None => block_scheme(spec.p, kappa, s),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outputs> {
    let spec = cfg.panel()?;
    let s = level_s(cfg, "coupling")?;
    cfg.check_level_positive("coupling level s", s)?;
    let scheme = scheme_for(cfg, "coupling", s)?;
    let opts = CouplingOptions {
        se_cap: cfg.f64_or("coupling", "se_cap", 0.02)?,
        draws: cfg.count_or("coupling", "draws", 100_000)?,
        jobs: cfg.jobs,
    };
    let est = coupling_estimate(spec, &scheme, s, cfg.reps, opts)?;

    let mut blocks = Table::new(
        "coupling-blocks",
        &["block", "start", "end", "pi", "pi_se", "pi_independent", "pi_independent_se"],
    );
    for b in scheme.blocks().iter().filter(|b| b.kind == BlockKind::Large) {
        let j = b.number;
        blocks.push(row![
            (j + 1) as u64,
            (b.range.start + 1) as u64,
            b.range.end as u64,
            est.pi[j],
            est.pi_se[j],
            est.pi_independent[j],
            est.pi_independent_se[j]
        ]);
    }
    let mut summary_table = Table::new(
        "coupling-summary",
        &["s", "kappa", "ell", "m", "reps", "bound", "realized", "realized_se", "draws"],
    );
    summary_table.push(row![
        s,
        scheme.kappa,
        scheme.ell,
        scheme.m,
        cfg.reps,
        est.bound,
        est.realized.estimate(),
        est.realized.se(),
        opts.draws
    ]);
    let mut summary = String::new();
    let _ = writeln!(summary, "s = {s}, kappa = {}, ell = {}, large blocks m = {}", scheme.kappa, scheme.ell, scheme.m);
    let _ = writeln!(
        summary,
        "coupling lower bound 1 - sum|pi - pi'| = {:.6}; realized P(N = N') = {:.6} ± {:.2e}",
        est.bound,
        est.realized.estimate(),
        est.realized.se()
    );
    let mut out = Outputs { summary, ..Default::default() };
    out.add(&blocks, cfg.format);
    out.add(&summary_table, cfg.format);
    Ok(out)
}
