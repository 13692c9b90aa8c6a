//! Browser bindings: a calibration explorer, a one-panel exceedence viewer
//! and the block-count coupling demo. Each export takes plain numbers and
//! returns a JSON string; errors come back as JS exceptions.

use serde::Serialize;
use tailind::exceedance::{block_scheme, cluster_stats, coupling_bound, shared_uniform_match, BlockKind, ExceedanceSet};
use tailind::numerics::{any_exceedence_prob, dependence_summary, phi_bound, threshold_regime, MarginalLaw, ThresholdVariant};
use tailind::panelgen::{DependenceModel, InnovationLaw, PanelGenerator, PanelSpec};
use tailind::studentize::{studentize_moments, t_level_to_r_level};
use wasm_bindgen::prelude::*;

/// Largest panel the viewer will simulate.
pub const MAX_VIEW_P: usize = 20_000;
pub const MAX_VIEW_CELLS: usize = 4_000_000;

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CalibrationRow {
    p: f64,
    t_min: f64,
    t_ma: f64,
    phi_nominal: f64,
    p_any: f64,
}

#[derive(Serialize)]
struct Calibration {
    alpha: f64,
    gamma: f64,
    rows: Vec<CalibrationRow>,
}

/// `t_min`, the moving-average level and `φ(t_min)` over a log grid of `p`.
pub fn calibration_json(rho_max: f64, eta: f64, n: usize, log10_p_max: f64, points: usize) -> Result<String, String> {
    let dep = dependence_summary(rho_max).map_err(|e| e.to_string())?;
    let law = MarginalLaw::student_for(n);
    law.validate().map_err(|e| e.to_string())?;
    if !(log10_p_max >= 1.0 && log10_p_max <= 12.0) || points < 2 {
        return Err("log10 p must lie in [1, 12] and the grid needs two points".into());
    }
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let p = 10f64.powf(1.0 + (log10_p_max - 1.0) * k as f64 / (points - 1) as f64).round().max(3.0);
        let regime = threshold_regime(p as u64, eta, dep.gamma, ThresholdVariant::MovingAverage { a: 3.0 })
            .map_err(|e| e.to_string())?;
        rows.push(CalibrationRow {
            p,
            t_min: regime.t_min,
            t_ma: regime.t_ma.unwrap_or(f64::NAN),
            phi_nominal: phi_bound(regime.t_min, p, dep.gamma).phi_nominal,
            p_any: any_exceedence_prob(p, law.sf(regime.t_min)),
        });
    }
    json(&Calibration { alpha: dep.alpha, gamma: dep.gamma, rows })
}

#[derive(Serialize)]
struct BlockView {
    kind: &'static str,
    start: usize,
    end: usize,
}

#[derive(Serialize)]
struct PanelView {
    t_level: f64,
    r_level: f64,
    t: Vec<f64>,
    exceedances: Vec<usize>,
    blocks: Vec<BlockView>,
    large_blocks_hit: usize,
    within_kappa_pairs: usize,
    event_f: bool,
    expected_exceedances: f64,
}

/// One simulated panel of flat `κ`-dependent normal rows, its statistics
/// `T_i`, the level (`t` when positive, else `t_min(η)`) and the block
/// layout at that level.
pub fn panel_json(p: usize, n: usize, kappa: usize, rho: f64, eta: f64, t: f64, seed: u64) -> Result<String, String> {
    if p == 0 || p > MAX_VIEW_P || n < 2 || p * n > MAX_VIEW_CELLS {
        return Err(format!("need 1 ≤ p ≤ {MAX_VIEW_P}, n ≥ 2 and p·n ≤ {MAX_VIEW_CELLS}"));
    }
    let model = if kappa == 0 { DependenceModel::Iid } else { DependenceModel::flat_kdep(kappa, rho) };
    let spec = PanelSpec::new(p, n, model, InnovationLaw::StandardNormal).with_seed(seed);
    let gen = PanelGenerator::new(spec).map_err(|e| e.to_string())?;
    let gamma = dependence_summary(rho.max(0.0)).map_err(|e| e.to_string())?.gamma;
    let t_level = if t > 0.0 {
        t
    } else {
        threshold_regime(p.max(3) as u64, eta, gamma, ThresholdVariant::Standard).map_err(|e| e.to_string())?.t_min
    };
    let stats_t: Vec<f64> = gen.moments(0).iter().enumerate().map(|(i, m)| studentize_moments(i, m).t).collect();
    let (indices, values): (Vec<usize>, Vec<f64>) =
        stats_t.iter().enumerate().filter(|(_, &x)| x > t_level).map(|(i, &x)| (i, x)).unzip();
    let r_level = t_level_to_r_level(t_level, n);
    let scheme = block_scheme(p, kappa, r_level).map_err(|e| e.to_string())?;
    let exc = ExceedanceSet { level: t_level, p, indices, values };
    let stats = cluster_stats(&exc, &scheme).map_err(|e| e.to_string())?;
    let blocks = scheme
        .blocks()
        .into_iter()
        .map(|b| BlockView {
            kind: match b.kind {
                BlockKind::Large => "large",
                BlockKind::Small => "small",
                BlockKind::Fragment => "fragment",
            },
            start: b.range.start,
            end: b.range.end,
        })
        .collect();
    let q = MarginalLaw::ExactStudentized { n }.sf(t_level);
    json(&PanelView {
        t_level,
        r_level,
        t: stats_t,
        exceedances: exc.indices,
        blocks,
        large_blocks_hit: stats.large_blocks_hit,
        within_kappa_pairs: stats.within_kappa_pairs,
        event_f: stats.event_f,
        expected_exceedances: p as f64 * q,
    })
}

#[derive(Serialize)]
struct CouplingView {
    m: usize,
    bound: f64,
    realized: f64,
    realized_se: f64,
    draws: u64,
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}

/// Shared-uniform coupling of two block-hit vectors given as comma lists.
pub fn coupling_json(pi: &str, pi_prime: &str, draws: u64, seed: u64) -> Result<String, String> {
    let (a, b) = (parse_list(pi)?, parse_list(pi_prime)?);
    if draws == 0 || draws > 2_000_000 {
        return Err("draws must lie in 1..=2000000".into());
    }
    let hit = shared_uniform_match(&a, &b, draws, seed).map_err(|e| e.to_string())?;
    json(&CouplingView { m: a.len(), bound: coupling_bound(&a, &b), realized: hit.estimate(), realized_se: hit.se(), draws })
}

#[wasm_bindgen]
pub fn calibration(rho_max: f64, eta: f64, n: usize, log10_p_max: f64, points: usize) -> Result<String, JsError> {
    calibration_json(rho_max, eta, n, log10_p_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn panel(p: usize, n: usize, kappa: usize, rho: f64, eta: f64, t: f64, seed: u64) -> Result<String, JsError> {
    panel_json(p, n, kappa, rho, eta, t, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn coupling(pi: &str, pi_prime: &str, draws: u64, seed: u64) -> Result<String, JsError> {
    coupling_json(pi, pi_prime, draws, seed).map_err(|e| JsError::new(&e))
}
