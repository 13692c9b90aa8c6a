use rand::Rng;
use serde::{Deserialize, Serialize};

use super::blocks::{BlockKind, BlockScheme};
use crate::error::{Error, Result};
use crate::montecarlo::{for_each_replicate, Proportion};
use crate::numerics::normal_sf;
use crate::panelgen::{PanelGenerator, PanelSpec, RowMoments, Workspace};
use crate::rng::{stream, Purpose};
use crate::studentize::studentize_moments;

/// `1 − Σ_j |π_j − π'_j|`.
pub fn coupling_bound(pi: &[f64], pi_prime: &[f64]) -> f64 {
    1.0 - pi.iter().zip(pi_prime).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Realizes the shared-uniform coupling `draws` times: with one uniform
/// `V_j` per block, `N = #{V_j ≤ π_j}` and `N' = #{V_j ≤ π'_j}`. Returns how
/// often `N = N'`.
pub fn shared_uniform_match(pi: &[f64], pi_prime: &[f64], draws: u64, seed: u64) -> Result<Proportion> {
    if pi.len() != pi_prime.len() {
        return Err(Error::arg(format!("probability vectors differ in length ({} vs {})", pi.len(), pi_prime.len())));
    }
    if pi.iter().chain(pi_prime).any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::arg("block probabilities must lie in [0, 1]"));
    }
    let mut rng = stream(seed, 0, 0, Purpose::Auxiliary);
    let mut matched = Proportion::default();
    for _ in 0..draws {
        let (mut n, mut n_prime) = (0usize, 0usize);
        for (a, b) in pi.iter().zip(pi_prime) {
            let v: f64 = rng.random();
            n += usize::from(v <= *a);
            n_prime += usize::from(v <= *b);
        }
        matched.record(n == n_prime);
    }
    Ok(matched)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingOptions {
    /// Largest acceptable standard error of any block probability.
    pub se_cap: f64,
    /// Draws of the shared-uniform construction.
    pub draws: u64,
    pub jobs: usize,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self { se_cap: 0.01, draws: 100_000, jobs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingEstimate {
    pub s: f64,
    pub scheme: BlockScheme,
    pub reps: u64,
    /// Per large block, `P(some R_i > s in the block)` on dependent panels.
    pub pi: Vec<f64>,
    pub pi_se: Vec<f64>,
    /// The same on the matched independent panels.
    pub pi_independent: Vec<f64>,
    pub pi_independent_se: Vec<f64>,
    pub bound: f64,
    /// Realized `N = N'` frequency of the shared-uniform construction.
    pub realized: Proportion,
}

/// Estimates the block hit probabilities of dependent panels and of their
/// independent counterparts (same marginal law, fresh drivers per cell),
/// then evaluates the count-coupling bound and checks it by construction.
pub fn coupling_estimate(
    spec: &PanelSpec,
    scheme: &BlockScheme,
    s: f64,
    reps: u64,
    opts: CouplingOptions,
) -> Result<CouplingEstimate> {
    if scheme.p != spec.p {
        return Err(Error::arg(format!("scheme covers p = {} but the panel has p = {}", scheme.p, spec.p)));
    }
    if !(opts.se_cap > 0.0) {
        return Err(Error::arg("standard-error cap must be positive"));
    }
    let required = |worst: f64| (worst * (1.0 - worst) / (opts.se_cap * opts.se_cap)).ceil() as u64;
    // Large-n guide for the block hit probability.
    let guide = -f64::exp_m1(scheme.ell as f64 * (-normal_sf(s)).ln_1p());
    let need = required(guide.min(0.5));
    if reps < need {
        return Err(Error::InsufficientReplicates { guard: "coupling-se-cap", reps, required: need });
    }

    let m = scheme.m;
    let gen = PanelGenerator::new(spec.clone())?;
    let block_hits = |moments: &[RowMoments]| -> Vec<bool> {
        let mut hit = vec![false; m];
        for (i, mo) in moments.iter().enumerate() {
            if let (BlockKind::Large, b) = scheme.locate(i) {
                if !hit[b] && studentize_moments(i, mo).r > s {
                    hit[b] = true;
                }
            }
        }
        hit
    };
    let mut dep = vec![0u64; m];
    let mut ind = vec![0u64; m];
    for_each_replicate(
        reps,
        opts.jobs,
        |r, (ws, moments): &mut (Workspace, Vec<RowMoments>)| {
            gen.moments_into(r, false, ws, moments);
            let a = block_hits(moments);
            gen.moments_into(r, true, ws, moments);
            (a, block_hits(moments))
        },
        |_, (a, b)| {
            for (k, (&x, &y)) in a.iter().zip(&b).enumerate() {
                dep[k] += x as u64;
                ind[k] += y as u64;
            }
        },
    )?;
    let to_pi = |counts: &[u64]| -> (Vec<f64>, Vec<f64>) {
        counts
            .iter()
            .map(|&c| {
                let h = Proportion::new(c, reps);
                (h.estimate(), h.se())
            })
            .unzip()
    };
    let (pi, pi_se) = to_pi(&dep);
    let (pi_independent, pi_independent_se) = to_pi(&ind);
    let worst_se = pi_se.iter().chain(&pi_independent_se).copied().fold(0.0, f64::max);
    if worst_se > opts.se_cap {
        let worst = pi
            .iter()
            .chain(&pi_independent)
            .map(|&x| if x > 0.5 { 1.0 - x } else { x })
            .fold(0.0, f64::max);
        return Err(Error::InsufficientReplicates { guard: "coupling-se-cap", reps, required: required(worst) });
    }
    let bound = coupling_bound(&pi, &pi_independent);
    let realized = shared_uniform_match(&pi, &pi_independent, opts.draws, spec.seed)?;
    Ok(CouplingEstimate {
        s,
        scheme: *scheme,
        reps,
        pi,
        pi_se,
        pi_independent,
        pi_independent_se,
        bound,
        realized,
    })
}
