use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::ExceedanceSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    Large,
    Small,
    /// Trailing incomplete block.
    Fragment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    /// Position among blocks of the same kind.
    pub number: usize,
    /// Zero-based, half-open.
    pub range: Range<usize>,
}

/// Alternating large blocks of length `ell` and small blocks of length
/// `kappa + 1`, starting with a large block and cut off at `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockScheme {
    pub p: usize,
    pub kappa: usize,
    pub ell: usize,
    /// Number of complete large blocks.
    pub m: usize,
}

/// Scheme with `ℓ = max(κ + 2, ⌈exp(s²/4)⌉)`.
pub fn block_scheme(p: usize, kappa: usize, s: f64) -> Result<BlockScheme> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::arg(format!("block level must be positive and finite, got {s}")));
    }
    let raw = (s * s / 4.0).exp().ceil();
    // Saturating cast; anything past p only means no complete large block.
    let ell = (raw as usize).max(kappa + 2);
    BlockScheme::with_ell(p, kappa, ell)
}

impl BlockScheme {
    pub fn with_ell(p: usize, kappa: usize, ell: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::arg("block scheme needs p ≥ 1"));
        }
        if ell <= kappa + 1 {
            return Err(Error::arg(format!("large blocks (ℓ = {ell}) must be longer than small ones ({})", kappa + 1)));
        }
        let period = ell.saturating_add(kappa + 1);
        let m = p / period + usize::from(p % period >= ell);
        Ok(Self { p, kappa, ell, m })
    }

    pub fn period(&self) -> usize {
        self.ell.saturating_add(self.kappa + 1)
    }

    /// The block holding index `i`.
    pub fn locate(&self, i: usize) -> (BlockKind, usize) {
        let period = self.period();
        let (q, r) = (i / period, i % period);
        let start = q * period;
        if r < self.ell {
            if start + self.ell <= self.p {
                (BlockKind::Large, q)
            } else {
                (BlockKind::Fragment, 0)
            }
        } else if start + period <= self.p {
            (BlockKind::Small, q)
        } else {
            (BlockKind::Fragment, 0)
        }
    }

    pub fn fragment(&self) -> Option<Range<usize>> {
        let period = self.period();
        let whole = self.p / period * period;
        let rest = self.p - whole;
        if rest == 0 || rest == self.ell {
            None
        } else if rest < self.ell {
            Some(whole..self.p)
        } else {
            Some(whole + self.ell..self.p)
        }
    }

    pub fn blocks(&self) -> Vec<Block> {
        let period = self.period();
        let mut out = Vec::new();
        let mut q = 0;
        while q * period < self.p {
            let start = q * period;
            if start + self.ell > self.p {
                break;
            }
            out.push(Block { kind: BlockKind::Large, number: q, range: start..start + self.ell });
            if start + period > self.p {
                break;
            }
            out.push(Block { kind: BlockKind::Small, number: q, range: start + self.ell..start + period });
            q += 1;
        }
        if let Some(range) = self.fragment() {
            out.push(Block { kind: BlockKind::Fragment, number: 0, range });
        }
        out
    }
}

/// Counting summary of one exceedence set under a block scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub total: usize,
    /// Large blocks with at least one exceedence.
    pub large_blocks_hit: usize,
    /// Large blocks with at least two.
    pub large_blocks_multi: usize,
    /// Exceedences in small blocks, plus those in a fragment shorter than
    /// `κ + 1`.
    pub small_block_hits: usize,
    /// Exceedences anywhere in the fragment.
    pub fragment_hits: usize,
    pub max_in_block: usize,
    /// Consecutive exceedences at distance at most `κ`.
    pub within_kappa_pairs: usize,
    /// Longest run of adjacent indices.
    pub longest_run: usize,
    pub min_gap: Option<usize>,
    /// No small-block or fragment exceedence and at most one per large block.
    pub event_f: bool,
}

pub fn cluster_stats(exc: &ExceedanceSet, scheme: &BlockScheme) -> Result<ClusterStats> {
    if exc.p != scheme.p {
        return Err(Error::arg(format!("exceedences over p = {} but scheme over p = {}", exc.p, scheme.p)));
    }
    let short_fragment = scheme.fragment().is_some_and(|r| r.len() < scheme.kappa + 1);
    let mut s = ClusterStats { total: exc.len(), ..Default::default() };
    let mut current: Option<(BlockKind, usize)> = None;
    let mut in_block = 0;
    let mut run = 0;
    let mut prev: Option<usize> = None;
    let close = |kind: Option<(BlockKind, usize)>, count: usize, s: &mut ClusterStats| {
        if let Some((BlockKind::Large, _)) = kind {
            s.large_blocks_hit += usize::from(count >= 1);
            s.large_blocks_multi += usize::from(count >= 2);
        }
        s.max_in_block = s.max_in_block.max(count);
    };
    for &i in &exc.indices {
        let block = scheme.locate(i);
        if current != Some(block) {
            close(current, in_block, &mut s);
            current = Some(block);
            in_block = 0;
        }
        in_block += 1;
        match block.0 {
            BlockKind::Small => s.small_block_hits += 1,
            BlockKind::Fragment => {
                s.fragment_hits += 1;
                if short_fragment {
                    s.small_block_hits += 1;
                }
            }
            BlockKind::Large => {}
        }
        match prev {
            Some(j) => {
                let gap = i - j;
                s.min_gap = Some(s.min_gap.map_or(gap, |g| g.min(gap)));
                s.within_kappa_pairs += usize::from(gap <= scheme.kappa);
                run = if gap == 1 { run + 1 } else { 1 };
            }
            None => run = 1,
        }
        s.longest_run = s.longest_run.max(run);
        prev = Some(i);
    }
    close(current, in_block, &mut s);
    s.event_f = s.small_block_hits == 0 && s.fragment_hits == 0 && s.large_blocks_multi == 0;
    Ok(s)
}
