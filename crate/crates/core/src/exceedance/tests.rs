use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::montecarlo::Proportion;
use crate::numerics::{bivariate_normal_tail, phi_bound, studentized_normal_sf};
use crate::panelgen::{generate, DependenceModel, InnovationLaw, PanelSpec};
use crate::studentize::{r_level_to_t_level, studentize_panel, t_level_to_r_level, StudentizedRow};

fn rows_from(t: &[f64]) -> Vec<StudentizedRow> {
    t.iter()
        .enumerate()
        .map(|(index, &t)| StudentizedRow { index, mean: 0.0, scale: 1.0, t, r: t, degenerate: false })
        .collect()
}

fn set(p: usize, indices: &[usize]) -> ExceedanceSet {
    ExceedanceSet { level: 0.0, p, indices: indices.to_vec(), values: vec![1.0; indices.len()] }
}

#[test]
fn extract_examples() {
    let e = extract(&rows_from(&[0.5, 3.1, 0.2]), 3.0);
    assert_eq!(e.indices, vec![1]);
    assert_eq!(e.values, vec![3.1]);
    assert!(extract(&rows_from(&[0.5, 3.1, 0.2]), 3.2).is_empty());
    let mut rows = rows_from(&[f64::INFINITY, 1.0, f64::NEG_INFINITY]);
    rows[1].degenerate = true;
    assert_eq!(extract(&rows, 1e6).indices, vec![0]);
    assert_eq!(extract(&rows, 0.99).indices, vec![0, 1]);
    assert_eq!(extract(&rows, 1.0).indices, vec![0]);
    assert_eq!(extract_values(&[0.5, 3.1, 0.2], 0.4).indices, vec![0, 1]);
}

#[test]
fn t_and_r_extraction_agree() {
    let n = 25;
    let spec = PanelSpec::new(100_000, n, DependenceModel::flat_kdep(3, 0.2), InnovationLaw::StandardizedPareto { tail_exponent: 4.0 })
        .with_seed(5);
    let rows = studentize_panel(&generate(&spec).unwrap()).unwrap();
    for t in [0.5, 1.5, 2.5, 3.5, 4.5] {
        let a = extract(&rows, t);
        let b = extract_r(&rows, t_level_to_r_level(t, n));
        assert_eq!(a.indices, b.indices, "level {t}");
        assert!(t > 4.0 || !a.is_empty());
    }
}

#[test]
fn block_examples() {
    let s = block_scheme(1000, 2, 4.0).unwrap();
    assert_eq!(s.ell, 55);
    let s = block_scheme(120, 2, 4.0).unwrap();
    let blocks = s.blocks();
    let spans: Vec<(BlockKind, std::ops::Range<usize>)> = blocks.iter().map(|b| (b.kind, b.range.clone())).collect();
    assert_eq!(
        spans,
        vec![
            (BlockKind::Large, 0..55),
            (BlockKind::Small, 55..58),
            (BlockKind::Large, 58..113),
            (BlockKind::Small, 113..116),
            (BlockKind::Fragment, 116..120),
        ]
    );
    assert_eq!(blocks[1].range.len(), 3);
    assert_eq!(s.m, 2);
    // Small levels hit the ℓ floor.
    assert_eq!(block_scheme(100, 5, 0.1).unwrap().ell, 7);
    assert!(block_scheme(100, 2, 0.0).is_err());
}

#[test]
fn cluster_examples() {
    let scheme = block_scheme(120, 2, 4.0).unwrap();
    let empty = cluster_stats(&set(120, &[]), &scheme).unwrap();
    assert_eq!(empty, ClusterStats { event_f: true, ..Default::default() });

    let pair = cluster_stats(&set(120, &[2, 3]), &scheme).unwrap();
    assert_eq!((pair.total, pair.large_blocks_hit, pair.large_blocks_multi), (2, 1, 1));
    assert_eq!((pair.within_kappa_pairs, pair.longest_run, pair.min_gap), (1, 2, Some(1)));
    assert!(!pair.event_f);

    let spread = cluster_stats(&set(120, &[0, 60]), &scheme).unwrap();
    assert!(spread.event_f);
    assert_eq!(spread.large_blocks_hit, 2);

    let small = cluster_stats(&set(120, &[56]), &scheme).unwrap();
    assert_eq!(small.small_block_hits, 1);
    assert!(!small.event_f);

    let frag = cluster_stats(&set(120, &[118]), &scheme).unwrap();
    assert_eq!((frag.fragment_hits, frag.small_block_hits), (1, 0));
    assert!(!frag.event_f);

    // A fragment shorter than κ + 1 counts with the small blocks.
    let short = block_scheme(114, 2, 4.0).unwrap();
    assert_eq!(short.fragment(), Some(113..114));
    let s = cluster_stats(&set(114, &[113]), &short).unwrap();
    assert_eq!((s.fragment_hits, s.small_block_hits), (1, 1));

    assert!(cluster_stats(&set(100, &[]), &scheme).is_err());
}

#[test]
fn event_f_failure_tracks_phi() {
    let (p, n, reps) = (4000, 100, 300);
    let spec = PanelSpec::new(p, n, DependenceModel::flat_kdep(3, 0.1), InnovationLaw::StandardNormal).with_seed(77);
    let gen = crate::panelgen::PanelGenerator::new(spec).unwrap();
    let levels = [3.6, 4.0, 4.4];
    let mut fails = [Proportion::default(); 3];
    for r in 0..reps {
        let rows = studentize_panel(&gen.generate(r)).unwrap();
        for (k, &t) in levels.iter().enumerate() {
            let s = t_level_to_r_level(t, n);
            let scheme = block_scheme(p, 3, s).unwrap();
            let stats = cluster_stats(&extract(&rows, t), &scheme).unwrap();
            fails[k].record(!stats.event_f);
        }
    }
    for (k, &t) in levels.iter().enumerate() {
        let phi = phi_bound(t, p as f64, 1.0 + 0.25 * 0.9).phi_nominal;
        assert!(fails[k].estimate() <= phi + 3.0 * fails[k].se().max(1.0 / reps as f64), "t {t}: {:?} vs {phi}", fails[k]);
    }
}

#[test]
fn single_tail_matches_exact_law() {
    let n = 400;
    let spec = PanelSpec::new(1, n, DependenceModel::Iid, InnovationLaw::StandardNormal).with_seed(2);
    let est = tail_probability_single(&spec, 0, 2.0, 200_000, 1).unwrap();
    let exact = studentized_normal_sf(r_level_to_t_level(2.0, n), n);
    assert!((est.estimate - exact).abs() < 4.0 * est.se, "{} vs {exact}", est.estimate);
    assert!(est.ci.0 < est.estimate && est.estimate < est.ci.1);
    assert!(est.exponent > 0.0);

    let half = tail_probability_single(&spec, 0, 0.0, 20_000, 1).unwrap();
    assert!((half.estimate - 0.5).abs() < 4.0 * half.se);
}

#[test]
fn offset_raises_single_tail() {
    let base = PanelSpec::new(1, 100, DependenceModel::Iid, InnovationLaw::StandardNormal).with_seed(8);
    let shifted = base.clone().with_offsets(vec![(0, 0.2)]);
    let a = tail_probability_single(&base, 0, 2.0, 20_000, 1).unwrap();
    let b = tail_probability_single(&shifted, 0, 2.0, 20_000, 1).unwrap();
    assert!(b.estimate > a.estimate + 4.0 * (a.se + b.se), "{} vs {}", b.estimate, a.estimate);
}

#[test]
fn hit_guard() {
    let spec = PanelSpec::new(3, 50, DependenceModel::Iid, InnovationLaw::StandardNormal);
    match tail_probability_single(&spec, 0, 4.0, 1000, 1) {
        Err(Error::InsufficientReplicates { guard, required, .. }) => {
            assert_eq!(guard, "expected-hits");
            assert!(required > 1_000_000);
        }
        other => panic!("{other:?}"),
    }
    assert!(tail_probability_single(&spec, 5, 1.0, 1000, 1).is_err());
}

#[test]
fn pair_tails() {
    let n = 400;
    let spec = PanelSpec::new(3, n, DependenceModel::flat_kdep(1, 0.5), InnovationLaw::StandardNormal).with_seed(13);
    let survey = tail_survey(&spec, 2.5, &[0], &[(0, 1)], 300_000, 1).unwrap();
    let near = survey.pairs[0];
    let oracle = bivariate_normal_tail(2.5, 0.5).unwrap();
    // Finite n leaves a small bias; 4 SE keeps this check robust.
    assert!((near.pair.estimate - oracle).abs() < 4.0 * near.pair.se, "{} vs {oracle}", near.pair.estimate);
    assert_eq!(survey.singles[0].1, near.first);
    assert!(near.pair.exponent > near.first.exponent);

    let short = PanelSpec::new(3, 100, DependenceModel::flat_kdep(1, 0.5), InnovationLaw::StandardNormal).with_seed(14);
    let far = tail_probability_pair(&short, 0, 2, 2.0, 200_000, 1).unwrap();
    assert!((far.pair.estimate - far.product).abs() < 4.0 * far.combined_se);

    let indep = PanelSpec::new(2, 30, DependenceModel::Iid, InnovationLaw::StandardNormal).with_seed(1);
    let quarter = tail_probability_pair(&indep, 0, 1, 0.0, 20_000, 1).unwrap();
    assert!((quarter.pair.estimate - 0.25).abs() < 4.0 * quarter.pair.se);
}

#[test]
fn coupling_examples() {
    let pi = [0.1, 0.2, 0.05];
    assert_eq!(coupling_bound(&pi, &pi), 1.0);
    assert_eq!(shared_uniform_match(&pi, &pi, 1000, 1).unwrap().estimate(), 1.0);

    let (a, b) = ([0.1, 0.2], [0.15, 0.2]);
    assert!((coupling_bound(&a, &b) - 0.95).abs() < 1e-15);
    let m = shared_uniform_match(&a, &b, 100_000, 3).unwrap();
    assert!(m.estimate() >= 0.95 - 3.0 * m.se());
    assert!((m.estimate() - 0.95).abs() < 4.0 * m.se());

    assert!(shared_uniform_match(&a, &pi, 10, 1).is_err());
    assert!(shared_uniform_match(&[1.5], &[0.5], 10, 1).is_err());
}

#[test]
fn coupling_bound_tightens_with_level() {
    let (p, n) = (300, 40);
    let spec = PanelSpec::new(p, n, DependenceModel::flat_kdep(2, 0.3), InnovationLaw::StandardNormal).with_seed(21);
    let opts = CouplingOptions { se_cap: 0.05, draws: 20_000, jobs: 1 };
    let mut bounds = Vec::new();
    for s in [1.5, 2.5, 3.5] {
        let scheme = block_scheme(p, 2, s).unwrap();
        let est = coupling_estimate(&spec, &scheme, s, 400, opts).unwrap();
        assert!(est.realized.estimate() >= est.bound - 3.0 * est.realized.se());
        bounds.push(est.bound);
    }
    assert!(bounds[2] > bounds[0], "{bounds:?}");
    assert!(bounds[2] > 0.9, "{bounds:?}");

    let scheme = block_scheme(p, 2, 2.0).unwrap();
    let tight = CouplingOptions { se_cap: 0.001, ..opts };
    assert!(matches!(
        coupling_estimate(&spec, &scheme, 2.0, 400, tight),
        Err(Error::InsufficientReplicates { guard: "coupling-se-cap", .. })
    ));
}

proptest! {
    #[test]
    fn extraction_is_exact(values in prop::collection::vec(-5.0f64..5.0, 0..60), level in -3.0f64..3.0, higher in 0.0f64..2.0) {
        let e = extract_values(&values, level);
        prop_assert!(e.indices.windows(2).all(|w| w[0] < w[1]));
        for (i, v) in values.iter().enumerate() {
            prop_assert_eq!(e.indices.contains(&i), *v > level);
        }
        prop_assert_eq!(e.refine(level), e.clone());
        prop_assert_eq!(e.refine(level + higher), extract_values(&values, level + higher));
    }

    #[test]
    fn blocks_tile(p in 1usize..400, kappa in 0usize..6, s in 0.5f64..4.5) {
        let scheme = block_scheme(p, kappa, s).unwrap();
        let blocks = scheme.blocks();
        let mut next = 0;
        for b in &blocks {
            prop_assert_eq!(b.range.start, next);
            prop_assert!(!b.range.is_empty());
            next = b.range.end;
            for i in b.range.clone() {
                let (kind, number) = scheme.locate(i);
                prop_assert_eq!(kind, b.kind);
                if kind != BlockKind::Fragment {
                    prop_assert_eq!(number, b.number);
                }
            }
        }
        prop_assert_eq!(next, p);
        prop_assert_eq!(blocks.iter().filter(|b| b.kind == BlockKind::Large).count(), scheme.m);
    }

    #[test]
    fn cluster_counts_consistent(p in 10usize..300, kappa in 0usize..4, mask in prop::collection::vec(any::<bool>(), 300)) {
        let indices: Vec<usize> = (0..p).filter(|&i| mask[i]).collect();
        let scheme = block_scheme(p, kappa, 2.0).unwrap();
        let s = cluster_stats(&set(p, &indices), &scheme).unwrap();
        prop_assert!(s.large_blocks_multi <= s.large_blocks_hit && s.large_blocks_hit <= s.total);
        prop_assert!(s.max_in_block <= s.total && s.longest_run <= s.total);
        prop_assert_eq!(s.event_f, s.total == s.large_blocks_hit && s.fragment_hits == 0 && s.small_block_hits == 0);
    }

    #[test]
    fn coupling_bound_holds(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..30), seed in any::<u64>()) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let m = shared_uniform_match(&a, &b, 5_000, seed).unwrap();
        prop_assert!(m.estimate() >= coupling_bound(&a, &b) - 3.0 * m.se().max(1e-3));
    }
}
