use std::collections::HashMap;

use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::numerics::{any_exceedence_prob, MarginalLaw};
use crate::panelgen::{DependenceModel, InnovationLaw, PanelGenerator, PanelSpec};
use crate::studentize::{studentize_panel, StudentizedRow};

fn rows_from(t: &[f64]) -> Vec<StudentizedRow> {
    t.iter()
        .enumerate()
        .map(|(index, &t)| StudentizedRow { index, mean: 0.0, scale: 1.0, t, r: t, degenerate: false })
        .collect()
}

#[test]
fn threshold_examples() {
    let law = MarginalLaw::student_for(100);
    let b = bin_thresholds(100, 1.0, 3, &law, 0.0).unwrap();
    assert!((b.thresholds[0] - 2.3646).abs() < 1e-4, "{}", b.thresholds[0]);
    assert!(b.thresholds.windows(2).all(|w| w[0] > w[1]));
    let big = bin_thresholds(1_000_000, 1.0, 1, &law, 0.0).unwrap();
    assert!((big.thresholds[0] - 5.052).abs() < 1e-3);
    for j in 0..3 {
        let upper = if j == 0 { 0.0 } else { law.sf(b.thresholds[j - 1]) };
        assert!((law.sf(b.thresholds[j]) - upper - 0.01).abs() < 1e-12);
    }
    let flagged = bin_thresholds(100, 1.0, 3, &law, b.thresholds[1]).unwrap();
    assert_eq!(flagged.valid, vec![true, true, false]);
    assert!(bin_thresholds(100, 50.0, 2, &law, 0.0).is_err());
    assert!(bin_thresholds(100, 0.0, 2, &law, 0.0).is_err());
}

#[test]
fn count_examples() {
    let law = MarginalLaw::Normal;
    let b = bin_thresholds(5, 0.5, 3, &law, 0.0).unwrap();
    let c = bin_counts(&rows_from(&[0.0; 5]), &b).unwrap();
    assert_eq!(c, BinCounts { counts: vec![0, 0, 0], remainder: 5 });
    let c = bin_counts(&rows_from(&[f64::INFINITY, 0.0, 0.0, 0.0, 0.0]), &b).unwrap();
    assert_eq!(c.counts, vec![1, 0, 0]);
    // Intervals are (t_j, t_{j−1}]: a value equal to t_1 lands in bin 2.
    let t = &b.thresholds;
    let c = bin_counts_values(&[t[0], t[1], t[2], t[0] + 1e-9, -1.0], &b).unwrap();
    assert_eq!(c, BinCounts { counts: vec![1, 1, 1], remainder: 2 });
    assert!(bin_counts_values(&[1.0], &b).is_err());
}

#[test]
fn multinomial_pmf_sums_to_one() {
    let q = [0.1, 0.05, 0.2];
    let mut total = 0.0;
    for a in 0..=6usize {
        for b in 0..=6 - a {
            for c in 0..=6 - a - b {
                total += multinomial_pmf(6, &q, &[a, b, c]);
            }
        }
    }
    assert!((total - 1.0).abs() < 1e-12);
    assert!((multinomial_pmf(2, &[0.5], &[1]) - 0.5).abs() < 1e-15);
    assert!((multinomial_pmf(3, &[0.2, 0.8], &[1, 2]) - 3.0 * 0.2 * 0.64).abs() < 1e-14);
}

fn bin_count_sample(p: usize, n: usize, beta: f64, k: usize, reps: u64, seed: u64) -> (BinSpec, HashMap<Vec<usize>, u64>) {
    let law = MarginalLaw::ExactStudentized { n };
    let bins = bin_thresholds(p, beta, k, &law, 0.0).unwrap();
    let gen = PanelGenerator::new(PanelSpec::new(p, n, DependenceModel::Iid, InnovationLaw::StandardNormal).with_seed(seed))
        .unwrap();
    let mut freq = HashMap::new();
    for r in 0..reps {
        let rows: Vec<StudentizedRow> = gen
            .moments(r)
            .iter()
            .enumerate()
            .map(|(i, m)| crate::studentize::studentize_moments(i, m))
            .collect();
        *freq.entry(bin_counts(&rows, &bins).unwrap().counts).or_insert(0) += 1;
    }
    (bins, freq)
}

#[test]
fn independent_counts_pass_chi_square() {
    let (p, k, reps) = (200, 3, 10_000u64);
    let (bins, freq) = bin_count_sample(p, 20, 2.0, k, reps, 5);
    let q = vec![bins.bin_probability(); k];
    let mut stat = 0.0;
    let mut cells = 0;
    let (mut pooled_obs, mut kept_exp) = (0.0, 0.0);
    let max_total = 16;
    let mut seen = 0u64;
    for a in 0..=max_total {
        for b in 0..=max_total - a {
            for c in 0..=max_total - a - b {
                let key = vec![a, b, c];
                let expected = reps as f64 * multinomial_pmf(p, &q, &key);
                let observed = *freq.get(&key).unwrap_or(&0) as f64;
                seen += observed as u64;
                if expected >= 5.0 {
                    stat += (observed - expected).powi(2) / expected;
                    kept_exp += expected;
                    cells += 1;
                } else {
                    pooled_obs += observed;
                }
            }
        }
    }
    pooled_obs += (reps - seen) as f64;
    // Everything else, including totals above the enumeration, is one cell.
    let pooled_exp = reps as f64 - kept_exp;
    stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
    let df = cells as f64;
    // Wilson–Hilferty 99% point of χ²_df.
    let z = 2.326347874040841;
    let h = 2.0 / (9.0 * df);
    let critical = df * (1.0 - h + z * h.sqrt()).powi(3);
    assert!(stat < critical, "chi-square {stat} vs {critical} on {df} df");
}

#[test]
fn small_instance_tv_distance() {
    let (p, k, reps) = (50, 3, 20_000u64);
    let (bins, freq) = bin_count_sample(p, 10, 1.0, k, reps, 9);
    let q = vec![bins.bin_probability(); k];
    let mut tv = 0.0;
    let (mut covered, mut covered_emp) = (0.0, 0.0);
    // Expected TV of an exact multinomial sample of this size.
    let mut floor = 0.0;
    for a in 0..=10usize {
        for b in 0..=10 - a {
            for c in 0..=10 - a - b {
                let key = vec![a, b, c];
                let exact = multinomial_pmf(p, &q, &key);
                let emp = *freq.get(&key).unwrap_or(&0) as f64 / reps as f64;
                covered += exact;
                covered_emp += emp;
                floor += (2.0 * exact * (1.0 - exact) / (std::f64::consts::PI * reps as f64)).sqrt();
                tv += (exact - emp).abs();
            }
        }
    }
    assert!(covered > 0.999);
    tv += ((1.0 - covered) - (1.0 - covered_emp)).abs();
    assert!(0.5 * tv < 1.5 * 0.5 * floor, "TV {} vs noise floor {}", 0.5 * tv, 0.5 * floor);
}

#[test]
fn bh_examples() {
    let r = bh_fdr(&[0.001, 0.02, 0.03, 0.9], 0.05).unwrap();
    assert_eq!(r.rejected, vec![0, 1, 2]);
    assert!(bh_fdr(&[1.0; 5], 0.05).unwrap().rejected.is_empty());
    assert_eq!(bh_fdr(&[0.04], 0.05).unwrap().rejected, vec![0]);
    assert!(bh_fdr(&[0.06], 0.05).unwrap().rejected.is_empty());
    // Step-up: a late success rescues earlier p-values above their own line.
    assert_eq!(bh_fdr(&[0.04, 0.04], 0.05).unwrap().rejected, vec![0, 1]);
    assert!(bh_fdr(&[0.5], 1.5).is_err());
    assert!(bh_fdr(&[1.5], 0.1).is_err());
}

#[test]
fn stepdown_examples() {
    assert!((JointModel::Independence.joint_exceedance(0.01, 2) - 1e-4).abs() < 1e-18);
    let law = MarginalLaw::Normal;
    let mut t = vec![0.1; 100];
    t[37] = 8.0;
    let r = stepdown_fwer(&rows_from(&t), 0.05, &law, JointModel::Independence).unwrap();
    assert_eq!(r.rejected, vec![37]);
    // At a level just above its marginal p-value, still exactly one.
    let a = (r.p_values[37] * 200.0).min(0.5);
    assert_eq!(stepdown_fwer(&rows_from(&t), a, &law, JointModel::Independence).unwrap().rejected, vec![37]);
    // Ties resolve by index.
    assert_eq!(stepdown_select(vec![(3, 0.001), (1, 0.001)], 2, 0.05), vec![1, 3]);
}

#[test]
fn degenerate_rows_flow_through() {
    let pv = p_values(&rows_from(&[f64::INFINITY, f64::NEG_INFINITY, 1.0]), &MarginalLaw::Normal);
    assert_eq!(pv[0], 0.0);
    assert_eq!(pv[1], 1.0);
    assert!((pv[2] - crate::numerics::normal_sf(1.0)).abs() < 1e-15);
}

#[test]
fn report_scoring_and_json() {
    let mut r = bh_fdr(&[0.001, 0.02, 0.03, 0.9], 0.05).unwrap();
    assert!(realized_error_rates(std::slice::from_ref(&r)).is_err());
    r.score(&[true, false, false, true]).unwrap();
    assert_eq!(r.false_rejections, Some(1));
    assert!((r.fdp.unwrap() - 1.0 / 3.0).abs() < 1e-15);
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"schema\":\"tailind.decision/1\""));
    let back: DecisionReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert!(r.score(&[true]).is_err());

    let mut none = bh_fdr(&[1.0; 3], 0.05).unwrap();
    none.score(&[true; 3]).unwrap();
    let rates = realized_error_rates(&[none]).unwrap();
    assert_eq!((rates.fwer_estimate, rates.fdr), (0.0, 0.0));
}

#[test]
fn single_threshold_fwer_matches_binomial() {
    let (p, n, reps) = (100, 20, 5000u64);
    let law = MarginalLaw::ExactStudentized { n };
    let t = law.upper_quantile(5e-4);
    let gen = PanelGenerator::new(PanelSpec::new(p, n, DependenceModel::Iid, InnovationLaw::StandardNormal).with_seed(4))
        .unwrap();
    let mut acc = ErrorRateAccumulator::default();
    for r in 0..reps {
        let rows = studentize_panel(&gen.generate(r)).unwrap();
        let mut report = single_threshold(&rows, t, &law).unwrap();
        report.score(&vec![true; p]).unwrap();
        acc.add(report.rejected.len(), report.false_rejections.unwrap());
    }
    let rates = acc.finish();
    let reference = any_exceedence_prob(p as f64, 5e-4);
    assert!((rates.fwer_estimate - reference).abs() < 4.0 * rates.fwer_se, "{} vs {reference}", rates.fwer_estimate);
    assert_eq!(rates.fwer_estimate, rates.fdr);
}

#[test]
fn operative_thresholds_and_phi() {
    let law = MarginalLaw::student_for(100);
    let rows = rows_from(&[0.0; 1000]);
    let mut r = bh_fdr_rows(&rows, 0.1, &law).unwrap();
    let t = r.operative_threshold.unwrap();
    assert!((law.sf(t) - 1e-4).abs() < 1e-12);
    r.attach_phi(1.225);
    assert!(r.phi_nominal.unwrap() > 0.0);
    let s = stepdown_fwer(&rows, 0.05, &law, JointModel::Independence).unwrap();
    assert!(s.operative_threshold.unwrap() > t);
    assert!(matches!(bh_fdr(&[0.1], 0.0), Err(Error::InvalidArgument(_))));
}

proptest! {
    #[test]
    fn bh_is_monotone_in_q(p in prop::collection::vec(0.0f64..1.0, 1..80), q1 in 0.001f64..0.5, dq in 0.0f64..0.4) {
        let small = bh_fdr(&p, q1).unwrap().rejected;
        let large = bh_fdr(&p, q1 + dq).unwrap().rejected;
        prop_assert!(small.iter().all(|i| large.contains(i)));
    }

    #[test]
    fn stepdown_dominates_bonferroni(t in prop::collection::vec(-2.0f64..6.0, 1..80), a in 0.001f64..0.3) {
        let law = MarginalLaw::Normal;
        let rows = rows_from(&t);
        let step = stepdown_fwer(&rows, a, &law, JointModel::Independence).unwrap();
        let m = t.len() as f64;
        for (i, &pv) in step.p_values.iter().enumerate() {
            if pv <= a / m {
                prop_assert!(step.rejected.contains(&i));
            }
        }
    }

    #[test]
    fn bin_counts_conserve(t in prop::collection::vec(-3.0f64..6.0, 20..60)) {
        let bins = bin_thresholds(t.len(), 1.0, 4, &MarginalLaw::Normal, 0.0).unwrap();
        let c = bin_counts_values(&t, &bins).unwrap();
        prop_assert_eq!(c.counts.iter().sum::<usize>() + c.remainder, t.len());
    }
}
