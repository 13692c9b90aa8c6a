//! Studentized statistics `T_i = √n Ū_i / S_i` and their transforms.
//!
//! The scale uses divisor `n`: `S_i² = n⁻¹ Σ_j U_ij² − Ū_i²`. The transformed
//! statistic `R_i = √n Ū_i / (n⁻¹ Σ_j U_ij²)^{1/2}` satisfies
//! `R_i = T_i / (1 + T_i²/n)^{1/2}`, so `T_i > t` exactly when
//! `R_i > t / (1 + t²/n)^{1/2}`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panelgen::{Panel, RowMoments, Weights};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudentizedRow {
    /// Zero-based row index.
    pub index: usize,
    pub mean: f64,
    pub scale: f64,
    pub t: f64,
    pub r: f64,
    /// `S_i = 0`: all-zero rows get `T = 1`, constant nonzero rows `±∞`.
    pub degenerate: bool,
}

/// Builds a row from its sufficient statistics. Rows whose variance is lost
/// to rounding (below `n·ε` relative to the second moment) count as
/// degenerate.
pub fn studentize_moments(index: usize, m: &RowMoments) -> StudentizedRow {
    let nf = m.n as f64;
    let mean = m.sum / nf;
    let m2 = m.sum_sq / nf;
    let var = m2 - mean * mean;
    let root_n = nf.sqrt();
    if m2 == 0.0 {
        return StudentizedRow { index, mean, scale: 0.0, t: 1.0, r: t_level_to_r_level(1.0, m.n), degenerate: true };
    }
    if var <= nf * f64::EPSILON * m2 {
        let sign = mean.signum();
        return StudentizedRow {
            index,
            mean,
            scale: 0.0,
            t: sign * f64::INFINITY,
            r: sign * root_n,
            degenerate: true,
        };
    }
    let scale = var.sqrt();
    StudentizedRow { index, mean, scale, t: root_n * mean / scale, r: root_n * mean / m2.sqrt(), degenerate: false }
}

fn row_moments(row: &[f64], weight: impl Fn(usize) -> f64) -> RowMoments {
    let mut m = RowMoments { n: row.len(), sum: 0.0, sum_sq: 0.0 };
    for (j, &u) in row.iter().enumerate() {
        let y = weight(j) * u;
        m.sum += y;
        m.sum_sq += y * y;
    }
    m
}

fn check_size(i: usize, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::arg(format!("row {} has {n} observations; at least 2 are required", i + 1)));
    }
    Ok(())
}

/// Studentizes a single sample.
pub fn studentize_row(index: usize, row: &[f64]) -> Result<StudentizedRow> {
    check_size(index, row.len())?;
    Ok(studentize_moments(index, &row_moments(row, |_| 1.0)))
}

/// One [`StudentizedRow`] per panel row. Row sizes follow the panel.
pub fn studentize_panel(panel: &Panel) -> Result<Vec<StudentizedRow>> {
    (0..panel.p).map(|i| studentize_row(i, panel.row(i))).collect()
}

/// Weighted statistics with `Ū_i = n_i⁻¹ Σ w_ij U_ij` and
/// `S_i² = n_i⁻¹ Σ w_ij² U_ij² − Ū_i²`. `sizes` overrides the panel's row
/// sizes when given. With unit weights the output equals
/// [`studentize_panel`] bit for bit.
pub fn weighted_studentize(panel: &Panel, weights: &Weights, sizes: Option<&[usize]>) -> Result<Vec<StudentizedRow>> {
    let size = |i: usize| sizes.map_or_else(|| panel.size(i), |s| s[i]);
    if let Some(s) = sizes {
        if s.len() != panel.p {
            return Err(Error::arg(format!("{} sizes given for {} rows", s.len(), panel.p)));
        }
        if let Some(i) = (0..panel.p).find(|&i| s[i] > panel.size(i)) {
            return Err(Error::arg(format!("row {} size {} exceeds the data", i + 1, s[i])));
        }
    }
    weights.check(panel.p, size)?;
    (0..panel.p)
        .map(|i| {
            let n = size(i);
            check_size(i, n)?;
            let row = &panel.row(i)[..n];
            Ok(studentize_moments(i, &row_moments(row, |j| weights.weight(i, j))))
        })
        .collect()
}

/// `R` recentred at a hypothesised mean `d`:
/// `√n (Ū − d) / (n⁻¹ Σ (U_j − d)²)^{1/2}`. Equals `R` at `d = 0`.
pub fn centered_r(m: &RowMoments, d: f64) -> f64 {
    let nf = m.n as f64;
    let mean = m.sum / nf - d;
    let m2 = (m.sum_sq - 2.0 * d * m.sum) / nf + d * d;
    if m2 <= 0.0 {
        return 0.0;
    }
    nf.sqrt() * mean / m2.sqrt()
}

/// `t / (1 + t²/n)^{1/2}`, the `R`-level matching level `t` for `T`.
pub fn t_level_to_r_level(t: f64, n: usize) -> f64 {
    if t.is_infinite() {
        return t.signum() * (n as f64).sqrt();
    }
    let nf = n as f64;
    t / (1.0 + t * t / nf).sqrt()
}

/// Inverse of [`t_level_to_r_level`] on `(−√n, √n)`; `±∞` at the ends.
pub fn r_level_to_t_level(r: f64, n: usize) -> f64 {
    let nf = n as f64;
    let rest = 1.0 - r * r / nf;
    if rest <= 0.0 {
        return r.signum() * f64::INFINITY;
    }
    r / rest.sqrt()
}

/// A level for `T` with its `R` equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub t: f64,
    pub n: usize,
    pub r: f64,
}

impl LevelSpec {
    pub fn new(t: f64, n: usize) -> Result<Self> {
        if !(t > 0.0) || n == 0 {
            return Err(Error::arg(format!("level needs t > 0 and n ≥ 1, got t = {t}, n = {n}")));
        }
        Ok(Self { t, n, r: t_level_to_r_level(t, n) })
    }
}

pub const CSV_SCHEMA: &str = "tailind.studentize/1";

/// Writes rows as CSV with one-based indices.
pub fn write_csv<W: Write>(rows: &[StudentizedRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "# schema: {CSV_SCHEMA}")?;
    writeln!(w, "i,mean,scale,T,R,degenerate")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{},{}", r.index + 1, r.mean, r.scale, r.t, r.r, r.degenerate)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::StudentT;
    use crate::panelgen::{generate, DependenceModel, InnovationLaw, PanelSpec, WeightBounds};
    use proptest::prelude::*;

    fn panel_of(rows: &[&[f64]]) -> Panel {
        let n = rows[0].len();
        Panel {
            p: rows.len(),
            n,
            sizes: None,
            seed: 0,
            replicate: 0,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
            spec: None,
        }
    }

    #[test]
    fn worked_rows() {
        let a = studentize_row(0, &[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert_eq!((a.mean, a.scale, a.t), (0.0, 1.0, 0.0));
        let b = studentize_row(0, &[1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(b.mean, 0.5);
        assert!((b.scale * b.scale - 0.75).abs() < 1e-15);
        assert!((b.t - 2.0 * 0.5 / 0.75f64.sqrt()).abs() < 1e-12);
        assert!((b.t - 1.154700538).abs() < 1e-9);
        let z = studentize_row(0, &[0.0; 4]).unwrap();
        assert!(z.degenerate);
        assert_eq!(z.t, 1.0);
        let c = studentize_row(0, &[-0.3; 7]).unwrap();
        assert!(c.degenerate && c.t == f64::NEG_INFINITY && c.r == -(7f64.sqrt()));
        assert!(studentize_row(0, &[1.0]).is_err());
    }

    #[test]
    fn weighted_examples() {
        let panel = panel_of(&[&[1.0, 1.0, 1.0, -1.0]]);
        let w = Weights::cyclic(vec![2.0], WeightBounds::default());
        let rows = weighted_studentize(&panel, &w, None).unwrap();
        let direct = studentize_row(0, &[2.0, 2.0, 2.0, -2.0]).unwrap();
        assert_eq!(rows[0].t, direct.t);
        assert!((rows[0].t - 1.154700538).abs() < 1e-9);

        let small = Weights::cyclic(vec![0.05], WeightBounds::default());
        match weighted_studentize(&panel, &small, None) {
            Err(Error::WeightConstraint { rows }) => assert_eq!(rows, vec![0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unit_weights_reduce_bitwise() {
        let spec = PanelSpec::new(50, 30, DependenceModel::flat_kdep(2, 0.2), InnovationLaw::StandardizedRademacher)
            .with_seed(12);
        let panel = generate(&spec).unwrap();
        let plain = studentize_panel(&panel).unwrap();
        let w = Weights::cyclic(vec![1.0], WeightBounds::default());
        let weighted = weighted_studentize(&panel, &w, None).unwrap();
        for (a, b) in plain.iter().zip(&weighted) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.r.to_bits(), b.r.to_bits());
        }
    }

    #[test]
    fn unequal_sizes() {
        let spec = PanelSpec::new(3, 6, DependenceModel::Iid, InnovationLaw::StandardNormal)
            .with_sizes(vec![6, 2, 4])
            .with_seed(3);
        let panel = generate(&spec).unwrap();
        let rows = studentize_panel(&panel).unwrap();
        let direct = studentize_row(1, panel.row(1)).unwrap();
        assert_eq!(rows[1], direct);
        let w = Weights::cyclic(vec![1.0], WeightBounds::default());
        assert!(weighted_studentize(&panel, &w, Some(&[6, 1, 4])).is_err());
        assert!(weighted_studentize(&panel, &w, Some(&[6, 3, 4])).is_err());
        let shorter = weighted_studentize(&panel, &w, Some(&[3, 2, 4])).unwrap();
        assert_eq!(shorter[0], studentize_row(0, &panel.row(0)[..3]).unwrap());
    }

    #[test]
    fn level_map() {
        assert!((t_level_to_r_level(2.0, 4) - 2f64.sqrt()).abs() < 1e-15);
        assert!(t_level_to_r_level(1e-9, 10) > 0.0 && t_level_to_r_level(1e-9, 10) < 1.1e-9);
        assert!((t_level_to_r_level(3.0, usize::MAX) - 3.0).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 1..2000 {
            let t = k as f64 * 0.01;
            let r = t_level_to_r_level(t, 50);
            assert!(r > prev && r < t.min(50f64.sqrt()));
            assert!((r_level_to_t_level(r, 50) - t).abs() < 1e-12 * t.max(1.0));
            prev = r;
        }
        let l = LevelSpec::new(2.0, 4).unwrap();
        assert!((l.r - 2f64.sqrt()).abs() < 1e-15);
        assert!(LevelSpec::new(0.0, 4).is_err());
    }

    #[test]
    fn transform_identity_on_simulated_rows() {
        let n = 20;
        let spec = PanelSpec::new(100_000, n, DependenceModel::MovingAverage { kappa: 3 }, InnovationLaw::StandardizedPareto { tail_exponent: 3.5 })
            .with_seed(31);
        let rows = studentize_panel(&generate(&spec).unwrap()).unwrap();
        let grid: Vec<f64> = (1..=40).map(|k| k as f64 * 0.15).collect();
        for row in rows.iter().filter(|r| !r.degenerate) {
            assert!((row.r - t_level_to_r_level(row.t, n)).abs() < 1e-12 * row.r.abs().max(1.0));
            for &t in &grid {
                assert_eq!(row.t > t, row.r > t_level_to_r_level(t, n), "{row:?} at {t}");
            }
        }
    }

    #[test]
    fn centered_r_matches_at_zero() {
        let row = [0.4, -1.2, 2.0, 0.1];
        let s = studentize_row(0, &row).unwrap();
        let m = row_moments(&row, |_| 1.0);
        assert_eq!(centered_r(&m, 0.0), s.r);
        let shifted: Vec<f64> = row.iter().map(|x| x - 0.5).collect();
        let direct = studentize_row(0, &shifted).unwrap().r;
        assert!((centered_r(&m, 0.5) - direct).abs() < 1e-12);
    }

    #[test]
    fn null_distribution_ks() {
        // For normal rows T = √(n/(n−1)) t_{n−1} exactly.
        let (n, reps) = (10, 100_000);
        let spec = PanelSpec::new(reps, n, DependenceModel::Iid, InnovationLaw::StandardNormal).with_seed(41);
        let mut t: Vec<f64> = studentize_panel(&generate(&spec).unwrap()).unwrap().iter().map(|r| r.t).collect();
        t.sort_by(f64::total_cmp);
        let dist = StudentT::new((n - 1) as f64).unwrap();
        let k = ((n - 1) as f64 / n as f64).sqrt();
        let big_n = reps as f64;
        let d = t
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = dist.cdf(x * k);
                (f - i as f64 / big_n).max((i + 1) as f64 / big_n - f)
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / big_n.sqrt(), "KS {d}");
    }

    #[test]
    fn csv_output() {
        let rows = [studentize_row(0, &[1.0, 1.0, 1.0, -1.0]).unwrap(), studentize_row(1, &[0.0, 0.0]).unwrap()];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema: tailind.studentize/1");
        assert_eq!(lines[1], "i,mean,scale,T,R,degenerate");
        assert!(lines[2].starts_with("1,0.5,"));
        assert!(lines[3].starts_with("2,0,0,1,") && lines[3].ends_with(",true"));
    }

    proptest! {
        #[test]
        fn scale_and_sign(row in prop::collection::vec(-5.0f64..5.0, 3..30), k in -6i32..6, c in 0.01f64..100.0) {
            let base = studentize_row(0, &row).unwrap();
            prop_assume!(!base.degenerate);
            let pow2 = 2f64.powi(k);
            let scaled: Vec<f64> = row.iter().map(|x| x * pow2).collect();
            prop_assert_eq!(studentize_row(0, &scaled).unwrap().t, base.t);
            let neg: Vec<f64> = row.iter().map(|x| -x).collect();
            prop_assert_eq!(studentize_row(0, &neg).unwrap().t, -base.t);
            let general: Vec<f64> = row.iter().map(|x| x * c).collect();
            let tc = studentize_row(0, &general).unwrap().t;
            prop_assert!((tc - base.t).abs() <= 1e-9 * base.t.abs().max(1.0));
        }
    }
}
