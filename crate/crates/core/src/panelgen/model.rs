use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dependence structure of a column process `U_{1j}, U_{2j}, …`.
///
/// Every model is realized as a finite linear filter over i.i.d. drivers,
/// `U_i = Σ_k c_k ε_{i+k}` with `Σ c_k² = 1`, which makes the sequence
/// κ-dependent by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DependenceModel {
    Iid,
    /// Lag correlations `rho[m-1]` at lags `m = 1..=κ`, zero beyond.
    GaussianKdep { rho: Vec<f64> },
    /// `U_i = κ^{-1/2} Σ_{k=1}^{κ} ε_{i+k}`; lag-m correlation `(κ-m)₊/κ`.
    MovingAverage { kappa: usize },
}

impl DependenceModel {
    /// Flat correlation `rho` at every lag `1..=kappa`.
    pub fn flat_kdep(kappa: usize, rho: f64) -> Self {
        DependenceModel::GaussianKdep { rho: vec![rho; kappa] }
    }

    pub fn kappa(&self) -> usize {
        match self {
            DependenceModel::Iid => 0,
            DependenceModel::GaussianKdep { rho } => rho.len(),
            DependenceModel::MovingAverage { kappa } => *kappa,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DependenceModel::Iid => "iid",
            DependenceModel::GaussianKdep { .. } => "gaussian-kdep",
            DependenceModel::MovingAverage { .. } => "moving-average",
        }
    }

    /// Correlation between `U_i` and `U_{i+lag}`.
    pub fn lag_correlation(&self, lag: usize) -> f64 {
        if lag == 0 {
            return 1.0;
        }
        match self {
            DependenceModel::Iid => 0.0,
            DependenceModel::GaussianKdep { rho } => rho.get(lag - 1).copied().unwrap_or(0.0),
            DependenceModel::MovingAverage { kappa } => {
                kappa.saturating_sub(lag) as f64 / *kappa as f64
            }
        }
    }

    /// Largest correlation over distinct indices, floored at 0.
    pub fn rho_max(&self) -> f64 {
        (1..=self.kappa()).map(|m| self.lag_correlation(m)).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DependenceModel::Iid => Ok(()),
            DependenceModel::GaussianKdep { rho } => {
                if let Some((m, r)) = rho.iter().enumerate().find(|(_, r)| !(0.0..1.0).contains(*r)) {
                    return Err(Error::spec(format!(
                        "lag-{} correlation must lie in [0, 1), got {r}",
                        m + 1
                    )));
                }
                Ok(())
            }
            DependenceModel::MovingAverage { kappa } => {
                if *kappa == 0 {
                    Err(Error::spec("moving-average window must be at least 1"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Filter coefficients `c_0..c_K` over the driver sequence.
    pub fn filter(&self) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            DependenceModel::Iid => Ok(vec![1.0]),
            DependenceModel::MovingAverage { kappa } => {
                Ok(vec![1.0 / (*kappa as f64).sqrt(); *kappa])
            }
            DependenceModel::GaussianKdep { rho } => ma_factor(rho),
        }
    }
}

/// Finds `a_0..a_κ` with `Σ_k a_k a_{k+m} = ρ_m` (`ρ_0 = 1`) by Wilson's
/// Newton iteration, which converges to the minimum-phase factor. Each step
/// is a `(κ+1)²` linear solve.
pub(crate) fn ma_factor(rho: &[f64]) -> Result<Vec<f64>> {
    let q = rho.len();
    let mut target = Vec::with_capacity(q + 1);
    target.push(1.0);
    target.extend_from_slice(rho);

    // A κ-dependent process with these correlations exists iff the spectral
    // density 1 + 2 Σ ρ_m cos(mω) is nonnegative.
    let grid = 4096;
    let min_density = (0..=grid)
        .map(|k| {
            let w = std::f64::consts::PI * k as f64 / grid as f64;
            1.0 + 2.0 * rho.iter().enumerate().map(|(m, r)| r * ((m + 1) as f64 * w).cos()).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    if min_density < -1e-12 {
        return Err(Error::spec(format!(
            "lag correlations {rho:?} are not realizable by a {q}-dependent process \
             (spectral density dips to {min_density:.3e})"
        )));
    }

    if q == 1 {
        // Closed form; Newton converges only linearly at the boundary ρ = 1/2.
        let (u, v) = ((1.0 + 2.0 * rho[0]).sqrt(), (1.0 - 2.0 * rho[0]).max(0.0).sqrt());
        return Ok(vec![0.5 * (u + v), 0.5 * (u - v)]);
    }

    let autocov = |a: &[f64]| -> Vec<f64> {
        (0..=q).map(|m| (0..=q - m).map(|k| a[k] * a[k + m]).sum()).collect()
    };
    let mut a = vec![0.0; q + 1];
    a[0] = 1.0;
    for _ in 0..200 {
        let g = autocov(&a);
        let resid: Vec<f64> = target.iter().zip(&g).map(|(t, g)| t - g).collect();
        if resid.iter().all(|r| r.abs() < 1e-15) {
            break;
        }
        let mut jac = vec![vec![0.0; q + 1]; q + 1];
        for (m, row) in jac.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut v = 0.0;
                if j + m <= q {
                    v += a[j + m];
                }
                if j >= m {
                    v += a[j - m];
                }
                *cell = v;
            }
        }
        let Some(step) = solve(jac, resid) else { break };
        for (ak, dk) in a.iter_mut().zip(step) {
            *ak += dk;
        }
    }
    let g = autocov(&a);
    let worst = target.iter().zip(&g).map(|(t, g)| (t - g).abs()).fold(0.0, f64::max);
    if !(worst < 1e-12) {
        return Err(Error::spec(format!(
            "could not factor lag correlations {rho:?} (residual {worst:.3e})"
        )));
    }
    Ok(a)
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    Some(x)
}
