use std::f64::consts::PI;

use super::invert_upper_tail;
use super::normal::normal_quantile;
use super::special::{inc_beta, inc_beta_series, ln_beta};
use crate::error::{Error, Result};

/// Student's t distribution with `df >= 1` degrees of freedom (real-valued).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentT {
    df: f64,
    ln_norm: f64,
}

impl StudentT {
    pub fn new(df: f64) -> Result<Self> {
        if !(df >= 1.0) || !df.is_finite() {
            return Err(Error::arg(format!(
                "Student t needs at least 1 degree of freedom, got {df}"
            )));
        }
        let ln_norm = -(0.5 * df.ln() + ln_beta(0.5 * df, 0.5));
        Ok(Self { df, ln_norm })
    }

    pub fn df(&self) -> f64 {
        self.df
    }

    pub fn pdf(&self, x: f64) -> f64 {
        (self.ln_norm - 0.5 * (self.df + 1.0) * (x * x / self.df).ln_1p()).exp()
    }

    /// Two-sided tail mass `P(|T| > |x|)` from the continued fraction path.
    fn two_sided(&self, x: f64) -> f64 {
        let x2 = x * x;
        let denom = self.df + x2;
        inc_beta(0.5 * self.df, 0.5, self.df / denom, x2 / denom)
    }

    fn two_sided_series(&self, x: f64) -> f64 {
        let x2 = x * x;
        let denom = self.df + x2;
        inc_beta_series(0.5 * self.df, 0.5, self.df / denom, x2 / denom)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let half = 0.5 * self.two_sided(x);
        if x > 0.0 {
            1.0 - half
        } else {
            half
        }
    }

    /// Upper tail `P(T > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        self.cdf(-x)
    }

    /// Same distribution function evaluated through the power series of the
    /// incomplete beta function instead of the continued fraction.
    pub fn cdf_series(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let half = 0.5 * self.two_sided_series(x);
        if x > 0.0 {
            1.0 - half
        } else {
            half
        }
    }

    /// Inverse distribution function; `±∞` at the endpoints, NaN outside.
    pub fn quantile(&self, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return f64::NAN;
        }
        if u == 0.0 {
            return f64::NEG_INFINITY;
        }
        if u == 1.0 {
            return f64::INFINITY;
        }
        if u == 0.5 {
            return 0.0;
        }
        if u < 0.5 {
            -self.upper_quantile(u)
        } else {
            self.upper_quantile(1.0 - u)
        }
    }

    /// Solves `P(T > x) = tail` for `tail ∈ (0, 1/2]`.
    pub fn upper_quantile(&self, tail: f64) -> f64 {
        if tail <= 0.0 {
            return f64::INFINITY;
        }
        if tail >= 0.5 {
            return if tail == 0.5 { 0.0 } else { -self.upper_quantile(1.0 - tail) };
        }
        let guess = if self.df <= 2.0 {
            // Closed forms for df 1 and 2 are cheap starting points.
            if self.df == 1.0 {
                (PI * (0.5 - tail)).tan()
            } else {
                let a = 4.0 * tail * (1.0 - tail);
                2.0 * (0.5 - tail) * (2.0 / a).sqrt()
            }
        } else {
            -normal_quantile(tail)
        };
        invert_upper_tail(tail, guess.max(0.0), |x| self.sf(x), |x| self.pdf(x))
    }

    /// Largest disagreement between the continued-fraction and series paths
    /// over an even grid of `points` values in `[-x_max, x_max]`.
    pub fn dual_path_discrepancy(&self, x_max: f64, points: usize) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..points {
            let x = -x_max + 2.0 * x_max * k as f64 / (points.max(2) - 1) as f64;
            worst = worst.max((self.cdf(x) - self.cdf_series(x)).abs());
        }
        worst
    }
}

pub fn student_t_cdf(x: f64, df: f64) -> Result<f64> {
    Ok(StudentT::new(df)?.cdf(x))
}

pub fn student_t_quantile(u: f64, df: f64) -> Result<f64> {
    Ok(StudentT::new(df)?.quantile(u))
}
