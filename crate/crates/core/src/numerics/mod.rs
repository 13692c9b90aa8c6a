//! Special functions, distribution functions and the threshold calculus.
//!
//! Everything here is pure and reentrant.

mod bivariate;
mod calibration;
mod marginal;
mod normal;
pub mod quadrature;
pub mod special;
mod student_t;

pub use bivariate::bivariate_normal_tail;
pub use calibration::{
    any_exceedence_prob, dependence_summary, phi_bound, threshold_regime, DependenceSummary,
    ErrorBound, ThresholdRegime, ThresholdVariant, DEFAULT_MA_CONSTANT,
};
pub use marginal::{studentized_normal_sf, MarginalLaw};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, normal_sf};
pub use student_t::{student_t_cdf, student_t_quantile, StudentT};

/// Solves `sf(x) = tail` for a decreasing survival function with
/// `sf(0) >= tail`, by Newton steps safeguarded with bisection.
pub(crate) fn invert_upper_tail(
    tail: f64,
    guess: f64,
    sf: impl Fn(f64) -> f64,
    pdf: impl Fn(f64) -> f64,
) -> f64 {
    let mut lo = 0.0_f64;
    let mut hi = guess.max(1.0);
    while sf(hi) > tail {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    let mut x = guess.clamp(lo, hi);
    for _ in 0..300 {
        let f = sf(x) - tail;
        if f == 0.0 {
            return x;
        }
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let newton = if d > 0.0 { x + f / d } else { f64::NAN };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= 1e-12 * x.abs().max(1.0) || hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    x
}
