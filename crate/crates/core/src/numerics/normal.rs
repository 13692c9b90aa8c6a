use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::invert_upper_tail;
use super::special::erfc;

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)`, accurate in relative terms far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Inverse of [`normal_cdf`]. Returns `-∞` at 0, `+∞` at 1 and NaN outside
/// `[0, 1]`.
pub fn normal_quantile(u: f64) -> f64 {
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
        -upper_quantile(u)
    } else {
        upper_quantile(1.0 - u)
    }
}

/// Solves `1 - Φ(x) = tail` for `tail ∈ (0, 1/2]`.
fn upper_quantile(tail: f64) -> f64 {
    // Abramowitz & Stegun 26.2.23 as a starting point (|error| < 4.5e-4).
    let w = (-2.0 * tail.ln()).sqrt();
    let guess = w - (2.515_517 + 0.802_853 * w + 0.010_328 * w * w)
        / (1.0 + 1.432_788 * w + 0.189_269 * w * w + 0.001_308 * w * w * w);
    invert_upper_tail(tail, guess.max(0.0), normal_sf, normal_pdf)
}
