use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marginal law of the innovations, always shifted and scaled to mean 0 and
/// variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InnovationLaw {
    StandardNormal,
    /// `(P - μ)/σ` with `P ~ Pareto(a, x_min = 1)`; needs `a > 3`.
    StandardizedPareto { tail_exponent: f64 },
    StandardizedRademacher,
    /// Symmetric law on `{-c, 0, c}` with `P(0) = delta` and
    /// `c = (1 - delta)^{-1/2}`.
    TwoPointWithAtom { delta: f64 },
}

/// Closed-form moments of a standardized law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawMoments {
    pub mean: f64,
    pub variance: f64,
    pub third_abs: f64,
}

impl InnovationLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationLaw::StandardizedPareto { tail_exponent } if !(tail_exponent > 3.0) => {
                Err(Error::spec(format!(
                    "Pareto tail exponent must exceed 3 for a finite third moment, got {tail_exponent}"
                )))
            }
            InnovationLaw::TwoPointWithAtom { delta } if !(0.0..1.0).contains(&delta) => Err(
                Error::spec(format!("atom probability must lie in [0, 1), got {delta}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InnovationLaw::StandardNormal => "standard-normal",
            InnovationLaw::StandardizedPareto { .. } => "standardized-pareto",
            InnovationLaw::StandardizedRademacher => "standardized-rademacher",
            InnovationLaw::TwoPointWithAtom { .. } => "two-point-with-atom",
        }
    }

    pub fn is_normal(&self) -> bool {
        matches!(self, InnovationLaw::StandardNormal)
    }

    /// Fills `out` with independent draws.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match *self {
            InnovationLaw::StandardNormal => {
                for v in out.iter_mut() {
                    *v = StandardNormal.sample(rng);
                }
            }
            InnovationLaw::StandardizedPareto { tail_exponent: a } => {
                let (mu, sigma) = pareto_location_scale(a);
                let inv_a = -1.0 / a;
                for v in out.iter_mut() {
                    let u: f64 = rng.random();
                    *v = ((1.0 - u).powf(inv_a) - mu) / sigma;
                }
            }
            InnovationLaw::StandardizedRademacher => {
                for v in out.iter_mut() {
                    *v = if rng.random::<bool>() { 1.0 } else { -1.0 };
                }
            }
            InnovationLaw::TwoPointWithAtom { delta } => {
                let c = 1.0 / (1.0 - delta).sqrt();
                for v in out.iter_mut() {
                    let u: f64 = rng.random();
                    *v = if u < delta {
                        0.0
                    } else if rng.random::<bool>() {
                        c
                    } else {
                        -c
                    };
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut one = [0.0];
        self.fill(rng, &mut one);
        one[0]
    }

    pub fn moments(&self) -> Result<LawMoments> {
        self.validate()?;
        let third_abs = match *self {
            InnovationLaw::StandardNormal => 2.0 * (2.0 / std::f64::consts::PI).sqrt(),
            InnovationLaw::StandardizedRademacher => 1.0,
            InnovationLaw::TwoPointWithAtom { delta } => 1.0 / (1.0 - delta).sqrt(),
            InnovationLaw::StandardizedPareto { tail_exponent } => pareto_third_abs(tail_exponent),
        };
        Ok(LawMoments { mean: 0.0, variance: 1.0, third_abs })
    }
}

/// `(mean, variance, third absolute moment)` of the standardized law.
pub fn standardized_law_moments(law: InnovationLaw) -> Result<(f64, f64, f64)> {
    let m = law.moments()?;
    Ok((m.mean, m.variance, m.third_abs))
}

fn pareto_location_scale(a: f64) -> (f64, f64) {
    let mu = a / (a - 1.0);
    let var = a / ((a - 1.0).powi(2) * (a - 2.0));
    (mu, var.sqrt())
}

/// `E|P - μ|³ / σ³` for `P ~ Pareto(a, 1)`, from the raw power integrals
/// `∫ x^k a x^{-a-1} dx` split at `μ`.
fn pareto_third_abs(a: f64) -> f64 {
    let (mu, sigma) = pareto_location_scale(a);
    // ∫_lo^hi x^k a x^{-a-1} dx; hi = ∞ contributes 0 because k < a.
    let power = |k: f64, lo: f64, hi: Option<f64>| {
        let upper = hi.map_or(0.0, |h| h.powf(k - a));
        a * (upper - lo.powf(k - a)) / (k - a)
    };
    let cubic = |lo: f64, hi: Option<f64>| {
        power(3.0, lo, hi) - 3.0 * mu * power(2.0, lo, hi) + 3.0 * mu * mu * power(1.0, lo, hi)
            - mu.powi(3) * power(0.0, lo, hi)
    };
    let above = cubic(mu, None);
    let below = cubic(1.0, Some(mu));
    (above - below) / sigma.powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate;
    use crate::rng::{stream, Purpose};

    #[test]
    fn closed_form_moments() {
        let (m, v, t) = standardized_law_moments(InnovationLaw::StandardNormal).unwrap();
        assert_eq!((m, v), (0.0, 1.0));
        assert!((t - 1.595_769_121_605_731).abs() < 1e-14);
        let (_, _, t) = standardized_law_moments(InnovationLaw::StandardizedRademacher).unwrap();
        assert_eq!(t, 1.0);
        let (_, _, t) =
            standardized_law_moments(InnovationLaw::TwoPointWithAtom { delta: 0.75 }).unwrap();
        assert!((t - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pareto_third_moment_matches_quadrature() {
        // 40-digit reference values of E|X|³.
        let got = pareto_third_abs(4.0);
        assert!((got - 7.247_844_507_162_112).abs() < 1e-10, "{got}");
        assert!((pareto_third_abs(3.5) - 11.928_376_863_220_19).abs() < 1e-9);

        // Independent check: substitute x = y^{-1/a} so the density becomes
        // uniform on (0, 1] and integrate |X|³ numerically.
        for a in [3.5_f64, 4.0, 6.0] {
            let (mu, sigma) = pareto_location_scale(a);
            let f = |y: f64| (((y.powf(-1.0 / a)) - mu) / sigma).abs().powi(3);
            // Split at the kink, where y = μ^{-a}.
            let kink = mu.powf(-a);
            let mut total = integrate(f, kink, 1.0, 1e-13).0;
            let mut lo = kink;
            // The y→0 end is integrable but singular; peel off dyadic shells.
            for _ in 0..200 {
                let next = lo * 0.5;
                total += integrate(f, next, lo, 1e-14).0;
                lo = next;
            }
            let rel = (total - pareto_third_abs(a)).abs() / pareto_third_abs(a);
            assert!(rel < 1e-6, "a = {a}: {total} vs {}", pareto_third_abs(a));
        }
    }

    #[test]
    fn rejects_light_pareto_and_bad_atom() {
        assert!(InnovationLaw::StandardizedPareto { tail_exponent: 3.0 }.validate().is_err());
        assert!(InnovationLaw::StandardizedPareto { tail_exponent: 2.5 }.moments().is_err());
        assert!(InnovationLaw::TwoPointWithAtom { delta: 1.0 }.validate().is_err());
        assert!(InnovationLaw::TwoPointWithAtom { delta: -0.1 }.validate().is_err());
    }

    fn sample_moments(law: InnovationLaw, count: usize) -> [(f64, f64); 3] {
        let mut rng = stream(99, 0, 0, Purpose::Auxiliary);
        let mut buf = vec![0.0; count];
        law.fill(&mut rng, &mut buf);
        let stats = |f: &dyn Fn(f64) -> f64| {
            let vals: Vec<f64> = buf.iter().map(|&x| f(x)).collect();
            let mean = vals.iter().sum::<f64>() / count as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (mean, (var / count as f64).sqrt())
        };
        [stats(&|x| x), stats(&|x| x * x), stats(&|x| x.abs().powi(3))]
    }

    #[test]
    fn sample_moments_conform() {
        let laws = [
            InnovationLaw::StandardNormal,
            InnovationLaw::StandardizedRademacher,
            InnovationLaw::TwoPointWithAtom { delta: 0.5 },
            InnovationLaw::StandardizedPareto { tail_exponent: 6.0 },
        ];
        for law in laws {
            let [(m, m_se), (v, v_se), _] = sample_moments(law, 1_000_000);
            assert!(m.abs() < 4.0 * m_se, "{law:?} mean {m}");
            // Rademacher has x² ≡ 1, so the standard error collapses to 0.
            assert!((v - 1.0).abs() <= 4.0 * v_se + 1e-12, "{law:?} var {v}");
        }
    }

    #[test]
    fn pareto_monte_carlo_third_moment() {
        let law = InnovationLaw::StandardizedPareto { tail_exponent: 4.0 };
        let [_, _, (t, t_se)] = sample_moments(law, 10_000_000);
        let want = law.moments().unwrap().third_abs;
        assert!((t - want).abs() < 4.0 * t_se, "{t} ± {t_se} vs {want}");
    }
}
