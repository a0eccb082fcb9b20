//! Bubble generating functions on a reference element `[0, h]`.
//!
//! Every bubble vanishes at both endpoints and has a positive mean `b`; the
//! assembled upwinding matrix depends on the bubble only through `eps/h + b`.
//! The quadratic bubble scaled by [`special_beta`] has exactly the mean of
//! the exponential bubble, so both families produce the same matrix.

use crate::error::{Result, UpgError};

/// Above this value of `h/(2 eps)`, `coth` equals 1 to within 2e-17.
const COTH_SATURATION: f64 = 19.0;

/// Beyond this value of `h/eps`, `1 - exp(-h/eps)` rounds to 1 in double precision.
pub const EXP_COLLAPSE_RATIO: f64 = 36.0;

/// Which generating function the test space is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BubbleFamily {
    Quadratic,
    Exponential,
}

/// How the quadratic bubble's scaling `beta` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaPolicy {
    /// Match the exponential bubble's mean.
    Special,
    Fixed(f64),
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(UpgError::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `t_e = tanh(h / (2 eps))`.
pub fn tanh_half_ratio(h: f64, epsilon: f64) -> Result<f64> {
    check_positive("h", h)?;
    check_positive("epsilon", epsilon)?;
    Ok((h / (2.0 * epsilon)).tanh())
}

/// Langevin function `coth z - 1/z` for `z > 0`.
fn langevin(z: f64) -> f64 {
    if z > COTH_SATURATION {
        1.0 - 1.0 / z
    } else if z < 0.1 {
        // z/3 - z^3/45 + 2z^5/945 - z^7/4725 + 2z^9/93555 - 1382 z^11/638512875
        let z2 = z * z;
        z * (1.0 / 3.0
            + z2 * (-1.0 / 45.0
                + z2 * (2.0 / 945.0
                    + z2 * (-1.0 / 4725.0 + z2 * (2.0 / 93555.0 - z2 * 1382.0 / 638_512_875.0)))))
    } else {
        1.0 / z.tanh() - 1.0 / z
    }
}

/// Quadratic-bubble scaling that equalizes its mean with the exponential
/// bubble's: `beta = (3/4) (coth(h/(2 eps)) - 2 eps/h)`.
pub fn special_beta(h: f64, epsilon: f64) -> Result<f64> {
    check_positive("h", h)?;
    check_positive("epsilon", epsilon)?;
    Ok(0.75 * langevin(h / (2.0 * epsilon)))
}

/// Mean of the exponential bubble, `1/(2 t_e) - eps/h`.
pub fn exponential_average(h: f64, epsilon: f64) -> Result<f64> {
    check_positive("h", h)?;
    check_positive("epsilon", epsilon)?;
    Ok(0.5 * langevin(h / (2.0 * epsilon)))
}

fn check_in_element(x: f64, h: f64) -> Result<()> {
    if (0.0..=h).contains(&x) {
        Ok(())
    } else {
        Err(UpgError::Domain(format!("bubble argument {x} outside [0, {h}]")))
    }
}

/// `B^q(x) = (4 beta / h^2) x (h - x)`.
pub fn eval_quadratic_bubble(x: f64, h: f64, beta: f64) -> Result<f64> {
    check_in_element(x, h)?;
    Ok(quadratic_bubble(x, h, beta))
}

#[inline]
pub(crate) fn quadratic_bubble(x: f64, h: f64, beta: f64) -> f64 {
    4.0 * beta / (h * h) * x * (h - x)
}

/// `B^e(x) = (1 - e^{-x/eps}) / (1 - e^{-h/eps}) - x/h`, solving
/// `-eps B'' - B' = 1/h` with zero end values.
pub fn eval_exponential_bubble(x: f64, h: f64, epsilon: f64) -> Result<f64> {
    check_in_element(x, h)?;
    check_positive("epsilon", epsilon)?;
    Ok(exponential_bubble(x, h, epsilon))
}

#[inline]
pub(crate) fn exponential_bubble(x: f64, h: f64, epsilon: f64) -> f64 {
    let num = -(-x / epsilon).exp_m1();
    let ratio = h / epsilon;
    if ratio > EXP_COLLAPSE_RATIO {
        num - x / h
    } else {
        num / -(-ratio).exp_m1() - x / h
    }
}

/// Bubble parameters on one mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleSpec {
    family: BubbleFamily,
    beta: f64,
    epsilon: f64,
    h: f64,
    average_b: f64,
}

impl BubbleSpec {
    pub fn quadratic(h: f64, epsilon: f64, policy: BetaPolicy) -> Result<Self> {
        check_positive("h", h)?;
        check_positive("epsilon", epsilon)?;
        let beta = match policy {
            BetaPolicy::Special => special_beta(h, epsilon)?,
            BetaPolicy::Fixed(b) => {
                check_positive("beta", b).map_err(|e| UpgError::Parameter(e.to_string()))?;
                b
            }
        };
        Ok(Self { family: BubbleFamily::Quadratic, beta, epsilon, h, average_b: 2.0 * beta / 3.0 })
    }

    pub fn exponential(h: f64, epsilon: f64) -> Result<Self> {
        let average_b = exponential_average(h, epsilon)?;
        Ok(Self {
            family: BubbleFamily::Exponential,
            beta: f64::NAN,
            epsilon,
            h,
            average_b,
        })
    }

    pub fn new(family: BubbleFamily, h: f64, epsilon: f64, policy: BetaPolicy) -> Result<Self> {
        match family {
            BubbleFamily::Quadratic => Self::quadratic(h, epsilon, policy),
            BubbleFamily::Exponential => Self::exponential(h, epsilon),
        }
    }

    pub fn family(&self) -> BubbleFamily {
        self.family
    }

    /// Scaling of the quadratic bubble (NaN for the exponential family).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn average(&self) -> f64 {
        self.average_b
    }

    /// Bubble value on the reference element, `0 <= x <= h` assumed.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self.family {
            BubbleFamily::Quadratic => quadratic_bubble(x, self.h, self.beta),
            BubbleFamily::Exponential => exponential_bubble(x, self.h, self.epsilon),
        }
    }
}

/// Closed-form mean `b`; no quadrature.
pub fn bubble_average(spec: &BubbleSpec) -> f64 {
    spec.average()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, GaussLegendre};
    use rand::{Rng, SeedableRng};

    #[test]
    fn tanh_limits() {
        assert!((tanh_half_ratio(1e-2, 1e-10).unwrap() - 1.0).abs() <= 1e-15);
        // tanh(1) from a 30-digit reference
        assert!((tanh_half_ratio(0.2, 0.1).unwrap() - 0.761_594_155_955_764_9).abs() < 1e-15);
        assert!(tanh_half_ratio(1e-300, 1.0).unwrap() < 1e-299);
        assert!(tanh_half_ratio(0.0, 1.0).is_err());
        assert!(tanh_half_ratio(1.0, -1.0).is_err());
    }

    #[test]
    fn special_beta_values() {
        // coth saturates exponentially fast; the remaining gap to 3/4 is the
        // algebraic term -(3/2) eps/h
        for ratio in [60.0, 100.0, 1e4, 1e10] {
            let h = 0.01;
            let beta = special_beta(h, h / ratio).unwrap();
            assert!((beta - 0.75 * (1.0 - 2.0 / ratio)).abs() < 1e-12, "ratio={ratio}");
        }
        assert!((special_beta(1e-2, 1e-15).unwrap() - 0.75).abs() < 1e-12);
        // h = 2 eps: 0.75 (coth 1 - 1)
        let b = special_beta(0.2, 0.1).unwrap();
        assert!((b - 0.234_776_464_124_498_5).abs() < 1e-14, "{b}");
    }

    #[test]
    fn special_beta_consistency_random() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let h: f64 = 10f64.powf(rng.gen_range(-4.0..-0.5));
            let eps: f64 = h * 10f64.powf(rng.gen_range(-2.0..1.0));
            let te = tanh_half_ratio(h, eps).unwrap();
            let r = 2.0 * special_beta(h, eps).unwrap() / 3.0 + eps / h - 1.0 / (2.0 * te);
            assert!(r.abs() <= 1e-14, "h={h} eps={eps} r={r}");
        }
    }

    #[test]
    fn special_beta_range_and_monotone() {
        let mut prev = 0.0;
        for i in 0..1000 {
            let ratio = 10f64.powf(-6.0 + 12.0 * i as f64 / 999.0);
            let beta = special_beta(ratio, 1.0).unwrap();
            assert!(beta > 0.0 && beta < 0.75, "ratio={ratio} beta={beta}");
            assert!(beta >= prev, "not monotone at ratio={ratio}");
            prev = beta;
        }
    }

    #[test]
    fn quadratic_bubble_shape_and_mean() {
        let (h, beta) = (0.125, 0.6);
        assert_eq!(eval_quadratic_bubble(0.0, h, beta).unwrap(), 0.0);
        assert_eq!(eval_quadratic_bubble(h, h, beta).unwrap(), 0.0);
        assert!((eval_quadratic_bubble(h / 2.0, h, beta).unwrap() - beta).abs() < 1e-15);
        assert!(eval_quadratic_bubble(-1e-3, h, beta).is_err());
        assert!(eval_quadratic_bubble(h + 1e-3, h, beta).is_err());
        let mean = GaussLegendre::new(64).integrate(|x| quadratic_bubble(x, h, beta), 0.0, h) / h;
        assert!((mean - 2.0 * beta / 3.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_bubble_shape_and_mean() {
        for &(h, eps) in &[(0.1, 0.1), (0.125, 0.01), (0.05, 0.002), (0.01, 0.5)] {
            assert_eq!(eval_exponential_bubble(0.0, h, eps).unwrap(), 0.0);
            assert!(eval_exponential_bubble(h, h, eps).unwrap().abs() < 1e-15);
            let mean = adaptive(&|x| exponential_bubble(x, h, eps), 0.0, h, 1e-15 * h) / h;
            let te = tanh_half_ratio(h, eps).unwrap();
            let closed = 1.0 / (2.0 * te) - eps / h;
            assert!((mean - closed).abs() < 1e-12, "h={h} eps={eps}: {mean} vs {closed}");
            assert!((exponential_average(h, eps).unwrap() - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_bubble_collapses_to_linear() {
        // x/eps = 40: e^{-40} is below half an ulp of 1
        let h = 0.01;
        let eps = h / 80.0;
        let v = eval_exponential_bubble(h / 2.0, h, eps).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bubbles_nonnegative() {
        for &(h, eps, beta) in &[(0.1, 0.01, 0.7), (0.01, 1.0, 0.001), (0.5, 1e-6, 0.75)] {
            for i in 0..=200 {
                let x = h * i as f64 / 200.0;
                assert!(quadratic_bubble(x, h, beta) >= 0.0);
                assert!(exponential_bubble(x, h, eps) >= -1e-16);
            }
        }
    }

    #[test]
    fn averages() {
        let q = BubbleSpec::quadratic(0.1, 0.01, BetaPolicy::Fixed(0.75)).unwrap();
        assert!((bubble_average(&q) - 0.5).abs() < 1e-16);
        let e = BubbleSpec::exponential(0.2, 0.1).unwrap();
        assert!((bubble_average(&e) - 0.156_517_642_749_665_7).abs() < 1e-14, "{}", e.average());
        for &(h, eps) in &[(0.2, 0.1), (1.0 / 64.0, 1e-8), (0.01, 3.0), (0.1, 0.05)] {
            let q = BubbleSpec::quadratic(h, eps, BetaPolicy::Special).unwrap();
            let e = BubbleSpec::exponential(h, eps).unwrap();
            assert!((q.average() - e.average()).abs() <= 1e-14);
        }
        assert!(BubbleSpec::quadratic(0.1, 0.01, BetaPolicy::Fixed(-1.0)).is_err());
    }
}
