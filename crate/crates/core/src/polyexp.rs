//! Right-hand sides of the form `sum_i c_i x^{k_i} e^{a_i x}` and their exact
//! moments against polynomial and exponential weights on a single element.

use crate::error::{Result, UpgError};

/// Highest monomial power with closed-form moment support.
pub const MAX_POWER: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyExpTerm {
    pub coeff: f64,
    pub power: u32,
    pub rate: f64,
}

/// Finite sum of `coeff * x^power * exp(rate * x)` terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolyExp {
    terms: Vec<PolyExpTerm>,
}

impl PolyExp {
    pub fn new(terms: Vec<PolyExpTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.power > MAX_POWER) {
            return Err(UpgError::Parameter(format!(
                "poly-exp power {} exceeds the supported maximum {MAX_POWER}",
                t.power
            )));
        }
        if terms.iter().any(|t| !t.coeff.is_finite() || !t.rate.is_finite()) {
            return Err(UpgError::Parameter("non-finite poly-exp term".into()));
        }
        Ok(Self { terms })
    }

    pub fn term(coeff: f64, power: u32, rate: f64) -> Result<Self> {
        Self::new(vec![PolyExpTerm { coeff, power, rate }])
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: vec![PolyExpTerm { coeff: c, power: 0, rate: 0.0 }] }
    }

    pub fn terms(&self) -> &[PolyExpTerm] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * x.powi(t.power as i32) * (t.rate * x).exp())
            .sum()
    }

    /// Exact derivative; stays within the family.
    pub fn derivative(&self) -> PolyExp {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.rate != 0.0 {
                terms.push(PolyExpTerm { coeff: t.coeff * t.rate, ..*t });
            }
            if t.power > 0 {
                terms.push(PolyExpTerm {
                    coeff: t.coeff * t.power as f64,
                    power: t.power - 1,
                    rate: t.rate,
                });
            }
        }
        PolyExp { terms }
    }

    /// Expansion of `t -> f(x0 + t)` as local terms `d * t^p * exp(rate * t)`.
    pub fn shifted(&self, x0: f64) -> Vec<PolyExpTerm> {
        let mut out = Vec::new();
        for t in &self.terms {
            let scale = t.coeff * (t.rate * x0).exp();
            for p in 0..=t.power {
                let d = scale * binomial(t.power, p) * x0.powi((t.power - p) as i32);
                if d != 0.0 {
                    out.push(PolyExpTerm { coeff: d, power: p, rate: t.rate });
                }
            }
        }
        out
    }
}

fn binomial(k: u32, p: u32) -> f64 {
    (0..p).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// `int_0^h t^p e^{rate t} dt`, accurate for any sign and magnitude of `rate`.
pub fn exp_moment(p: u32, rate: f64, h: f64) -> f64 {
    h.powi(p as i32 + 1) * unit_exp_moment(p, rate * h)
}

/// `J_p(z) = int_0^1 s^p e^{z s} ds`.
///
/// For `z >= 0` and moderate negative `z` a positive-term series is summed;
/// for strongly negative `z` the upward recursion is used, where each step
/// contracts errors by `p/|z| < 1`.
pub fn unit_exp_moment(p: u32, z: f64) -> f64 {
    const RECURSION_THRESHOLD: f64 = 30.0;
    if z < -RECURSION_THRESHOLD {
        let w = -z;
        let ew = (-w).exp();
        let mut j = -(-w).exp_m1() / w;
        for q in 1..=p {
            j = (q as f64 * j - ew) / w;
        }
        return j;
    }
    if z >= 0.0 {
        // sum_m z^m / (m! (p + m + 1))
        let mut sum = 0.0;
        let mut zm_over_fact = 1.0;
        for m in 0..1000u32 {
            let term = zm_over_fact / (p + m + 1) as f64;
            sum += term;
            if term <= f64::EPSILON * 1e-2 * sum {
                break;
            }
            zm_over_fact *= z / (m + 1) as f64;
        }
        sum
    } else {
        // e^{-w} sum_m w^m / ((p+1)(p+2)...(p+m+1))
        let w = -z;
        let mut sum = 0.0;
        let mut term = 1.0 / (p + 1) as f64;
        for m in 0..2000u32 {
            sum += term;
            if term <= f64::EPSILON * 1e-2 * sum {
                break;
            }
            term *= w / (p + m + 2) as f64;
        }
        (-w).exp() * sum
    }
}
