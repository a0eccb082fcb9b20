//! Gauss-Legendre rules, geometrically graded partitions for layers, and a
//! refinement-checked composite integrator.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Result, UpgError};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 5-point rule used by all element integrals.
    pub fn five() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(5))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let pn1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * pn - pn1) / (x * x - 1.0);
    (pn, d)
}

/// A point where the integrand varies on a short length scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    /// Location of the layer (an endpoint of the domain).
    pub at: f64,
    /// Width of the smallest piece touching `at`.
    pub smallest: f64,
    /// Grading stops once pieces reach this distance from `at`.
    pub reach: f64,
}

impl Layer {
    /// Graded pieces `smallest, 2*smallest, 4*smallest, ...` out to `reach`.
    pub fn new(at: f64, smallest: f64, reach: f64) -> Self {
        Self { at, smallest, reach }
    }

    fn breakpoints(&self, a: f64, b: f64, out: &mut Vec<f64>) {
        if !(self.smallest > 0.0) || !(self.reach > 0.0) {
            return;
        }
        let mut d = self.smallest;
        loop {
            let d_clip = d.min(self.reach);
            for x in [self.at - d_clip, self.at + d_clip] {
                if x > a && x < b {
                    out.push(x);
                }
            }
            if d >= self.reach {
                break;
            }
            d *= 2.0;
        }
    }
}

/// Breakpoints of `[a, b]` refined geometrically toward each layer.
pub fn graded_partition(a: f64, b: f64, layers: &[Layer]) -> Vec<f64> {
    let mut pts = vec![a, b];
    for layer in layers {
        layer.breakpoints(a, b, &mut pts);
    }
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
    pts
}

/// Composite rule over `pieces` (consecutive breakpoints).
pub fn composite(rule: &GaussLegendre, f: &impl Fn(f64) -> f64, pieces: &[f64]) -> f64 {
    pieces.windows(2).map(|w| rule.integrate(f, w[0], w[1])).sum()
}

/// Relative tolerance for [`integrate_checked`].
pub const CHECKED_TOLERANCE: f64 = 1e-9;
const MAX_REFINEMENTS: usize = 6;

/// Composite 5-point Gauss over `pieces`, accepted once bisecting every piece
/// changes the result by at most `CHECKED_TOLERANCE` relative to the integral
/// of `|f|`. Fails with the last estimate after repeated refinement.
pub fn integrate_checked(f: impl Fn(f64) -> f64, pieces: &[f64]) -> Result<f64> {
    let rule = GaussLegendre::five();
    let mut pts = pieces.to_vec();
    let mut coarse = composite(rule, &f, &pts);
    let mut estimate = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        pts = bisect(&pts);
        let fine = composite(rule, &f, &pts);
        let scale = composite(rule, &|x| f(x).abs(), &pts);
        let diff = (fine - coarse).abs();
        if diff <= CHECKED_TOLERANCE * scale || diff == 0.0 {
            return Ok(fine);
        }
        estimate = diff / scale;
        coarse = fine;
    }
    Err(UpgError::QuadratureFailure { estimate })
}

fn bisect(pts: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * pts.len());
    for w in pts.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    if let Some(&last) = pts.last() {
        out.push(last);
    }
    out
}

/// Recursive bisection with a 10-point Gauss-Legendre estimate per level.
/// Independent of the graded machinery; used as a reference integrator.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(
        rule: &GaussLegendre,
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = rule.integrate(f, a, m);
        let right = rule.integrate(f, m, b);
        if depth >= 60 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        recurse(rule, f, a, m, left, 0.5 * tol, depth + 1)
            + recurse(rule, f, m, b, right, 0.5 * tol, depth + 1)
    }
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let rule = RULE.get_or_init(|| GaussLegendre::new(10));
    let whole = rule.integrate(f, a, b);
    recurse(rule, f, a, b, whole, tol, 0)
}
