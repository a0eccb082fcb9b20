//! One-dimensional system matrices and load vectors.
//!
//! Test functions are `g_j = phi_j + B_j - B_{j+1}`, where `B_k` is the
//! bubble translated to element `[x_{k-1}, x_k]`. Against hat-function trial
//! functions they produce `((eps/h + b) S + C) U = F`.

use rayon::prelude::*;

use crate::bubble::{BubbleFamily, BubbleSpec, EXP_COLLAPSE_RATIO};
use crate::error::{Result, UpgError};
use crate::mesh::UniformMesh1D;
use crate::polyexp::{exp_moment, PolyExp};
use crate::problem::Problem1D;
use crate::quadrature::{graded_partition, integrate_checked, Layer};
use crate::tridiag::TridiagonalMatrix;

/// Stiffness `S = tridiag(-1, 2, -1)`.
pub fn assemble_s(m: usize) -> Result<TridiagonalMatrix> {
    TridiagonalMatrix::from_stencil(m, -1.0, 2.0, -1.0)
}

/// Convection `C = tridiag(-1/2, 0, 1/2)`.
pub fn assemble_c(m: usize) -> Result<TridiagonalMatrix> {
    TridiagonalMatrix::from_stencil(m, -0.5, 0.0, 0.5)
}

/// Mass `M = (h/6) tridiag(1, 4, 1)`.
pub fn assemble_m(m: usize, h: f64) -> Result<TridiagonalMatrix> {
    TridiagonalMatrix::from_stencil(m, h / 6.0, 4.0 * h / 6.0, h / 6.0)
}

/// Bubble-modified mass `M^q = M + beta (h/3) tridiag(-1, 0, 1)`.
///
/// Entry `(i, j)` is `(phi_i, g^q_j)`: rows index the trial hat function and
/// columns the test function. The Petrov-Galerkin operator (rows = test)
/// therefore uses the transpose.
pub fn assemble_mq(m: usize, h: f64, beta: f64) -> Result<TridiagonalMatrix> {
    let off = beta * h / 3.0;
    TridiagonalMatrix::from_stencil(m, h / 6.0 - off, 4.0 * h / 6.0, h / 6.0 + off)
}

/// `M_fe = (eps/h + b) S + C`, depending on the bubble only through its mean `b`.
pub fn assemble_upg_matrix(n: usize, epsilon: f64, b: f64) -> Result<TridiagonalMatrix> {
    if n < 2 {
        return Err(UpgError::Size(format!("need n >= 2, got {n}")));
    }
    if !(epsilon > 0.0) {
        return Err(UpgError::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(UpgError::Parameter(format!("bubble mean must be positive, got {b}")));
    }
    let a = epsilon * n as f64 + b;
    TridiagonalMatrix::from_stencil(n - 1, -a - 0.5, 2.0 * a, -a + 0.5)
}

/// Load vector `((f, g_1), ..., (f, g_{n-1}))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsVector1D(pub Vec<f64>);

impl RhsVector1D {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Integrals of `f` on element `k` against the rising and falling halves of
/// the test functions touching it: `(f, phi_k + B_k)` and `(f, phi_{k-1} - B_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ElementLoads {
    pub rising: f64,
    pub falling: f64,
}

fn check_mesh_match(mesh: &UniformMesh1D, spec: &BubbleSpec) -> Result<()> {
    if (spec.h() - mesh.h()).abs() > 1e-14 * mesh.h() {
        return Err(UpgError::Parameter(format!(
            "bubble built for h = {} used on mesh with h = {}",
            spec.h(),
            mesh.h()
        )));
    }
    Ok(())
}

/// Assemble the load vector; closed-form moments for poly-exp data,
/// layer-aware quadrature otherwise.
pub fn assemble_rhs_1d(problem: &Problem1D, mesh: &UniformMesh1D, spec: &BubbleSpec) -> Result<RhsVector1D> {
    check_mesh_match(mesh, spec)?;
    let loads: Vec<ElementLoads> = match problem.poly_exp() {
        Some(p) => (1..=mesh.n())
            .into_par_iter()
            .map(|k| closed_form_loads(p, mesh.node(k - 1), spec))
            .collect(),
        None => (1..=mesh.n())
            .into_par_iter()
            .map(|k| quadrature_loads(problem, mesh.node(k - 1), spec))
            .collect::<Result<_>>()?,
    };
    Ok(RhsVector1D(
        (1..mesh.n()).map(|j| loads[j - 1].rising + loads[j].falling).collect(),
    ))
}

/// Exact element integrals for `f = sum c x^k e^{a x}`.
pub(crate) fn closed_form_loads(f: &PolyExp, x0: f64, spec: &BubbleSpec) -> ElementLoads {
    let h = spec.h();
    let mut rising = 0.0;
    let mut falling = 0.0;
    for t in f.shifted(x0) {
        let (p, r) = (t.power, t.rate);
        let m0 = exp_moment(p, r, h);
        let m1 = exp_moment(p + 1, r, h);
        let bubble = match spec.family() {
            BubbleFamily::Quadratic => {
                let m2 = exp_moment(p + 2, r, h);
                4.0 * spec.beta() / (h * h) * (h * m1 - m2)
            }
            BubbleFamily::Exponential => {
                let eps = spec.epsilon();
                let damped = exp_moment(p, r - 1.0 / eps, h);
                let denom = if h / eps > EXP_COLLAPSE_RATIO { 1.0 } else { -(-h / eps).exp_m1() };
                (m0 - damped) / denom - m1 / h
            }
        };
        rising += t.coeff * (m1 / h + bubble);
        falling += t.coeff * (m0 - m1 / h - bubble);
    }
    ElementLoads { rising, falling }
}

/// Local breakpoints on `[0, h]`: graded toward the left end for the
/// exponential bubble, a single piece for the quadratic one.
pub(crate) fn element_partition(spec: &BubbleSpec) -> Vec<f64> {
    let h = spec.h();
    match spec.family() {
        BubbleFamily::Quadratic => vec![0.0, h],
        BubbleFamily::Exponential => {
            let eps = spec.epsilon();
            graded_partition(0.0, h, &[Layer::new(0.0, eps / 4.0, h.min(40.0 * eps))])
        }
    }
}

fn quadrature_loads(problem: &Problem1D, x0: f64, spec: &BubbleSpec) -> Result<ElementLoads> {
    let h = spec.h();
    let f = problem.f();
    let pieces = element_partition(spec);
    let rising = integrate_checked(|t| f.eval(x0 + t) * (t / h + spec.eval(t)), &pieces)?;
    let falling = integrate_checked(|t| f.eval(x0 + t) * (1.0 - t / h - spec.eval(t)), &pieces)?;
    Ok(ElementLoads { rising, falling })
}
