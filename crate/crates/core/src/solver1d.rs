//! 1D Petrov-Galerkin solve and error measurement.

use crate::assembly::{assemble_m, assemble_rhs_1d, assemble_s, assemble_upg_matrix};
use crate::bubble::{BetaPolicy, BubbleFamily, BubbleSpec};
use crate::error::{Result, UpgError};
use crate::fe::PiecewiseLinearFE1D;
use crate::field::Field1D;
use crate::mesh::UniformMesh1D;
use crate::linalg::solve_tridiagonal;
use crate::problem::{ExactSolution1D, Problem1D};
use crate::quadrature::{graded_partition, integrate_checked, Layer};

/// Bubble family and scaling for the test space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationConfig {
    pub family: BubbleFamily,
    pub beta: BetaPolicy,
}

impl DiscretizationConfig {
    pub fn exponential() -> Self {
        Self { family: BubbleFamily::Exponential, beta: BetaPolicy::Special }
    }

    pub fn quadratic_special() -> Self {
        Self { family: BubbleFamily::Quadratic, beta: BetaPolicy::Special }
    }

    pub fn quadratic(beta: f64) -> Self {
        Self { family: BubbleFamily::Quadratic, beta: BetaPolicy::Fixed(beta) }
    }
}

#[derive(Debug, Clone)]
pub struct Solution1D {
    pub u_h: PiecewiseLinearFE1D,
    pub config: DiscretizationConfig,
    pub bubble: BubbleSpec,
    /// `||A U - F||_inf` of the linear solve.
    pub residual: f64,
    pub epsilon: f64,
}

impl Solution1D {
    pub fn mesh(&self) -> &UniformMesh1D {
        self.u_h.mesh()
    }
}

/// Assemble `((eps/h + b) S + C) U = F` and solve it.
pub fn solve_1d(problem: &Problem1D, n: usize, config: DiscretizationConfig) -> Result<Solution1D> {
    let mesh = UniformMesh1D::new(n)?;
    let eps = problem.epsilon();
    let bubble = BubbleSpec::new(config.family, mesh.h(), eps, config.beta)?;
    let rhs = assemble_rhs_1d(problem, &mesh, &bubble)?;
    let a = assemble_upg_matrix(n, eps, bubble.average())?;
    let u = solve_tridiagonal(&a, rhs.as_slice())?;
    let residual = a
        .matvec(&u)
        .iter()
        .zip(rhs.as_slice())
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    Ok(Solution1D { u_h: PiecewiseLinearFE1D::new(mesh, u)?, config, bubble, residual, epsilon: eps })
}

/// `max_j |u(x_j) - u_j|` over interior nodes.
pub fn discrete_inf_error(u_exact: &Field1D, sol: &Solution1D) -> f64 {
    discrete_inf_error_fe(u_exact, &sol.u_h)
}

pub fn discrete_inf_error_fe(u_exact: &Field1D, v: &PiecewiseLinearFE1D) -> f64 {
    let mesh = v.mesh();
    (1..mesh.n()).map(|j| (u_exact.eval(mesh.node(j)) - v.nodal(j)).abs()).fold(0.0, f64::max)
}

fn check_sub_right(sub_right: f64) -> Result<()> {
    if sub_right > 0.0 && sub_right <= 1.0 {
        Ok(())
    } else {
        Err(UpgError::Domain(format!("subdomain end {sub_right} outside (0, 1]")))
    }
}

/// Mesh nodes of `[0, sub_right]`, with geometric refinement toward `x = 1`
/// when a layer width is given.
fn error_partition(mesh: &UniformMesh1D, layer: Option<f64>, sub_right: f64) -> Vec<f64> {
    let layers: Vec<Layer> = layer.map(|eps| Layer::new(1.0, eps / 8.0, 40.0 * eps)).into_iter().collect();
    let mut pts = graded_partition(0.0, sub_right, &layers);
    pts.extend(mesh.nodes().filter(|&x| x > 0.0 && x < sub_right));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    pts
}

/// `||u - v||` on `[0, sub_right]`; `layer` is the width of the outflow layer
/// of `u`, if any.
pub fn l2_error_fe(u_exact: &Field1D, v: &PiecewiseLinearFE1D, layer: Option<f64>, sub_right: f64) -> Result<f64> {
    check_sub_right(sub_right)?;
    let pts = error_partition(v.mesh(), layer, sub_right);
    let sq = integrate_checked(
        |x| {
            let d = u_exact.eval(x) - v.eval_unchecked(x);
            d * d
        },
        &pts,
    )?;
    Ok(sq.sqrt())
}

/// `|u - v|_1` on `[0, sub_right]`.
pub fn h1_semi_error_fe(
    du_exact: &Field1D,
    v: &PiecewiseLinearFE1D,
    layer: Option<f64>,
    sub_right: f64,
) -> Result<f64> {
    check_sub_right(sub_right)?;
    let mesh = *v.mesh();
    let pts = error_partition(&mesh, layer, sub_right);
    let sq = integrate_checked(
        |x| {
            let d = du_exact.eval(x) - v.slope(mesh.element_of(x));
            d * d
        },
        &pts,
    )?;
    Ok(sq.sqrt())
}

pub fn l2_error(u_exact: &Field1D, sol: &Solution1D, sub_right: f64) -> Result<f64> {
    l2_error_fe(u_exact, &sol.u_h, Some(sol.epsilon), sub_right)
}

pub fn h1_semi_error(du_exact: &Field1D, sol: &Solution1D, sub_right: f64) -> Result<f64> {
    h1_semi_error_fe(du_exact, &sol.u_h, Some(sol.epsilon), sub_right)
}

/// `(h/(2 sqrt 3)) |v|_1`, `||v||` and `||v||_{h,inf}`, computed exactly from
/// the mass and stiffness matrices.
pub fn norm_inequality_check(v: &PiecewiseLinearFE1D) -> (f64, f64, f64) {
    let mesh = v.mesh();
    let m = mesh.interior_count();
    let h = mesh.h();
    let c = v.coeffs();
    let quad = |a: &crate::tridiag::TridiagonalMatrix| -> f64 {
        a.matvec(c).iter().zip(c).map(|(x, y)| x * y).sum::<f64>().max(0.0)
    };
    let semi = (quad(&assemble_s(m).expect("m >= 1")) / h).sqrt();
    let l2 = quad(&assemble_m(m, h).expect("m >= 1")).sqrt();
    let inf = c.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    (h / (2.0 * 3f64.sqrt()) * semi, l2, inf)
}

/// Value of `6 eps ||f||_inf + (3/4) h^2 ||f'||_inf` and whether the mesh
/// hypothesis `exp(-h/eps) <= h` holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThmBound {
    pub value: f64,
    pub hypothesis: bool,
}

/// Sampling density for sup norms of the data.
pub const SUP_SAMPLES: usize = 10_000;

pub fn thm_t_bound(problem: &Problem1D, n: usize) -> Result<ThmBound> {
    let mesh = UniformMesh1D::new(n)?;
    let fp = problem
        .f_prime()
        .ok_or_else(|| UpgError::UnavailableBound("no derivative of f supplied".into()))?;
    let h = mesh.h();
    let eps = problem.epsilon();
    let value = 6.0 * eps * problem.f().sup_norm_sampled(SUP_SAMPLES)
        + 0.75 * h * h * fp.sup_norm_sampled(SUP_SAMPLES);
    Ok(ThmBound { value, hypothesis: (-h / eps).exp() <= h })
}

/// All 1D error measures for one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport1D {
    pub disc_inf: f64,
    pub l2_full: f64,
    pub h1_full: f64,
    pub l2_sub: f64,
    pub h1_sub: f64,
    pub delta: f64,
    pub thm_bound: Option<ThmBound>,
}

/// Errors on `[0, 1]` and on `[0, 1 - delta]`.
pub fn error_report(
    problem: &Problem1D,
    exact: &ExactSolution1D,
    sol: &Solution1D,
    delta: f64,
) -> Result<ErrorReport1D> {
    if !(0.0..1.0).contains(&delta) {
        return Err(UpgError::Domain(format!("delta {delta} outside [0, 1)")));
    }
    let sub = 1.0 - delta;
    let thm_bound = match thm_t_bound(problem, sol.mesh().n()) {
        Ok(b) => Some(b),
        Err(UpgError::UnavailableBound(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ErrorReport1D {
        disc_inf: discrete_inf_error(&exact.u, sol),
        l2_full: l2_error(&exact.u, sol, 1.0)?,
        h1_full: h1_semi_error(&exact.du, sol, 1.0)?,
        l2_sub: l2_error(&exact.u, sol, sub)?,
        h1_sub: h1_semi_error(&exact.du, sol, sub)?,
        delta,
        thm_bound,
    })
}
