//! Convergence studies over sequences of meshes.

use rayon::prelude::*;

use crate::error::{Result, UpgError};
use crate::field::Field1D;
use crate::measure2d::{disc_inf_error_2d, l2_h1_errors_2d, nodal_extrema, Subdomain};
use crate::polyexp::PolyExp;
use crate::problem::{
    fixture_example1, fixture_example1_v, fixture_example2, fixture_f1_exact, fixture_xexp_exact, ExactSolution1D,
    Problem1D, Problem2D,
};
use crate::solver1d::{error_report, solve_1d, DiscretizationConfig};
use crate::solver2d::solve_2d;

/// Errors at or below this are treated as exact and get no order.
pub const ORDER_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// `f = 1` in 1D.
    F1,
    /// `f = e^x` in 1D.
    Exp,
    /// `f = x e^x` in 1D.
    XExp,
    /// `f = 0` in 1D.
    Zero,
    /// 2D, exponential layer at `x = 1`.
    Example1,
    /// 2D, additional parabolic layers at `y = 0, 1`.
    Example2,
}

impl ProblemId {
    pub fn is_2d(self) -> bool {
        matches!(self, Self::Example1 | Self::Example2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::F1 => "f1",
            Self::Exp => "ex",
            Self::XExp => "xex",
            Self::Zero => "zero",
            Self::Example1 => "example1",
            Self::Example2 => "example2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "f1" => Self::F1,
            "ex" | "exp" => Self::Exp,
            "xex" | "xexp" => Self::XExp,
            "zero" => Self::Zero,
            "example1" => Self::Example1,
            "example2" => Self::Example2,
            other => return Err(UpgError::Parameter(format!("unknown problem `{other}`"))),
        })
    }

    /// 1D problem and its exact solution.
    pub fn problem_1d(self, epsilon: f64) -> Result<(Problem1D, ExactSolution1D)> {
        let (f, exact) = match self {
            Self::F1 => (PolyExp::constant(1.0), fixture_f1_exact(epsilon)?),
            Self::Exp => (PolyExp::term(1.0, 0, 1.0)?, fixture_example1_v(epsilon)?),
            Self::XExp => (PolyExp::term(1.0, 1, 1.0)?, fixture_xexp_exact(epsilon)?),
            Self::Zero => (PolyExp::constant(0.0), ExactSolution1D { u: Field1D::zero(), du: Field1D::zero() }),
            _ => return Err(UpgError::Parameter(format!("`{}` is a 2D problem", self.name()))),
        };
        Ok((Problem1D::with_poly_exp(epsilon, f)?, exact))
    }

    pub fn problem_2d(self, epsilon: f64) -> Result<Problem2D> {
        match self {
            Self::Example1 => fixture_example1(epsilon),
            Self::Example2 => fixture_example2(epsilon),
            _ => Err(UpgError::Parameter(format!("`{}` is a 1D problem", self.name()))),
        }
    }
}

/// How `epsilon` follows the mesh width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonPolicy {
    Fixed(f64),
    /// `epsilon = h^2`.
    HSquared,
    /// `epsilon = c h^2`.
    Scaled(f64),
}

impl EpsilonPolicy {
    pub fn epsilon(self, h: f64) -> f64 {
        match self {
            Self::Fixed(e) => e,
            Self::HSquared => h * h,
            Self::Scaled(c) => c * h * h,
        }
    }
}

/// Width of the excluded strip at the outflow boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delta {
    /// `delta = h` on each mesh.
    MeshWidth,
    Fixed(f64),
}

impl Delta {
    pub fn value(self, h: f64) -> f64 {
        match self {
            Self::MeshWidth => h,
            Self::Fixed(d) => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    pub problem: ProblemId,
    pub epsilon: EpsilonPolicy,
    /// Strictly increasing mesh sizes.
    pub meshes: Vec<usize>,
    /// Test space for 1D problems; 2D always uses the quadratic special bubble.
    pub config: DiscretizationConfig,
    pub delta: Delta,
    /// 2D only: strips of this many `sqrt(eps)` at `y = 0, 1` are left out of
    /// the discrete and subdomain measures.
    pub wall_margin: f64,
    /// Largest 2D mesh accepted.
    pub max_2d_n: usize,
}

impl StudySpec {
    /// Defaults per problem: `delta = h` in 1D, `0.01` in 2D, and a
    /// `10 sqrt(eps)` wall margin for Example 2.
    pub fn new(problem: ProblemId, epsilon: EpsilonPolicy, meshes: Vec<usize>) -> Self {
        Self {
            problem,
            epsilon,
            meshes,
            config: DiscretizationConfig::quadratic_special(),
            delta: if problem.is_2d() { Delta::Fixed(0.01) } else { Delta::MeshWidth },
            wall_margin: if problem == ProblemId::Example2 { 10.0 } else { 0.0 },
            max_2d_n: 256,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.meshes.len() < 2 {
            return Err(UpgError::Parameter("a study needs at least two meshes".into()));
        }
        if self.meshes.windows(2).any(|w| w[1] <= w[0]) || self.meshes[0] < 2 {
            return Err(UpgError::Parameter(format!("mesh sequence {:?} must increase from n >= 2", self.meshes)));
        }
        if self.problem.is_2d() && *self.meshes.last().expect("nonempty") > self.max_2d_n {
            return Err(UpgError::Guardrail { unknowns: *self.meshes.last().expect("nonempty"), limit: self.max_2d_n });
        }
        let bad = |v: f64| !(v > 0.0 && v.is_finite());
        match self.epsilon {
            EpsilonPolicy::Fixed(e) | EpsilonPolicy::Scaled(e) if bad(e) => {
                return Err(UpgError::Parameter(format!("epsilon parameter must be positive, got {e}")))
            }
            _ => {}
        }
        if let Delta::Fixed(d) = self.delta {
            if !(0.0..1.0).contains(&d) {
                return Err(UpgError::Parameter(format!("delta must lie in [0, 1), got {d}")));
            }
        }
        if !(self.wall_margin >= 0.0) {
            return Err(UpgError::Parameter(format!("wall margin must be nonnegative, got {}", self.wall_margin)));
        }
        Ok(())
    }
}

/// One mesh of a study. Error fields are `NaN` when the solve failed.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub h: f64,
    pub epsilon: f64,
    pub disc_inf: f64,
    pub l2_full: f64,
    pub l2_sub: f64,
    pub h1_full: f64,
    pub h1_sub: f64,
    pub thm_bound: Option<f64>,
    pub hypothesis: Option<bool>,
    /// 2D only: largest nodal `|u_h|` and `|u|` on the measured subdomain.
    pub extrema: Option<(f64, f64)>,
    pub failure: Option<String>,
}

impl StudyRow {
    fn failed(n: usize, h: f64, epsilon: f64, err: &UpgError) -> Self {
        Self {
            n,
            h,
            epsilon,
            disc_inf: f64::NAN,
            l2_full: f64::NAN,
            l2_sub: f64::NAN,
            h1_full: f64::NAN,
            h1_sub: f64::NAN,
            thm_bound: None,
            hypothesis: None,
            extrema: None,
            failure: Some(err.to_string()),
        }
    }

    /// The five error columns in table order.
    pub fn errors(&self) -> [f64; 5] {
        [self.disc_inf, self.l2_full, self.l2_sub, self.h1_full, self.h1_sub]
    }
}

/// Names of the error columns, matching [`StudyRow::errors`].
pub const ERROR_COLUMNS: [&str; 5] = ["disc_inf", "l2_full", "l2_sub", "h1_full", "h1_sub"];

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub spec: StudySpec,
    pub rows: Vec<StudyRow>,
    /// `orders[c][r]`: order of column `c` between rows `r - 1` and `r`.
    pub orders: [Vec<Option<f64>>; 5],
}

impl StudyResult {
    pub fn order(&self, column: &str, row: usize) -> Option<f64> {
        let c = ERROR_COLUMNS.iter().position(|&name| name == column)?;
        self.orders[c].get(row).copied().flatten()
    }
}

/// `log2(e_{r-1} / e_r)` for consecutive entries; `None` where either error
/// is at or below [`ORDER_FLOOR`] or not finite. The first entry has no order.
pub fn observed_order(errors: &[f64]) -> Vec<Option<f64>> {
    let ns: Vec<f64> = (0..errors.len()).map(|i| 2f64.powi(i as i32)).collect();
    orders_for(&ns, errors)
}

fn usable(e: f64) -> bool {
    e.is_finite() && e > ORDER_FLOOR
}

fn orders_for(ns: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|r| {
            if r == 0 || !usable(errors[r - 1]) || !usable(errors[r]) {
                return None;
            }
            Some((errors[r - 1] / errors[r]).ln() / (ns[r] / ns[r - 1]).ln())
        })
        .collect()
}

fn row_1d(spec: &StudySpec, n: usize) -> Result<StudyRow> {
    let h = 1.0 / n as f64;
    let eps = spec.epsilon.epsilon(h);
    let (problem, exact) = spec.problem.problem_1d(eps)?;
    let sol = solve_1d(&problem, n, spec.config)?;
    let rep = error_report(&problem, &exact, &sol, spec.delta.value(h))?;
    Ok(StudyRow {
        n,
        h,
        epsilon: eps,
        disc_inf: rep.disc_inf,
        l2_full: rep.l2_full,
        l2_sub: rep.l2_sub,
        h1_full: rep.h1_full,
        h1_sub: rep.h1_sub,
        thm_bound: rep.thm_bound.map(|b| b.value),
        hypothesis: rep.thm_bound.map(|b| b.hypothesis),
        extrema: None,
        failure: None,
    })
}

fn row_2d(spec: &StudySpec, n: usize) -> Result<StudyRow> {
    let h = 1.0 / n as f64;
    let eps = spec.epsilon.epsilon(h);
    let problem = spec.problem.problem_2d(eps)?;
    let exact = problem.exact().ok_or_else(|| UpgError::Parameter("2D study needs an exact solution".into()))?;
    let uh = solve_2d(&problem, n)?;
    let margin = (spec.wall_margin * eps.sqrt()).min(0.5);
    let walls = Subdomain::new(1.0, margin)?;
    let sub = Subdomain::new(1.0 - spec.delta.value(h), margin)?;
    let (l2_full, h1_full) = l2_h1_errors_2d(exact, &uh, Subdomain::full(), problem.layers());
    let (l2_sub, h1_sub) = l2_h1_errors_2d(exact, &uh, sub, problem.layers());
    Ok(StudyRow {
        n,
        h,
        epsilon: eps,
        disc_inf: disc_inf_error_2d(&exact.u, &uh, walls),
        l2_full,
        l2_sub,
        h1_full,
        h1_sub,
        thm_bound: None,
        hypothesis: None,
        extrema: Some(nodal_extrema(&exact.u, &uh, sub)),
        failure: None,
    })
}

/// Solve on every mesh (concurrently) and collect errors and orders. A
/// failed solve is recorded in its row and breaks the neighboring orders.
pub fn run_study(spec: &StudySpec) -> Result<StudyResult> {
    spec.validate()?;
    let rows: Vec<StudyRow> = spec
        .meshes
        .par_iter()
        .map(|&n| {
            let res = if spec.problem.is_2d() { row_2d(spec, n) } else { row_1d(spec, n) };
            res.unwrap_or_else(|e| {
                let h = 1.0 / n as f64;
                StudyRow::failed(n, h, spec.epsilon.epsilon(h), &e)
            })
        })
        .collect();
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let orders = std::array::from_fn(|c| {
        let col: Vec<f64> = rows.iter().map(|r| r.errors()[c]).collect();
        orders_for(&ns, &col)
    });
    Ok(StudyResult { spec: spec.clone(), rows, orders })
}
