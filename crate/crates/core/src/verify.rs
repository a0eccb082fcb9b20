//! Built-in verification suite: the Green-matrix inverse identity, the
//! test-space property of Green's function, and nodal exactness of the
//! exponential-bubble scheme.

use crate::assembly::assemble_rhs_1d;
use crate::bubble::BubbleSpec;
use crate::error::Result;
use crate::green::{exponential_system_matrix, green_in_test_space_check, green_matrix, inverse_residual};
use crate::linalg::solve_tridiagonal;
use crate::mesh::UniformMesh1D;
use crate::study::ProblemId;
use crate::tridiag::TridiagonalMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.threshold
    }
}

/// Deliberate corruption of the system matrix, used to confirm the suite
/// detects errors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Perturbation {
    /// Added to every diagonal entry of `M^e_fe`.
    pub diagonal: f64,
}

fn system(n: usize, eps: f64, p: Perturbation) -> Result<TridiagonalMatrix> {
    let mut a = exponential_system_matrix(n, eps)?;
    a.diag_mut().iter_mut().for_each(|d| *d += p.diagonal);
    Ok(a)
}

pub fn run_verification(p: Perturbation) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &n in &[4, 16, 64] {
        for &eps in &[0.1, 1e-3, 1e-6] {
            checks.push(Check {
                name: format!("inverse identity n={n} eps={eps:e}"),
                residual: inverse_residual(&system(n, eps, p)?, &green_matrix(n, eps)?)?,
                threshold: 1e-8,
            });
        }
    }
    checks.push(Check {
        name: "Green row in test space n=4 eps=1e-1 j=2".into(),
        residual: green_in_test_space_check(4, 0.1, 2)?,
        threshold: 1e-11,
    });
    for j in 1..8 {
        checks.push(Check {
            name: format!("Green row in test space n=8 eps=1e-2 j={j}"),
            residual: green_in_test_space_check(8, 0.01, j)?,
            threshold: 1e-10,
        });
    }
    for id in [ProblemId::F1, ProblemId::Exp] {
        for &eps in &[0.1, 0.01] {
            for &n in &[8, 16, 32] {
                if 1.0 / (n as f64 * eps) > 20.0 {
                    continue;
                }
                let (problem, exact) = id.problem_1d(eps)?;
                let mesh = UniformMesh1D::new(n)?;
                let rhs = assemble_rhs_1d(&problem, &mesh, &BubbleSpec::exponential(mesh.h(), eps)?)?;
                let u = solve_tridiagonal(&system(n, eps, p)?, rhs.as_slice())?;
                let residual =
                    (1..n).map(|j| (u[j - 1] - exact.u.eval(mesh.node(j))).abs()).fold(0.0, f64::max);
                checks.push(Check {
                    name: format!("nodal exactness f={} n={n} eps={eps:e}", id.name()),
                    residual,
                    threshold: 1e-9,
                });
            }
        }
    }
    Ok(checks)
}
