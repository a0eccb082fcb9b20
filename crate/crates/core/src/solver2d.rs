//! Quadratic-bubble Petrov-Galerkin scheme for `-eps Lap u + u_x = f` on the
//! unit square.
//!
//! Trial functions are `phi_l(x) phi_k(y)`, test functions `g_i(x) phi_j(y)`
//! with bubbles only in the flow direction. With `X[l][k] = u_{lk}` the
//! system reads `C^e X M + (eps/h) (M^q)^T X S = F`, equivalently
//! `(M (x) C^e + (eps/h) S (x) (M^q)^T) vec(X) = vec(F)` with the x-index
//! running fastest. `M^q` keeps its `(phi_i, g_j)` layout, hence the
//! transpose.

use ndarray::{Array1, Array2, Axis};
use rayon::prelude::*;

use crate::assembly::{assemble_m, assemble_mq, assemble_s, assemble_upg_matrix};
use crate::bubble::{special_beta, BetaPolicy, BubbleSpec};
use crate::error::{Result, UpgError};
use crate::fe::PiecewiseLinearFE2D;
use crate::linalg::{dense_lu_solve, sine_eigensystem, solve_tridiagonal};
use crate::mesh::UniformMesh1D;
use crate::problem::{LayerScales, Problem2D};
use crate::quadrature::{graded_partition, GaussLegendre, Layer};
use crate::tridiag::TridiagonalMatrix;

/// Largest number of unknowns the dense oracle accepts.
pub const DENSE_LIMIT: usize = 4096;

const RHS_TOLERANCE: f64 = 1e-9;
const RHS_MAX_LEVEL: u32 = 4;

/// Tridiagonal factors and load matrix of the 2D system.
#[derive(Debug, Clone)]
pub struct TensorSystem2D {
    pub n: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub m: TridiagonalMatrix,
    pub ce: TridiagonalMatrix,
    pub s: TridiagonalMatrix,
    pub mq: TridiagonalMatrix,
    /// `rhs[[i-1, j-1]] = (f, g_i(x) phi_j(y))`.
    pub rhs: Array2<f64>,
}

impl TensorSystem2D {
    /// Factors with a caller-supplied load matrix.
    pub fn from_rhs(n: usize, epsilon: f64, rhs: Array2<f64>) -> Result<Self> {
        let mesh = UniformMesh1D::new(n)?;
        let m = mesh.interior_count();
        if rhs.dim() != (m, m) {
            return Err(UpgError::Size(format!("expected {m}x{m} load matrix, got {:?}", rhs.dim())));
        }
        let h = mesh.h();
        let bubble = BubbleSpec::quadratic(h, epsilon, BetaPolicy::Special)?;
        let beta = special_beta(h, epsilon)?;
        Ok(Self {
            n,
            epsilon,
            beta,
            m: assemble_m(m, h)?,
            ce: assemble_upg_matrix(n, epsilon, bubble.average())?,
            s: assemble_s(m)?,
            mq: assemble_mq(m, h, beta)?,
            rhs,
        })
    }

    pub fn mesh(&self) -> UniformMesh1D {
        UniformMesh1D::new(self.n).expect("validated on construction")
    }

    fn diffusion_scale(&self) -> f64 {
        self.epsilon * self.n as f64
    }

    /// `y = A vec(X)` applied through the factors, returned in matrix form.
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let cols = |a: &TridiagonalMatrix, x: &Array2<f64>| {
            let mut out = Array2::zeros(x.dim());
            for (k, col) in x.axis_iter(Axis(1)).enumerate() {
                out.column_mut(k).assign(&Array1::from(a.matvec(&col.to_vec())));
            }
            out
        };
        let rows = |x: &Array2<f64>, b: &TridiagonalMatrix| {
            // x * b with b symmetric
            let mut out = Array2::zeros(x.dim());
            for (l, row) in x.axis_iter(Axis(0)).enumerate() {
                out.row_mut(l).assign(&Array1::from(b.matvec(&row.to_vec())));
            }
            out
        };
        let first = rows(&cols(&self.ce, x), &self.m);
        let second = rows(&cols(&self.mq.transpose(), x), &self.s);
        first + second * self.diffusion_scale()
    }
}

/// Weighted quadrature nodes on one element, with the two shape functions
/// that live there already folded into the weights.
#[derive(Debug, Clone, Default)]
struct ElementNodes {
    at: Vec<f64>,
    /// Weight times the shape function rising to the element's right node.
    up: Vec<f64>,
    /// Weight times the shape function falling from the element's left node.
    down: Vec<f64>,
}

fn direction_nodes(
    mesh: &UniformMesh1D,
    layers: &[Layer],
    level: u32,
    bubble: Option<&BubbleSpec>,
) -> Vec<ElementNodes> {
    let rule = GaussLegendre::five();
    let h = mesh.h();
    (1..=mesh.n())
        .map(|k| {
            let a = mesh.node(k - 1);
            let mut pts = graded_partition(a, mesh.node(k), layers);
            for _ in 0..level {
                pts = bisect(&pts);
            }
            let mut nodes = ElementNodes::default();
            for w in pts.windows(2) {
                for (x, wt) in rule.mapped(w[0], w[1]) {
                    let t = x - a;
                    let b = bubble.map_or(0.0, |s| s.eval(t));
                    nodes.at.push(x);
                    nodes.up.push(wt * (t / h + b));
                    nodes.down.push(wt * (1.0 - t / h - b));
                }
            }
            nodes
        })
        .collect()
}

fn bisect(pts: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * pts.len());
    for w in pts.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(pts.last());
    out
}

fn layer_list(layers: LayerScales) -> (Vec<Layer>, Vec<Layer>) {
    let x = layers.x_outflow.map(|w| Layer::new(1.0, w / 8.0, 40.0 * w)).into_iter().collect();
    let y = layers
        .y_walls
        .map(|w| vec![Layer::new(0.0, w / 8.0, 40.0 * w), Layer::new(1.0, w / 8.0, 40.0 * w)])
        .unwrap_or_default();
    (x, y)
}

fn load_matrix(problem: &Problem2D, mesh: &UniformMesh1D, bubble: &BubbleSpec, level: u32) -> Array2<f64> {
    let (xl, yl) = layer_list(problem.layers());
    let xs = direction_nodes(mesh, &xl, level, Some(bubble));
    let ys = direction_nodes(mesh, &yl, level, None);
    let n = mesh.n();
    let m = n - 1;
    let f = problem.f();
    // blocks[ex][ey] = [[up.up, up.down], [down.up, down.down]]
    let blocks: Vec<Vec<[[f64; 2]; 2]>> = xs
        .par_iter()
        .map(|xe| {
            ys.iter()
                .map(|ye| {
                    let mut acc = [[0.0; 2]; 2];
                    for (p, &x) in xe.at.iter().enumerate() {
                        let (mut su, mut sd) = (0.0, 0.0);
                        for (q, &y) in ye.at.iter().enumerate() {
                            let v = f.eval(x, y);
                            su += ye.up[q] * v;
                            sd += ye.down[q] * v;
                        }
                        acc[0][0] += xe.up[p] * su;
                        acc[0][1] += xe.up[p] * sd;
                        acc[1][0] += xe.down[p] * su;
                        acc[1][1] += xe.down[p] * sd;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut rhs = Array2::zeros((m, m));
    for ex in 1..=n {
        for ey in 1..=n {
            let b = blocks[ex - 1][ey - 1];
            for (xi, i) in [(0, ex), (1, ex - 1)] {
                for (yj, j) in [(0, ey), (1, ey - 1)] {
                    if (1..=m).contains(&i) && (1..=m).contains(&j) {
                        rhs[[i - 1, j - 1]] += b[xi][yj];
                    }
                }
            }
        }
    }
    rhs
}

/// Build the factors and the load matrix. Loads use tensor Gauss-5 on
/// layer-graded pieces, bisected until two levels agree.
pub fn assemble_2d(problem: &Problem2D, n: usize) -> Result<TensorSystem2D> {
    let mesh = UniformMesh1D::new(n)?;
    let bubble = BubbleSpec::quadratic(mesh.h(), problem.epsilon(), BetaPolicy::Special)?;
    let mut coarse = load_matrix(problem, &mesh, &bubble, 0);
    let mut estimate = f64::INFINITY;
    for level in 1..=RHS_MAX_LEVEL {
        let fine = load_matrix(problem, &mesh, &bubble, level);
        let diff = (&fine - &coarse).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let scale = fine.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if diff <= RHS_TOLERANCE * scale || diff == 0.0 {
            return TensorSystem2D::from_rhs(n, problem.epsilon(), fine);
        }
        estimate = diff / scale;
        coarse = fine;
    }
    Err(UpgError::QuadratureFailure { estimate })
}

/// Solve through the `M`-orthonormal sine eigenvectors: one tridiagonal
/// solve per eigenvalue.
pub fn solve_2d_fast(sys: &TensorSystem2D) -> Result<PiecewiseLinearFE2D> {
    let mesh = sys.mesh();
    let m = mesh.interior_count();
    let eig = sine_eigensystem(m, mesh.h())?;
    let q = eig.vectors();
    let fq = sys.rhs.dot(q);
    let mqt = sys.mq.transpose();
    let scale = sys.diffusion_scale();
    let columns: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let a = sys.ce.add_scaled(scale * eig.lambdas()[k], &mqt);
            solve_tridiagonal(&a, &fq.column(k).to_vec())
        })
        .collect::<Result<_>>()?;
    let w = Array2::from_shape_fn((m, m), |(l, k)| columns[k][l]);
    PiecewiseLinearFE2D::new(mesh, w.dot(&q.t()))
}

/// `M (x) C^e + (eps/h) S (x) (M^q)^T`, row `(j-1) m + (i-1)` for test `g_i phi_j`.
pub fn dense_operator(sys: &TensorSystem2D) -> Result<Array2<f64>> {
    let m = sys.n - 1;
    let size = m * m;
    if size > DENSE_LIMIT {
        return Err(UpgError::Guardrail { unknowns: size, limit: DENSE_LIMIT });
    }
    let mqt = sys.mq.transpose();
    let scale = sys.diffusion_scale();
    let mut a = Array2::zeros((size, size));
    for j in 0..m {
        for k in j.saturating_sub(1)..(j + 2).min(m) {
            let (mjk, sjk) = (sys.m.get(j, k), sys.s.get(j, k));
            for i in 0..m {
                for l in i.saturating_sub(1)..(i + 2).min(m) {
                    a[[j * m + i, k * m + l]] = mjk * sys.ce.get(i, l) + scale * sjk * mqt.get(i, l);
                }
            }
        }
    }
    Ok(a)
}

/// Reference solve through the assembled Kronecker matrix.
pub fn solve_2d_dense(sys: &TensorSystem2D) -> Result<PiecewiseLinearFE2D> {
    let a = dense_operator(sys)?;
    let m = sys.n - 1;
    let b: Vec<f64> = (0..m * m).map(|r| sys.rhs[[r % m, r / m]]).collect();
    let u = dense_lu_solve(&a, &b)?;
    PiecewiseLinearFE2D::new(sys.mesh(), Array2::from_shape_fn((m, m), |(l, k)| u[k * m + l]))
}

/// Assemble and solve with the fast path.
pub fn solve_2d(problem: &Problem2D, n: usize) -> Result<PiecewiseLinearFE2D> {
    solve_2d_fast(&assemble_2d(problem, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::quadratic_bubble;
    use crate::field::Field2D;
    use crate::problem::fixture_example1;
    use rand::{Rng, SeedableRng};

    fn max_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        (a - b).iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    fn random_system(n: usize, eps: f64, seed: u64) -> TensorSystem2D {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let m = n - 1;
        TensorSystem2D::from_rhs(n, eps, Array2::from_shape_fn((m, m), |_| rng.gen_range(-1.0..1.0))).unwrap()
    }

    #[test]
    fn zero_load() {
        let p = Problem2D::new(0.01, Field2D::zero(), None).unwrap();
        let sys = assemble_2d(&p, 6).unwrap();
        assert!(sys.rhs.iter().all(|&v| v == 0.0));
        assert!(solve_2d_fast(&sys).unwrap().coeffs().iter().all(|&v| v == 0.0));
    }

    /// Galerkin entries `a(phi_l phi_k, g_i phi_j)` from 1D quadrature, compared
    /// against the Kronecker matrix. Guards the ordering and the transpose.
    #[test]
    fn dense_operator_matches_bilinear_form() {
        let (n, eps) = (5, 0.07);
        let sys = random_system(n, eps, 1);
        let a = dense_operator(&sys).unwrap();
        let mesh = sys.mesh();
        let h = mesh.h();
        let beta = sys.beta;
        let m = n - 1;
        let hat = |l: usize, x: f64| (1.0 - (x - mesh.node(l)).abs() / h).max(0.0);
        let dhat = |l: usize, x: f64| {
            let d = x - mesh.node(l);
            if d.abs() >= h { 0.0 } else if d < 0.0 { 1.0 / h } else { -1.0 / h }
        };
        let bub = |k: usize, x: f64| {
            let t = x - mesh.node(k - 1);
            if (0.0..=h).contains(&t) { quadratic_bubble(t, h, beta) } else { 0.0 }
        };
        let dbub = |k: usize, x: f64| {
            let t = x - mesh.node(k - 1);
            if (0.0..=h).contains(&t) { 4.0 * beta / (h * h) * (h - 2.0 * t) } else { 0.0 }
        };
        let g = |i: usize, x: f64| hat(i, x) + bub(i, x) - bub(i + 1, x);
        let dg = |i: usize, x: f64| dhat(i, x) + dbub(i, x) - dbub(i + 1, x);
        let rule = GaussLegendre::new(8);
        let int = |f: &dyn Fn(f64) -> f64| -> f64 {
            (1..=n).map(|k| rule.integrate(f, mesh.node(k - 1), mesh.node(k))).sum()
        };
        for i in 1..=m {
            for j in 1..=m {
                for l in 1..=m {
                    for k in 1..=m {
                        let want = eps * int(&|x| dhat(l, x) * dg(i, x)) * int(&|y| hat(k, y) * hat(j, y))
                            + eps * int(&|x| hat(l, x) * g(i, x)) * int(&|y| dhat(k, y) * dhat(j, y))
                            + int(&|x| dhat(l, x) * g(i, x)) * int(&|y| hat(k, y) * hat(j, y));
                        let got = a[[(j - 1) * m + (i - 1), (k - 1) * m + (l - 1)]];
                        assert!((got - want).abs() < 1e-13, "({i},{j}) <- ({l},{k}): {got} vs {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn fast_matches_dense() {
        for &n in &[4, 8] {
            for &eps in &[0.1, 0.01, 1e-3, 1e-6, 1e-8] {
                let sys = random_system(n, eps, n as u64);
                let fast = solve_2d_fast(&sys).unwrap();
                let dense = solve_2d_dense(&sys).unwrap();
                assert!(max_diff(fast.coeffs(), dense.coeffs()) < 1e-10, "n = {n}, eps = {eps}");
                let back = sys.apply(fast.coeffs());
                assert!(max_diff(&back, &sys.rhs) < 1e-11);
            }
        }
    }

    #[test]
    fn scalar_system() {
        let sys = TensorSystem2D::from_rhs(2, 0.3, Array2::from_elem((1, 1), 2.5)).unwrap();
        let a = dense_operator(&sys).unwrap();
        let u = solve_2d_dense(&sys).unwrap();
        assert!((u.coeffs()[[0, 0]] - 2.5 / a[[0, 0]]).abs() < 1e-15);
    }

    #[test]
    fn kronecker_row_sums() {
        let sys = random_system(6, 0.02, 3);
        let m = 5;
        let mut plain = sys.clone();
        plain.epsilon = 0.0;
        let a = dense_operator(&plain).unwrap();
        let rs = |t: &TridiagonalMatrix, i: usize| (0..m).map(|l| t.get(i, l)).sum::<f64>();
        for j in 0..m {
            for i in 0..m {
                let row: f64 = a.row(j * m + i).sum();
                assert!((row - rs(&sys.m, j) * rs(&sys.ce, i)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dense_guardrail() {
        let sys = random_system(66, 0.1, 4);
        assert!(matches!(dense_operator(&sys), Err(UpgError::Guardrail { .. })));
    }

    #[test]
    fn separable_load() {
        use std::f64::consts::PI;
        let n = 8;
        let eps = 0.01;
        let p = Problem2D::new(eps, Field2D::new(|_, y| (PI * y).sin()), None).unwrap();
        let sys = assemble_2d(&p, n).unwrap();
        let mesh = sys.mesh();
        let h = mesh.h();
        // (1, g_i) = h for the interior test functions
        let rule = GaussLegendre::new(10);
        for i in 1..n {
            for j in 1..n {
                let hat_y: f64 = [(j - 1, j), (j, j + 1)]
                    .into_iter()
                    .map(|(a, b)| {
                        rule.integrate(
                            |y| (PI * y).sin() * (1.0 - (y - mesh.node(j)).abs() / h),
                            mesh.node(a),
                            mesh.node(b),
                        )
                    })
                    .sum();
                assert!((sys.rhs[[i - 1, j - 1]] - h * hat_y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn linear_in_the_load() {
        let n = 16;
        let eps = 1e-3;
        let f1 = Field2D::new(|x, y| x.exp() * y);
        let f2 = Field2D::new(|x, y| (3.0 * y).cos() + x * x);
        let sum = {
            let (a, b) = (f1.clone(), f2.clone());
            Field2D::new(move |x, y| a.eval(x, y) + b.eval(x, y))
        };
        let solve = |f: Field2D| solve_2d(&Problem2D::new(eps, f, None).unwrap(), n).unwrap();
        let (u1, u2, u12) = (solve(f1), solve(f2), solve(sum));
        assert!(max_diff(&(u1.coeffs() + u2.coeffs()), u12.coeffs()) < 1e-11);
    }

    #[test]
    fn limit_of_convection_factor() {
        for &n in &[8, 64] {
            let h = 1.0 / n as f64;
            let sys = random_system(n, 1e-4 * h, 5);
            let limit = TridiagonalMatrix::from_stencil(n - 1, -1.0, 1.0, 0.0).unwrap();
            assert!(sys.ce.add_scaled(-1.0, &limit).norm_inf() <= 1e-10);
        }
    }

    #[test]
    fn example1_is_accurate_at_nodes() {
        let n = 32;
        let p = fixture_example1(1e-8).unwrap();
        let u = solve_2d(&p, n).unwrap();
        let exact = p.exact().unwrap();
        let mesh = u.mesh();
        let mut worst = 0.0f64;
        for l in 1..n {
            for k in 1..n {
                worst = worst.max((exact.u.eval(mesh.node(l), mesh.node(k)) - u.nodal(l, k)).abs());
            }
        }
        assert!(worst < 5e-3, "{worst}");
    }
}
