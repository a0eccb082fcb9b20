//! Direct solvers: Thomas elimination, dense partial-pivoting LU, and the
//! analytic generalized eigensystem of the 1D stiffness/mass pair.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};

use crate::error::{Result, UpgError};
use crate::tridiag::TridiagonalMatrix;

const RESIDUAL_FACTOR: f64 = 1e-12;
const SINGULAR_PIVOT: f64 = 1e-300;

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Thomas elimination without pivoting, residual-checked.
///
/// Returns [`UpgError::PivotBreakdown`] on a zero or subnormal pivot, or when
/// `|A x - rhs|_inf > 1e-12 (|A|_inf |x|_inf + |rhs|_inf)`.
pub fn thomas_solve(a: &TridiagonalMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let m = a.size();
    if rhs.len() != m {
        return Err(UpgError::Size(format!("rhs length {} does not match matrix size {m}", rhs.len())));
    }
    let (sub, diag, sup) = (a.sub(), a.diag(), a.sup());
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot = diag[0];
    if !pivot.is_normal() {
        return Err(UpgError::PivotBreakdown { row: 0 });
    }
    if m > 1 {
        c[0] = sup[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..m {
        pivot = diag[i] - sub[i - 1] * c[i - 1];
        if !pivot.is_normal() {
            return Err(UpgError::PivotBreakdown { row: i });
        }
        if i + 1 < m {
            c[i] = sup[i] / pivot;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..m.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }

    let ax = a.matvec(&x);
    let resid = ax.iter().zip(rhs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let scale = a.norm_inf() * norm_inf(&x) + norm_inf(rhs);
    if !(resid <= RESIDUAL_FACTOR * scale) {
        return Err(UpgError::PivotBreakdown { row: m - 1 });
    }
    Ok(x)
}

/// Thomas elimination falling back to dense LU when it breaks down.
pub fn solve_tridiagonal(a: &TridiagonalMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    match thomas_solve(a, rhs) {
        Err(UpgError::PivotBreakdown { .. }) => {
            dense_lu_solve(&a.to_dense(), rhs)
        }
        other => other,
    }
}

/// Partial-pivoting LU factorization of a square matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Array2<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &Array2<f64>) -> Result<Self> {
        let (m, k) = a.dim();
        if m != k || m == 0 {
            return Err(UpgError::Size(format!("LU needs a nonempty square matrix, got {m}x{k}")));
        }
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..m).collect();
        for col in 0..m {
            let (p, pmax) = (col..m)
                .map(|r| (r, lu[[r, col]].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax >= SINGULAR_PIVOT) {
                return Err(UpgError::SingularMatrix { row: col, pivot: pmax });
            }
            if p != col {
                for j in 0..m {
                    lu.swap([p, j], [col, j]);
                }
                perm.swap(p, col);
            }
            let piv = lu[[col, col]];
            for r in col + 1..m {
                let l = lu[[r, col]] / piv;
                lu[[r, col]] = l;
                if l != 0.0 {
                    for j in col + 1..m {
                        lu[[r, j]] -= l * lu[[col, j]];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = self.perm.len();
        if rhs.len() != m {
            return Err(UpgError::Size(format!("rhs length {} does not match matrix size {m}", rhs.len())));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..m {
            let s: f64 = (0..i).map(|j| self.lu[[i, j]] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..m).rev() {
            let s: f64 = (i + 1..m).map(|j| self.lu[[i, j]] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[[i, i]];
        }
        Ok(x)
    }
}

/// Dense partial-pivoting LU solve.
pub fn dense_lu_solve(a: &Array2<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    LuFactors::new(a)?.solve(rhs)
}

/// Generalized eigenpairs of `S z = lambda M z` with `S = tridiag(-1, 2, -1)`
/// and `M = (h/6) tridiag(1, 4, 1)`, built from sampled sine vectors.
#[derive(Debug, Clone)]
pub struct SineEigensystem {
    lambdas: Vec<f64>,
    /// Column `k` is the `M`-normalized eigenvector for `lambdas[k]`.
    q: Array2<f64>,
}

impl SineEigensystem {
    pub fn size(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.q
    }
}

/// Eigensystem for `m = n - 1` interior nodes of a mesh with width `h = 1/n`.
pub fn sine_eigensystem(m: usize, h: f64) -> Result<SineEigensystem> {
    if m == 0 {
        return Err(UpgError::Size("eigensystem needs m >= 1".into()));
    }
    let n = m + 1;
    let mut lambdas = Vec::with_capacity(m);
    let mut q = Array2::<f64>::zeros((m, m));
    for k in 1..=m {
        let theta = k as f64 * PI / n as f64;
        let cos = theta.cos();
        let mass = h / 6.0 * (4.0 + 2.0 * cos);
        lambdas.push((2.0 - 2.0 * cos) / mass);
        // sum_l sin^2(k l pi / n) = n / 2
        let scale = 1.0 / (mass * n as f64 / 2.0).sqrt();
        for l in 1..=m {
            q[[l - 1, k - 1]] = scale * ((k * l) as f64 * PI / n as f64).sin();
        }
    }
    Ok(SineEigensystem { lambdas, q })
}

/// Largest eigenvalue estimate of a symmetric tridiagonal matrix by power
/// iteration.
pub fn power_iteration(a: &TridiagonalMatrix, iterations: usize) -> f64 {
    let m = a.size();
    let mut v: Array1<f64> = Array1::from_shape_fn(m, |i| 1.0 + ((i * 7919) % 13) as f64 / 13.0);
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let norm = v.dot(&v).sqrt();
        v.mapv_inplace(|x| x / norm);
        let w = Array1::from(a.matvec(v.as_slice().expect("contiguous")));
        lambda = v.dot(&w);
        v = w;
    }
    lambda
}
