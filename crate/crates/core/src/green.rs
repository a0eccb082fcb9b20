//! Green's function of `-eps u'' + u' = f`, `u(0) = u(1) = 0`, and its
//! values at interior node pairs, which form the exact inverse of the
//! exponential-bubble system matrix.

use ndarray::Array2;
use rayon::prelude::*;

use crate::assembly::assemble_upg_matrix;
use crate::bubble::{exponential_average, BubbleSpec};
use crate::error::{Result, UpgError};
use crate::mesh::UniformMesh1D;
use crate::tridiag::TridiagonalMatrix;

/// `G(x, s)` with `u(x) = int_0^1 G(x, s) f(s) ds`.
///
/// Only nonpositive exponents are evaluated, so the result is finite for
/// every positive `epsilon`.
pub fn green_value(x: f64, s: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&s) {
        return Err(UpgError::Domain(format!("Green's function arguments ({x}, {s}) outside [0, 1]")));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(UpgError::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(green_unchecked(x, s, epsilon))
}

fn green_unchecked(x: f64, s: f64, epsilon: f64) -> f64 {
    let denom = -(-1.0 / epsilon).exp_m1();
    if s < x {
        -((x - 1.0) / epsilon).exp_m1() * -(-s / epsilon).exp_m1() / denom
    } else {
        (((x - s) / epsilon).exp() - (-s / epsilon).exp()) * -((s - 1.0) / epsilon).exp_m1() / denom
    }
}

/// `G^m[j-1][i-1] = G(x_j, x_i)` over interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrix {
    entries: Array2<f64>,
}

impl GreenMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// Entry for 1-based interior indices.
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.entries[[j - 1, i - 1]]
    }
}

pub fn green_matrix(n: usize, epsilon: f64) -> Result<GreenMatrix> {
    let mesh = UniformMesh1D::new(n)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(UpgError::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let m = mesh.interior_count();
    let rows: Vec<Vec<f64>> = (1..=m)
        .into_par_iter()
        .map(|j| (1..=m).map(|i| green_unchecked(mesh.node(j), mesh.node(i), epsilon)).collect())
        .collect();
    let entries = Array2::from_shape_fn((m, m), |(j, i)| rows[j][i]);
    Ok(GreenMatrix { entries })
}

/// The exponential-bubble system matrix `M^e_fe`.
pub fn exponential_system_matrix(n: usize, epsilon: f64) -> Result<TridiagonalMatrix> {
    assemble_upg_matrix(n, epsilon, exponential_average(1.0 / n as f64, epsilon)?)
}

/// `max |(A G^m - I)_{ji}|` for a given system matrix `a`.
pub fn inverse_residual(a: &TridiagonalMatrix, g: &GreenMatrix) -> Result<f64> {
    let m = g.size();
    if a.size() != m {
        return Err(UpgError::Size(format!("matrix of size {} against Green matrix of size {m}", a.size())));
    }
    let worst = (0..m)
        .into_par_iter()
        .map(|i| {
            let column: Vec<f64> = g.entries.column(i).to_vec();
            a.matvec(&column)
                .iter()
                .enumerate()
                .map(|(j, v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// `|| M^e_fe G^m - I ||_max`.
pub fn verify_inverse_identity(n: usize, epsilon: f64) -> Result<f64> {
    inverse_residual(&exponential_system_matrix(n, epsilon)?, &green_matrix(n, epsilon)?)
}

/// Test function `g_i = phi_i + B_i - B_{i+1}` built from exponential bubbles.
fn test_function(mesh: &UniformMesh1D, bubble: &BubbleSpec, i: usize, s: f64) -> f64 {
    let h = mesh.h();
    let left = mesh.node(i - 1);
    let right = mesh.node(i + 1);
    if s <= left || s >= right {
        return 0.0;
    }
    let mid = mesh.node(i);
    if s <= mid {
        let t = s - left;
        t / h + bubble.eval(t)
    } else {
        let t = s - mid;
        1.0 - t / h - bubble.eval(t)
    }
}

/// Compare `s -> G(x_j, s)` against `sum_i G(x_j, x_i) g_i(s)` at 20 points
/// per element (both ends included) and return the largest deviation.
pub fn green_in_test_space_check(n: usize, epsilon: f64, j: usize) -> Result<f64> {
    let mesh = UniformMesh1D::new(n)?;
    if j == 0 || j >= n {
        return Err(UpgError::Domain(format!("node index {j} is not interior")));
    }
    let bubble = BubbleSpec::exponential(mesh.h(), epsilon)?;
    let xj = mesh.node(j);
    let weights: Vec<f64> = (1..n).map(|i| green_unchecked(xj, mesh.node(i), epsilon)).collect();
    let mut worst = 0.0f64;
    for k in 1..=n {
        let (a, b) = (mesh.node(k - 1), mesh.node(k));
        for p in 0..20 {
            let s = if p == 19 { b } else { a + (b - a) * p as f64 / 19.0 };
            // only g_{k-1} and g_k are nonzero on element k
            let combo: f64 = [k - 1, k]
                .into_iter()
                .filter(|&i| i >= 1 && i < n)
                .map(|i| weights[i - 1] * test_function(&mesh, &bubble, i, s))
                .sum();
            worst = worst.max((green_unchecked(xj, s, epsilon) - combo).abs());
        }
    }
    Ok(worst)
}
