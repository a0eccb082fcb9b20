//! Continuous piecewise-linear (1D) and bilinear (2D) finite element
//! functions with homogeneous Dirichlet values.

use ndarray::Array2;

use crate::error::{Result, UpgError};
use crate::field::Field1D;
use crate::mesh::UniformMesh1D;

/// Interior nodal values of a `C^0-P^1` function; boundary values are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFE1D {
    mesh: UniformMesh1D,
    coeffs: Vec<f64>,
}

impl PiecewiseLinearFE1D {
    pub fn new(mesh: UniformMesh1D, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.interior_count() {
            return Err(UpgError::Size(format!(
                "expected {} interior coefficients, got {}",
                mesh.interior_count(),
                coeffs.len()
            )));
        }
        Ok(Self { mesh, coeffs })
    }

    pub fn zero(mesh: UniformMesh1D) -> Self {
        Self { coeffs: vec![0.0; mesh.interior_count()], mesh }
    }

    /// Hat function `phi_j` for interior node `j` (1-based).
    pub fn hat(mesh: UniformMesh1D, j: usize) -> Result<Self> {
        if j == 0 || j >= mesh.n() {
            return Err(UpgError::Domain(format!("hat index {j} is not interior")));
        }
        let mut v = Self::zero(mesh);
        v.coeffs[j - 1] = 1.0;
        Ok(v)
    }

    pub fn mesh(&self) -> &UniformMesh1D {
        &self.mesh
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Value at node `j`, `0 <= j <= n`.
    #[inline]
    pub fn nodal(&self, j: usize) -> f64 {
        if j == 0 || j == self.mesh.n() {
            0.0
        } else {
            self.coeffs[j - 1]
        }
    }

    /// `a * self + b * other` on the same mesh.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.mesh != other.mesh {
            return Err(UpgError::Size("FE functions live on different meshes".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { mesh: self.mesh, coeffs })
    }

    /// Value at `x`, checked to lie in `[0, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(UpgError::Domain(format!("evaluation point {x} outside [0, 1]")));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        let k = self.mesh.element_of(x);
        let left = self.mesh.node(k - 1);
        if x == self.mesh.node(k) {
            return self.nodal(k);
        }
        let t = (x - left) * self.mesh.n() as f64;
        if t <= 0.0 {
            return self.nodal(k - 1);
        }
        (1.0 - t) * self.nodal(k - 1) + t * self.nodal(k)
    }

    /// Constant slope on element `k` (1-based), `[x_{k-1}, x_k]`.
    pub fn slope(&self, k: usize) -> f64 {
        (self.nodal(k) - self.nodal(k - 1)) * self.mesh.n() as f64
    }
}

/// Evaluate `v` at `x`.
pub fn eval_fe_1d(v: &PiecewiseLinearFE1D, x: f64) -> Result<f64> {
    v.eval(x)
}

/// Nodal interpolant `I_h u` (interior values `u(x_j)`).
pub fn nodal_interpolant_1d(u: &Field1D, mesh: UniformMesh1D) -> PiecewiseLinearFE1D {
    let coeffs = (1..mesh.n()).map(|j| u.eval(mesh.node(j))).collect();
    PiecewiseLinearFE1D { mesh, coeffs }
}

/// Tensor-product bilinear function, `coeffs[[l-1, k-1]]` multiplying
/// `phi_l(x) phi_k(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFE2D {
    mesh: UniformMesh1D,
    coeffs: Array2<f64>,
}

impl PiecewiseLinearFE2D {
    pub fn new(mesh: UniformMesh1D, coeffs: Array2<f64>) -> Result<Self> {
        let m = mesh.interior_count();
        if coeffs.dim() != (m, m) {
            return Err(UpgError::Size(format!("expected {m}x{m} coefficients, got {:?}", coeffs.dim())));
        }
        Ok(Self { mesh, coeffs })
    }

    pub fn mesh(&self) -> &UniformMesh1D {
        &self.mesh
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    /// Value at grid node `(l, k)`, `0 <= l, k <= n`.
    #[inline]
    pub fn nodal(&self, l: usize, k: usize) -> f64 {
        let n = self.mesh.n();
        if l == 0 || k == 0 || l == n || k == n {
            0.0
        } else {
            self.coeffs[[l - 1, k - 1]]
        }
    }

    /// Value and gradient at `(x, y)` inside cell `(cx, cy)` (1-based element indices).
    pub fn eval_in_cell(&self, cx: usize, cy: usize, x: f64, y: f64) -> (f64, f64, f64) {
        let nf = self.mesh.n() as f64;
        let s = (x - self.mesh.node(cx - 1)) * nf;
        let t = (y - self.mesh.node(cy - 1)) * nf;
        let v00 = self.nodal(cx - 1, cy - 1);
        let v10 = self.nodal(cx, cy - 1);
        let v01 = self.nodal(cx - 1, cy);
        let v11 = self.nodal(cx, cy);
        let val = v00 * (1.0 - s) * (1.0 - t) + v10 * s * (1.0 - t) + v01 * (1.0 - s) * t + v11 * s * t;
        let dx = ((v10 - v00) * (1.0 - t) + (v11 - v01) * t) * nf;
        let dy = ((v01 - v00) * (1.0 - s) + (v11 - v10) * s) * nf;
        (val, dx, dy)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(UpgError::Domain(format!("evaluation point ({x}, {y}) outside the unit square")));
        }
        Ok(self.eval_in_cell(self.mesh.element_of(x), self.mesh.element_of(y), x, y).0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_function_and_nodal_basis() {
        let mesh = UniformMesh1D::new(5).unwrap();
        let z = PiecewiseLinearFE1D::zero(mesh);
        for &x in &[0.0, 0.13, 0.5, 1.0] {
            assert_eq!(eval_fe_1d(&z, x).unwrap(), 0.0);
        }
        for j in 1..5 {
            let phi = PiecewiseLinearFE1D::hat(mesh, j).unwrap();
            for i in 0..=5 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(phi.eval(mesh.node(i)).unwrap(), expected);
            }
        }
    }

    #[test]
    fn hand_interpolation() {
        let mesh = UniformMesh1D::new(4).unwrap();
        let v = PiecewiseLinearFE1D::new(mesh, vec![0.0, 1.0, 0.0]).unwrap();
        assert!((v.eval(0.375).unwrap() - 0.5).abs() < 1e-16);
    }

    #[test]
    fn out_of_range_is_domain_error() {
        let mesh = UniformMesh1D::new(4).unwrap();
        let v = PiecewiseLinearFE1D::zero(mesh);
        assert!(matches!(v.eval(-0.1), Err(UpgError::Domain(_))));
        assert!(matches!(v.eval(1.5), Err(UpgError::Domain(_))));
        assert!(PiecewiseLinearFE1D::new(mesh, vec![1.0]).is_err());
    }

    #[test]
    fn interpolant_values() {
        let mesh = UniformMesh1D::new(2).unwrap();
        let u = Field1D::new(|x| x * (1.0 - x));
        assert_eq!(nodal_interpolant_1d(&u, mesh).coeffs(), &[0.25]);
        let zero = nodal_interpolant_1d(&Field1D::zero(), UniformMesh1D::new(9).unwrap());
        assert!(zero.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn bilinear_evaluation() {
        let mesh = UniformMesh1D::new(2).unwrap();
        let v = PiecewiseLinearFE2D::new(mesh, Array2::from_elem((1, 1), 2.0)).unwrap();
        assert_eq!(v.eval(0.5, 0.5).unwrap(), 2.0);
        assert!((v.eval(0.25, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((v.eval(0.25, 0.25).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(v.eval(0.0, 0.3).unwrap(), 0.0);
        let (_, dx, dy) = v.eval_in_cell(1, 1, 0.25, 0.25);
        assert!((dx - 2.0).abs() < 1e-14 && (dy - 2.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn nodal_reproduction_and_linearity(
            coeffs_a in prop::collection::vec(-10.0f64..10.0, 7),
            coeffs_b in prop::collection::vec(-10.0f64..10.0, 7),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            x in 0.0f64..=1.0,
        ) {
            let mesh = UniformMesh1D::new(8).unwrap();
            let va = PiecewiseLinearFE1D::new(mesh, coeffs_a.clone()).unwrap();
            let vb = PiecewiseLinearFE1D::new(mesh, coeffs_b).unwrap();
            for j in 1..8 {
                prop_assert_eq!(va.eval(mesh.node(j)).unwrap(), coeffs_a[j - 1]);
            }
            let combo = va.combine(a, &vb, b).unwrap();
            let lhs = combo.eval(x).unwrap();
            let rhs = a * va.eval(x).unwrap() + b * vb.eval(x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-15 * (1.0 + lhs.abs()) * 60.0);
        }
    }
}
