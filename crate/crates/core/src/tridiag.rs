use ndarray::Array2;

use crate::error::{Result, UpgError};

/// Square tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let m = diag.len();
        if m == 0 {
            return Err(UpgError::Size("tridiagonal matrix must have size >= 1".into()));
        }
        if sub.len() != m - 1 || sup.len() != m - 1 {
            return Err(UpgError::Size(format!(
                "off-diagonals of a {m}x{m} matrix need length {}, got {} and {}",
                m - 1,
                sub.len(),
                sup.len()
            )));
        }
        Ok(Self { sub, diag, sup })
    }

    /// Constant-stencil matrix `tridiag(lower, center, upper)`.
    pub fn from_stencil(m: usize, lower: f64, center: f64, upper: f64) -> Result<Self> {
        if m == 0 {
            return Err(UpgError::Size("tridiagonal matrix must have size >= 1".into()));
        }
        Ok(Self { sub: vec![lower; m - 1], diag: vec![center; m], sup: vec![upper; m - 1] })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    pub fn diag_mut(&mut self) -> &mut [f64] {
        &mut self.diag
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.sub[j]
        } else if j == i + 1 {
            self.sup[i]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let m = self.size();
        assert_eq!(x.len(), m, "matvec dimension mismatch");
        (0..m)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < m {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self { sub: self.sup.clone(), diag: self.diag.clone(), sup: self.sub.clone() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let f = |v: &Vec<f64>| v.iter().map(|x| x * s).collect();
        Self { sub: f(&self.sub), diag: f(&self.diag), sup: f(&self.sup) }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.size(), other.size(), "size mismatch");
        let f = |a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).map(|(x, y)| x + s * y).collect();
        Self {
            sub: f(&self.sub, &other.sub),
            diag: f(&self.diag, &other.diag),
            sup: f(&self.sup, &other.sup),
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let m = self.size();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.sub[i - 1].abs();
                }
                if i + 1 < m {
                    s += self.sup[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let m = self.size();
        Array2::from_shape_fn((m, m), |(i, j)| self.get(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks_sizes() {
        assert!(TridiagonalMatrix::new(vec![], vec![], vec![]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0], vec![1.0, 2.0], vec![]).is_err());
        assert!(TridiagonalMatrix::from_stencil(0, 1.0, 2.0, 3.0).is_err());
    }

    #[test]
    fn dense_view_and_matvec() {
        let a = TridiagonalMatrix::from_stencil(4, -1.0, 2.0, 3.0).unwrap();
        let d = a.to_dense();
        assert_eq!(d[[1, 0]], -1.0);
        assert_eq!(d[[0, 1]], 3.0);
        assert_eq!(d[[0, 2]], 0.0);
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = a.matvec(&x);
        let yd = d.dot(&ndarray::arr1(&x));
        for i in 0..4 {
            assert_eq!(y[i], yd[i]);
        }
        assert_eq!(a.norm_inf(), 6.0);
        assert_eq!(a.transpose().get(0, 1), -1.0);
    }
}
