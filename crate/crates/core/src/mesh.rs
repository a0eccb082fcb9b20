use crate::error::{Result, UpgError};

/// Uniform partition of `[0, 1]` into `n` subintervals of width `h = 1/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformMesh1D {
    n: usize,
    h: f64,
}

impl UniformMesh1D {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(UpgError::Size(format!("mesh needs n >= 2 subintervals, got {n}")));
        }
        Ok(Self { n, h: 1.0 / n as f64 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of interior nodes, `n - 1`.
    pub fn interior_count(&self) -> usize {
        self.n - 1
    }

    /// Node `x_j = j/n`. Computed as a quotient so that `x_n == 1` exactly.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j <= self.n);
        j as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |j| self.node(j))
    }

    /// Index of the element `[x_{k-1}, x_k]` (1-based `k`) that contains `x`.
    /// Nodes belong to the element on their left, except `x = 0`.
    pub fn element_of(&self, x: f64) -> usize {
        let k = (x * self.n as f64).ceil() as usize;
        k.clamp(1, self.n)
    }
}
