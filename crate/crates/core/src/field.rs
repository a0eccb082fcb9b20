use std::fmt;
use std::sync::Arc;

use crate::polyexp::PolyExp;

/// A real function on `[0, 1]`, shareable across threads.
#[derive(Clone)]
pub struct Field1D(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl Field1D {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }

    /// Largest `|f|` over `samples + 1` equispaced points of `[0, 1]`.
    pub fn sup_norm_sampled(&self, samples: usize) -> f64 {
        let samples = samples.max(1);
        (0..=samples)
            .map(|i| self.eval(i as f64 / samples as f64).abs())
            .fold(0.0, f64::max)
    }
}

impl From<PolyExp> for Field1D {
    fn from(p: PolyExp) -> Self {
        Self::new(move |x| p.eval(x))
    }
}

impl fmt::Debug for Field1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Field1D(..)")
    }
}

/// A real function on the unit square.
#[derive(Clone)]
pub struct Field2D(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl Field2D {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn zero() -> Self {
        Self::new(|_, _| 0.0)
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.0)(x, y)
    }
}

impl fmt::Debug for Field2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Field2D(..)")
    }
}
