//! Model problems `-eps u'' + u' = f` on `(0, 1)` and
//! `-eps Lap u + u_x = f` on the unit square, both with zero Dirichlet data.

use crate::error::{Result, UpgError};
use crate::field::{Field1D, Field2D};
use crate::polyexp::PolyExp;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(UpgError::Domain(format!("epsilon must be positive, got {epsilon}")))
    }
}

/// Whether closed-form moments of `f` against the bubbles are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FClass {
    General,
    PolyExp,
}

/// Exact solution and its derivative.
#[derive(Debug, Clone)]
pub struct ExactSolution1D {
    pub u: Field1D,
    pub du: Field1D,
}

#[derive(Debug, Clone)]
pub struct Problem1D {
    epsilon: f64,
    f: Field1D,
    f_prime: Option<Field1D>,
    poly_exp: Option<PolyExp>,
}

impl Problem1D {
    /// General right-hand side; `f_prime` is only needed for the a priori bound.
    pub fn new(epsilon: f64, f: Field1D, f_prime: Option<Field1D>) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon, f, f_prime, poly_exp: None })
    }

    /// Poly-exponential right-hand side; `f'` comes from the closed form.
    pub fn with_poly_exp(epsilon: f64, f: PolyExp) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            f: f.clone().into(),
            f_prime: Some(f.derivative().into()),
            poly_exp: Some(f),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn f(&self) -> &Field1D {
        &self.f
    }

    pub fn f_prime(&self) -> Option<&Field1D> {
        self.f_prime.as_ref()
    }

    pub fn poly_exp(&self) -> Option<&PolyExp> {
        self.poly_exp.as_ref()
    }

    pub fn f_class(&self) -> FClass {
        if self.poly_exp.is_some() {
            FClass::PolyExp
        } else {
            FClass::General
        }
    }

    /// Same data with the closed-form tag dropped, forcing quadrature.
    pub fn as_general(&self) -> Self {
        Self { poly_exp: None, ..self.clone() }
    }
}

/// `u = x - (e^{x/eps} - 1)/(e^{1/eps} - 1)`, the solution for `f = 1`.
pub fn fixture_f1_exact(epsilon: f64) -> Result<ExactSolution1D> {
    check_epsilon(epsilon)?;
    let denom = -(-1.0 / epsilon).exp_m1();
    let u = Field1D::new(move |x| {
        x - (((x - 1.0) / epsilon).exp() - (-1.0 / epsilon).exp()) / denom
    });
    let du = Field1D::new(move |x| 1.0 - ((x - 1.0) / epsilon).exp() / (epsilon * denom));
    Ok(ExactSolution1D { u, du })
}

/// Solution components of `-eps v'' + v' = e^x`, `v(0) = v(1) = 0`.
#[derive(Debug, Clone, Copy)]
struct ExpRhsSolution {
    epsilon: f64,
    inv: f64,
    layer: f64,
}

impl ExpRhsSolution {
    fn new(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if epsilon == 1.0 {
            return Err(UpgError::Parameter("epsilon = 1 makes 1/(1 - epsilon) singular".into()));
        }
        let e = std::f64::consts::E;
        Ok(Self { epsilon, inv: 1.0 / (1.0 - epsilon), layer: (e - 1.0) / -(-1.0 / epsilon).exp_m1() })
    }

    fn v(&self, x: f64) -> f64 {
        let e = std::f64::consts::E;
        self.inv * (x.exp() - e - self.layer * (((x - 1.0) / self.epsilon).exp() - 1.0))
    }

    fn dv(&self, x: f64) -> f64 {
        self.inv * (x.exp() - self.layer * ((x - 1.0) / self.epsilon).exp() / self.epsilon)
    }
}

/// Solution of `-eps v'' + v' = e^x` with zero end values.
pub fn fixture_example1_v(epsilon: f64) -> Result<ExactSolution1D> {
    let s = ExpRhsSolution::new(epsilon)?;
    Ok(ExactSolution1D { u: Field1D::new(move |x| s.v(x)), du: Field1D::new(move |x| s.dv(x)) })
}

/// Solution of `-eps u'' + u' = x e^x` with zero end values.
pub fn fixture_xexp_exact(epsilon: f64) -> Result<ExactSolution1D> {
    check_epsilon(epsilon)?;
    if epsilon == 1.0 {
        return Err(UpgError::Parameter("epsilon = 1 is resonant for x e^x".into()));
    }
    // particular part (a x + b) e^x, homogeneous part c1 + c2 e^{(x-1)/eps}
    let a = 1.0 / (1.0 - epsilon);
    let b = (2.0 * epsilon - 1.0) / ((1.0 - epsilon) * (1.0 - epsilon));
    let e = std::f64::consts::E;
    let tail = (-1.0 / epsilon).exp();
    let c2 = (b - (a + b) * e) / (1.0 - tail);
    let c1 = -b - c2 * tail;
    let u = Field1D::new(move |x| (a * x + b) * x.exp() + c1 + c2 * ((x - 1.0) / epsilon).exp());
    let du = Field1D::new(move |x| {
        (a * x + a + b) * x.exp() + c2 * ((x - 1.0) / epsilon).exp() / epsilon
    });
    Ok(ExactSolution1D { u, du })
}

/// Exact solution with gradient on the unit square.
#[derive(Debug, Clone)]
pub struct ExactSolution2D {
    pub u: Field2D,
    pub ux: Field2D,
    pub uy: Field2D,
}

/// Where the data varies on short scales; used to grade quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LayerScales {
    /// Width of the exponential layer at `x = 1`.
    pub x_outflow: Option<f64>,
    /// Width of the layers at `y = 0` and `y = 1`.
    pub y_walls: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Problem2D {
    epsilon: f64,
    f: Field2D,
    exact: Option<ExactSolution2D>,
    layers: LayerScales,
    boundary_mismatch: f64,
}

impl Problem2D {
    pub fn new(epsilon: f64, f: Field2D, exact: Option<ExactSolution2D>) -> Result<Self> {
        check_epsilon(epsilon)?;
        let boundary_mismatch = exact.as_ref().map_or(0.0, |e| boundary_max(&e.u));
        Ok(Self { epsilon, f, exact, layers: LayerScales::default(), boundary_mismatch })
    }

    pub fn with_layers(mut self, layers: LayerScales) -> Self {
        self.layers = layers;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn f(&self) -> &Field2D {
        &self.f
    }

    pub fn exact(&self) -> Option<&ExactSolution2D> {
        self.exact.as_ref()
    }

    pub fn layers(&self) -> LayerScales {
        self.layers
    }

    /// Largest `|u|` on the boundary of the manufactured solution; nonzero when
    /// it does not satisfy the homogeneous Dirichlet condition.
    pub fn boundary_mismatch(&self) -> f64 {
        self.boundary_mismatch
    }
}

fn boundary_max(u: &Field2D) -> f64 {
    let samples = 2000;
    (0..=samples)
        .map(|i| {
            let s = i as f64 / samples as f64;
            [u.eval(s, 0.0), u.eval(s, 1.0), u.eval(0.0, s), u.eval(1.0, s)]
                .into_iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .fold(0.0, f64::max)
}

/// `u = v(x) sin(pi y)`: exponential layer at `x = 1`.
pub fn fixture_example1(epsilon: f64) -> Result<Problem2D> {
    use std::f64::consts::PI;
    let s = ExpRhsSolution::new(epsilon)?;
    let f = Field2D::new(move |x, y| (x.exp() + epsilon * PI * PI * s.v(x)) * (PI * y).sin());
    let exact = ExactSolution2D {
        u: Field2D::new(move |x, y| s.v(x) * (PI * y).sin()),
        ux: Field2D::new(move |x, y| s.dv(x) * (PI * y).sin()),
        uy: Field2D::new(move |x, y| s.v(x) * PI * (PI * y).cos()),
    };
    Ok(Problem2D::new(epsilon, f, Some(exact))?
        .with_layers(LayerScales { x_outflow: Some(epsilon), y_walls: None }))
}

/// `u = v(x) w(y)` with `w = y(1-y) + e^{-y/sqrt(eps)} + e^{-(1-y)/sqrt(eps)}`:
/// exponential layer at `x = 1` and parabolic layers at `y = 0, 1`.
/// `w` does not vanish at `y = 0, 1`; see [`Problem2D::boundary_mismatch`].
pub fn fixture_example2(epsilon: f64) -> Result<Problem2D> {
    let s = ExpRhsSolution::new(epsilon)?;
    let sq = epsilon.sqrt();
    let walls = move |y: f64| (-y / sq).exp() + (-(1.0 - y) / sq).exp();
    let w = move |y: f64| y * (1.0 - y) + walls(y);
    let dw = move |y: f64| 1.0 - 2.0 * y + ((-(1.0 - y) / sq).exp() - (-y / sq).exp()) / sq;
    // -eps v'' + v' = e^x and eps w'' = -2 eps + walls(y)
    let f = Field2D::new(move |x, y| x.exp() * w(y) - s.v(x) * (walls(y) - 2.0 * epsilon));
    let exact = ExactSolution2D {
        u: Field2D::new(move |x, y| s.v(x) * w(y)),
        ux: Field2D::new(move |x, y| s.dv(x) * w(y)),
        uy: Field2D::new(move |x, y| s.v(x) * dw(y)),
    };
    Ok(Problem2D::new(epsilon, f, Some(exact))?
        .with_layers(LayerScales { x_outflow: Some(epsilon), y_walls: Some(sq) }))
}
