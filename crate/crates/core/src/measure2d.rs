//! Error measures for 2D solutions, on the whole square or on a
//! layer-avoiding subdomain.

use rayon::prelude::*;

use crate::error::{Result, UpgError};
use crate::fe::PiecewiseLinearFE2D;
use crate::field::Field2D;
use crate::problem::{ExactSolution2D, LayerScales};
use crate::quadrature::{graded_partition, GaussLegendre, Layer};

const SNAP: f64 = 1e-12;

/// `[0, x_right] x [y_margin, 1 - y_margin]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subdomain {
    pub x_right: f64,
    pub y_margin: f64,
}

impl Subdomain {
    pub fn full() -> Self {
        Self { x_right: 1.0, y_margin: 0.0 }
    }

    pub fn new(x_right: f64, y_margin: f64) -> Result<Self> {
        if !(x_right > 0.0 && x_right <= 1.0) || !(0.0..0.5).contains(&y_margin) {
            return Err(UpgError::Domain(format!(
                "subdomain [0, {x_right}] x [{y_margin}, 1 - {y_margin}] is empty or outside the square"
            )));
        }
        Ok(Self { x_right, y_margin })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x <= self.x_right + SNAP && y >= self.y_margin - SNAP && y <= 1.0 - self.y_margin + SNAP
    }

    /// Whole cells only: a cell touching the excluded strip is dropped.
    fn keeps_cell(&self, x1: f64, y0: f64, y1: f64) -> bool {
        x1 <= self.x_right + SNAP && y0 >= self.y_margin - SNAP && y1 <= 1.0 - self.y_margin + SNAP
    }
}

/// `max |u(x_l, y_k) - u_{lk}|` over interior nodes in `sub`.
pub fn disc_inf_error_2d(u: &Field2D, uh: &PiecewiseLinearFE2D, sub: Subdomain) -> f64 {
    nodal_fold(uh, sub, |x, y, v| (u.eval(x, y) - v).abs())
}

/// Largest `|u_h|` and largest `|u|` over interior nodes in `sub`.
pub fn nodal_extrema(u: &Field2D, uh: &PiecewiseLinearFE2D, sub: Subdomain) -> (f64, f64) {
    (nodal_fold(uh, sub, |_, _, v| v.abs()), nodal_fold(uh, sub, |x, y, _| u.eval(x, y).abs()))
}

fn nodal_fold(uh: &PiecewiseLinearFE2D, sub: Subdomain, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let mesh = uh.mesh();
    let n = mesh.n();
    let mut worst = 0.0f64;
    for l in 1..n {
        for k in 1..n {
            let (x, y) = (mesh.node(l), mesh.node(k));
            if sub.contains(x, y) {
                worst = worst.max(f(x, y, uh.nodal(l, k)));
            }
        }
    }
    worst
}

/// `||u - u_h||` and `|u - u_h|_1` over the cells kept by `sub`, with tensor
/// Gauss-5 on pieces graded toward the layers of `u`.
pub fn l2_h1_errors_2d(
    exact: &ExactSolution2D,
    uh: &PiecewiseLinearFE2D,
    sub: Subdomain,
    layers: LayerScales,
) -> (f64, f64) {
    let mesh = *uh.mesh();
    let n = mesh.n();
    let rule = GaussLegendre::five();
    let xl: Vec<Layer> = layers.x_outflow.map(|w| Layer::new(1.0, w / 8.0, 40.0 * w)).into_iter().collect();
    let yl: Vec<Layer> = layers
        .y_walls
        .map(|w| vec![Layer::new(0.0, w / 8.0, 40.0 * w), Layer::new(1.0, w / 8.0, 40.0 * w)])
        .unwrap_or_default();
    let points = |a: f64, b: f64, layers: &[Layer]| -> Vec<(f64, f64)> {
        graded_partition(a, b, layers).windows(2).flat_map(|w| rule.mapped(w[0], w[1])).collect()
    };
    let ys: Vec<Vec<(f64, f64)>> = (1..=n).map(|k| points(mesh.node(k - 1), mesh.node(k), &yl)).collect();
    let sums: Vec<(f64, f64)> = (1..=n)
        .into_par_iter()
        .map(|cx| {
            let xs = points(mesh.node(cx - 1), mesh.node(cx), &xl);
            let mut acc = (0.0, 0.0);
            for cy in 1..=n {
                if !sub.keeps_cell(mesh.node(cx), mesh.node(cy - 1), mesh.node(cy)) {
                    continue;
                }
                for &(x, wx) in &xs {
                    for &(y, wy) in &ys[cy - 1] {
                        let (v, dx, dy) = uh.eval_in_cell(cx, cy, x, y);
                        let w = wx * wy;
                        let e = exact.u.eval(x, y) - v;
                        let ex = exact.ux.eval(x, y) - dx;
                        let ey = exact.uy.eval(x, y) - dy;
                        acc.0 += w * e * e;
                        acc.1 += w * (ex * ex + ey * ey);
                    }
                }
            }
            acc
        })
        .collect();
    let (l2, h1) = sums.iter().fold((0.0, 0.0), |a, s| (a.0 + s.0, a.1 + s.1));
    (l2.sqrt(), h1.sqrt())
}

/// All 2D error measures for one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport2D {
    pub disc_inf: f64,
    pub disc_inf_sub: f64,
    pub l2_full: f64,
    pub l2_sub: f64,
    pub h1_full: f64,
    pub h1_sub: f64,
}

pub fn error_report_2d(
    exact: &ExactSolution2D,
    uh: &PiecewiseLinearFE2D,
    sub: Subdomain,
    layers: LayerScales,
) -> ErrorReport2D {
    let (l2_full, h1_full) = l2_h1_errors_2d(exact, uh, Subdomain::full(), layers);
    let (l2_sub, h1_sub) = l2_h1_errors_2d(exact, uh, sub, layers);
    ErrorReport2D {
        disc_inf: disc_inf_error_2d(&exact.u, uh, Subdomain::full()),
        disc_inf_sub: disc_inf_error_2d(&exact.u, uh, sub),
        l2_full,
        l2_sub,
        h1_full,
        h1_sub,
    }
}
