//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 8 and 9 cannot hold as stated (see the notes printed with them)
//! and are listed in `KNOWN_UNATTAINABLE`. They still print FAIL. The process
//! exits nonzero on any other failure, or if a known-unattainable criterion
//! unexpectedly passes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use upg_core::assembly::{assemble_mq, assemble_s};
use upg_core::fe::{nodal_interpolant_1d, PiecewiseLinearFE1D};
use upg_core::green::verify_inverse_identity;
use upg_core::linalg::power_iteration;
use upg_core::measure2d::{disc_inf_error_2d, l2_h1_errors_2d, nodal_extrema, Subdomain};
use upg_core::mesh::UniformMesh1D;
use upg_core::solver1d::{
    discrete_inf_error, h1_semi_error, h1_semi_error_fe, l2_error, l2_error_fe, norm_inequality_check, solve_1d,
    thm_t_bound, DiscretizationConfig,
};
use upg_core::solver2d::{assemble_2d, solve_2d, solve_2d_dense, solve_2d_fast, TensorSystem2D};
use upg_core::study::{observed_order, ProblemId};
use upg_core::tridiag::TridiagonalMatrix;

const KNOWN_UNATTAINABLE: [u32; 2] = [8, 9];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn orders_at_least(errors: &[f64], min: f64) -> (bool, String) {
    let orders = observed_order(errors);
    let ok = orders[1..].iter().all(|o| o.is_some_and(|v| v >= min));
    let shown: Vec<String> =
        orders[1..].iter().map(|o| o.map_or("none".into(), |v| format!("{v:.3}"))).collect();
    (ok, format!("orders [{}] (need >= {min})", shown.join(", ")))
}

fn c1() -> Outcome {
    let mut worst = 0.0f64;
    for id in [ProblemId::F1, ProblemId::Exp] {
        for eps in [0.1, 0.01] {
            for n in [8, 16, 32] {
                if 1.0 / (n as f64 * eps) > 20.0 {
                    continue;
                }
                let (p, exact) = id.problem_1d(eps).unwrap();
                let sol = solve_1d(&p, n, DiscretizationConfig::exponential()).unwrap();
                worst = worst.max(discrete_inf_error(&exact.u, &sol));
            }
        }
    }
    outcome(worst <= 1e-9, format!("max nodal error {worst:.3e} (need <= 1e-9)"))
}

fn c2() -> Outcome {
    let mut worst = 0.0f64;
    for n in [4, 16, 64] {
        for eps in [0.1, 1e-3, 1e-6] {
            worst = worst.max(verify_inverse_identity(n, eps).unwrap());
        }
    }
    outcome(worst <= 1e-8, format!("max |M G - I| {worst:.3e} (need <= 1e-8)"))
}

fn c3() -> Outcome {
    let mut ok = true;
    let mut errors = Vec::new();
    let mut ratio = 0.0f64;
    for k in 5..=10 {
        let n = 1usize << k;
        let h = 1.0 / n as f64;
        let (p, exact) = ProblemId::Exp.problem_1d(h * h).unwrap();
        let sol = solve_1d(&p, n, DiscretizationConfig::quadratic_special()).unwrap();
        let e = discrete_inf_error(&exact.u, &sol);
        let b = thm_t_bound(&p, n).unwrap();
        ok &= e <= b.value && b.hypothesis;
        ratio = ratio.max(e / b.value);
        errors.push(e);
    }
    let (ord_ok, ord) = orders_at_least(&errors, 1.8);
    outcome(ok && ord_ok, format!("max error/bound {ratio:.3}; {ord}"))
}

fn c4() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let mut min_slack = f64::INFINITY;
    for n in [4, 16, 64] {
        let mesh = UniformMesh1D::new(n).unwrap();
        for _ in 0..1000 {
            let c = (1..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (a, b, c) = norm_inequality_check(&PiecewiseLinearFE1D::new(mesh, c).unwrap());
            min_slack = min_slack.min((b - a).min(c - b));
        }
    }
    let mut lmax = 0.0f64;
    for m in [3, 7, 31, 127] {
        lmax = lmax.max(power_iteration(&assemble_s(m).unwrap(), 20_000));
    }
    outcome(
        min_slack >= 0.0 && lmax <= 4.0 + 1e-10,
        format!("min chain slack {min_slack:.3e}; max lambda(S) {lmax:.12}"),
    )
}

fn c5() -> Outcome {
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for k in 5..=9 {
        let n = 1usize << k;
        let h = 1.0 / n as f64;
        let eps = h * h;
        let (p, exact) = ProblemId::Exp.problem_1d(eps).unwrap();
        let sol = solve_1d(&p, n, DiscretizationConfig::quadratic_special()).unwrap();
        let e = std::f64::consts::E;
        let nodal = h * h * (6.0 * e + 0.75 * e);
        let ih = nodal_interpolant_1d(&exact.u, *sol.mesh());
        let l2 = l2_error(&exact.u, &sol, 1.0).unwrap();
        let h1 = h1_semi_error(&exact.du, &sol, 1.0).unwrap();
        let l2_i = l2_error_fe(&exact.u, &ih, Some(eps), 1.0).unwrap();
        let h1_i = h1_semi_error_fe(&exact.du, &ih, Some(eps), 1.0).unwrap();
        let l2_rhs = l2_i + nodal;
        let h1_rhs = h1_i + 2.0 * 3f64.sqrt() * h * (6.0 * e + 0.75 * e);
        ok &= l2 <= l2_rhs && h1 <= h1_rhs;
        margin = margin.min((l2_rhs - l2) / l2_rhs).min((h1_rhs - h1) / h1_rhs);
    }
    outcome(ok, format!("smallest relative slack {margin:.3e}"))
}

fn c6() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = rand::rngs::StdRng::seed_from_u64(6);
    for n in [4, 8] {
        for eps in [0.1, 1e-3, 1e-8] {
            let fixture = assemble_2d(&ProblemId::Example1.problem_2d(eps).unwrap(), n).unwrap();
            let m = n - 1;
            let random =
                TensorSystem2D::from_rhs(n, eps, Array2::from_shape_fn((m, m), |_| rng.gen_range(-1.0..1.0))).unwrap();
            for sys in [fixture, random] {
                let d = solve_2d_fast(&sys).unwrap().coeffs() - solve_2d_dense(&sys).unwrap().coeffs();
                worst = worst.max(d.iter().fold(0.0f64, |a, v| a.max(v.abs())));
            }
        }
    }
    outcome(worst <= 1e-10, format!("max |fast - dense| {worst:.3e} (need <= 1e-10)"))
}

fn c7() -> Outcome {
    let eps = 1e-8;
    let problem = ProblemId::Example1.problem_2d(eps).unwrap();
    let exact = problem.exact().unwrap();
    let sub = Subdomain::new(0.99, 0.0).unwrap();
    let (mut disc, mut l2, mut h1) = (Vec::new(), Vec::new(), Vec::new());
    for n in [32, 64, 128] {
        let uh = solve_2d(&problem, n).unwrap();
        disc.push(disc_inf_error_2d(&exact.u, &uh, Subdomain::full()));
        let (a, b) = l2_h1_errors_2d(exact, &uh, sub, problem.layers());
        l2.push(a);
        h1.push(b);
    }
    let (a, da) = orders_at_least(&disc, 1.8);
    let (b, db) = orders_at_least(&l2, 1.8);
    let (c, dc) = orders_at_least(&h1, 0.8);
    outcome(a && b && c, format!("disc_inf {da}; L2 sub {db}; H1 sub {dc}"))
}

/// Errors and extrema on `[0, 0.99] x [m sqrt(eps), 1 - m sqrt(eps)]`.
fn example2_on_strips(multiple: f64) -> Result<(Vec<f64>, f64), String> {
    let eps = 1.0 / 4096.0;
    let problem = ProblemId::Example2.problem_2d(eps).unwrap();
    let exact = problem.exact().unwrap();
    let sub = Subdomain::new(0.99, multiple * eps.sqrt()).map_err(|e| e.to_string())?;
    let mut errors = Vec::new();
    let mut worst_ratio = 0.0f64;
    for n in [32, 64, 128] {
        let uh = solve_2d(&problem, n).unwrap();
        errors.push(disc_inf_error_2d(&exact.u, &uh, sub));
        let (uh_max, iu_max) = nodal_extrema(&exact.u, &uh, sub);
        worst_ratio = worst_ratio.max(uh_max / iu_max);
    }
    Ok((errors, worst_ratio))
}

fn c8() -> Outcome {
    match example2_on_strips(40.0) {
        Ok((errors, ratio)) => {
            let (a, d) = orders_at_least(&errors, 1.5);
            outcome(a && ratio <= 1.05, format!("{d}; max|u_h| / max|I_h u| = {ratio:.4}"))
        }
        Err(e) => {
            let mut detail = format!("40 sqrt(eps) strips leave nothing to measure at eps = 1/4096 ({e})");
            if let Ok((errors, ratio)) = example2_on_strips(10.0) {
                let (_, d) = orders_at_least(&errors, 1.5);
                detail.push_str(&format!("; with 10 sqrt(eps) strips: {d}, max|u_h| / max|I_h u| = {ratio:.4}"));
            }
            outcome(false, detail)
        }
    }
}

fn c9() -> Outcome {
    let mut ce_worst = 0.0f64;
    let mut mq_worst = 0.0f64;
    for n in [8, 64, 512] {
        let h = 1.0 / n as f64;
        for ratio in [1e-4, 1e-6, 1e-8, 1e-12] {
            let eps = ratio * h;
            let sys = TensorSystem2D::from_rhs(n, eps, Array2::zeros((n - 1, n - 1))).unwrap();
            let limit_c = TridiagonalMatrix::from_stencil(n - 1, -1.0, 1.0, 0.0).unwrap();
            let limit_q = TridiagonalMatrix::from_stencil(n - 1, -h / 12.0, 8.0 * h / 12.0, 5.0 * h / 12.0).unwrap();
            ce_worst = ce_worst.max(sys.ce.add_scaled(-1.0, &limit_c).norm_inf());
            let mq = assemble_mq(n - 1, h, sys.beta).unwrap();
            mq_worst = mq_worst.max(mq.add_scaled(-1.0, &limit_q).norm_inf() / h);
        }
    }
    outcome(
        ce_worst <= 1e-10 && mq_worst <= 1e-10,
        format!(
            "|C^e - limit| {ce_worst:.3e} (need <= 1e-10); |M^q - limit|/h {mq_worst:.3e} (need <= 1e-10; \
             the gap equals eps/h because beta - 3/4 = -(3/2) eps/h)"
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "nodal exactness of the exponential bubble", c1, Duration::from_secs(1)),
        (2, "Green matrix inverts the exponential system", c2, Duration::from_secs(1)),
        (3, "a priori nodal bound and second order, eps = h^2", c3, Duration::from_secs(5)),
        (4, "norm chain and lambda_max(S) <= 4", c4, Duration::from_secs(2)),
        (5, "L2 and H1 consequences of the nodal bound", c5, Duration::from_secs(5)),
        (6, "fast 2D solver matches the dense Kronecker oracle", c6, Duration::from_secs(2)),
        (7, "2D Example 1 convergence orders", c7, Duration::from_secs(60)),
        (8, "2D Example 2 orders and non-oscillation", c8, Duration::from_secs(60)),
        (9, "convection-dominated limits of C^e and M^q", c9, Duration::from_secs(1)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= limit;
        println!(
            "{} criterion {id}: {name}: {} [{:.2} s, limit {} s]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if ok == KNOWN_UNATTAINABLE.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria behave as expected (known unattainable: {KNOWN_UNATTAINABLE:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
