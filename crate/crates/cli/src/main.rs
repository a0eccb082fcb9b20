//! `upg`: run 1D and 2D solves, convergence studies and the verification
//! suite, writing CSV, Markdown and SVG reports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical failure.

mod config;
mod output;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use clap::{CommandFactory, Parser};
use upg_core::fe::PiecewiseLinearFE1D;
use upg_core::measure2d::{error_report_2d, Subdomain};
use upg_core::problem::ExactSolution1D;
use upg_core::solver1d::{error_report, solve_1d};
use upg_core::solver2d::solve_2d;
use upg_core::study::{run_study, Delta, EpsilonPolicy, StudySpec};
use upg_core::verify::{run_verification, Perturbation};

use config::{usage, CommandKind, Format, Settings, UsageError};
use output::num;

fn main() -> ExitCode {
    let settings = match Settings::try_parse() {
        Ok(s) => s,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match settings.resolve().and_then(run) {
        Ok(code) => code,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e:#}\n\n{}", Settings::command().render_usage());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(s: Settings) -> anyhow::Result<ExitCode> {
    match s.command_kind()? {
        CommandKind::Solve1d => solve1d(&s),
        CommandKind::Solve2d => solve2d(&s),
        CommandKind::Study => study(&s),
        CommandKind::Verify => verify(&s),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn solve1d(s: &Settings) -> anyhow::Result<ExitCode> {
    let id = s.problem(None)?;
    if id.is_2d() {
        return Err(usage(format!("`{}` is a 2D problem; use solve2d", id.name())));
    }
    let n = s.single_n()?;
    let eps = s.epsilon_policy()?.epsilon(1.0 / n as f64);
    let config = s.discretization()?;
    let delta = single_delta(s)?.unwrap_or(Delta::MeshWidth).value(1.0 / n as f64);
    let (problem, exact) = id.problem_1d(eps).context("building the problem")?;
    let sol = solve_1d(&problem, n, config).context("solving")?;
    let rep = error_report(&problem, &exact, &sol, delta).context("measuring errors")?;

    let dir = s.out_dir();
    let formats = s.formats();
    if formats.contains(&Format::Csv) {
        write(&dir, "solution.csv", &solution_csv_1d(&sol.u_h, &exact)?)?;
    }
    let entries = vec![
        ("problem", id.name().to_string()),
        ("n", n.to_string()),
        ("epsilon", num(eps)),
        ("bubble", format!("{:?}", config.family).to_lowercase()),
        ("beta", if sol.bubble.beta().is_nan() { "-".into() } else { num(sol.bubble.beta()) }),
        ("residual", num(sol.residual)),
        ("disc_inf", num(rep.disc_inf)),
        ("l2_full", num(rep.l2_full)),
        ("h1_full", num(rep.h1_full)),
        ("delta", num(rep.delta)),
        ("l2_sub", num(rep.l2_sub)),
        ("h1_sub", num(rep.h1_sub)),
        ("thm_bound", rep.thm_bound.map(|b| num(b.value)).unwrap_or_else(|| "-".into())),
        ("hypothesis", rep.thm_bound.map(|b| b.hypothesis.to_string()).unwrap_or_else(|| "-".into())),
    ];
    let md = output::summary_markdown("1D solve", &entries);
    if formats.contains(&Format::Md) {
        write(&dir, "summary.md", &md)?;
    }
    print!("{md}");
    Ok(ExitCode::SUCCESS)
}

fn solution_csv_1d(u_h: &PiecewiseLinearFE1D, exact: &ExactSolution1D) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "u_h", "u_exact", "abs_err"])?;
    let samples = 4 * u_h.mesh().n();
    for i in 0..=samples {
        let x = i as f64 / samples as f64;
        let (uh, ue) = (u_h.eval(x)?, exact.u.eval(x));
        w.write_record([num(x), num(uh), num(ue), num((uh - ue).abs())])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn single_delta(s: &Settings) -> anyhow::Result<Option<Delta>> {
    match s.deltas()? {
        None => Ok(None),
        Some(list) if list.len() == 1 => Ok(Some(list[0])),
        Some(_) => Err(usage("solve commands take a single --delta")),
    }
}

fn solve2d(s: &Settings) -> anyhow::Result<ExitCode> {
    let id = s.problem(None)?;
    if !id.is_2d() {
        return Err(usage(format!("`{}` is a 1D problem; use solve1d", id.name())));
    }
    let n = s.single_n()?;
    let h = 1.0 / n as f64;
    let eps = s.epsilon_policy()?.epsilon(h);
    let defaults = StudySpec::new(id, EpsilonPolicy::Fixed(eps), vec![n, 2 * n]);
    let delta = single_delta(s)?.unwrap_or(defaults.delta).value(h);
    let margin = s.wall_margin.unwrap_or(defaults.wall_margin);
    let problem = id.problem_2d(eps).context("building the problem")?;
    let exact = problem.exact().context("fixture without exact solution")?;
    let sub = Subdomain::new(1.0 - delta, (margin * eps.sqrt()).min(0.499))
        .map_err(|e| usage(e.to_string()))?;
    let uh = solve_2d(&problem, n).context("solving")?;
    let rep = error_report_2d(exact, &uh, sub, problem.layers());

    let dir = s.out_dir();
    let formats = s.formats();
    if formats.contains(&Format::Csv) {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "y", "u_h", "u_exact", "abs_err"])?;
        let mesh = uh.mesh();
        for k in 0..=n {
            for l in 0..=n {
                let (x, y) = (mesh.node(l), mesh.node(k));
                let (a, b) = (uh.nodal(l, k), exact.u.eval(x, y));
                w.write_record([num(x), num(y), num(a), num(b), num((a - b).abs())])?;
            }
        }
        write(&dir, "solution.csv", &String::from_utf8(w.into_inner()?)?)?;
    }
    let entries = vec![
        ("problem", id.name().to_string()),
        ("n", n.to_string()),
        ("epsilon", num(eps)),
        ("subdomain", format!("[0, {}] x [{}, {}]", 1.0 - delta, sub.y_margin, 1.0 - sub.y_margin)),
        ("disc_inf", num(rep.disc_inf)),
        ("disc_inf_sub", num(rep.disc_inf_sub)),
        ("l2_full", num(rep.l2_full)),
        ("l2_sub", num(rep.l2_sub)),
        ("h1_full", num(rep.h1_full)),
        ("h1_sub", num(rep.h1_sub)),
        ("boundary_mismatch", num(problem.boundary_mismatch())),
    ];
    let md = output::summary_markdown("2D solve", &entries);
    if formats.contains(&Format::Md) {
        write(&dir, "summary.md", &md)?;
    }
    print!("{md}");
    Ok(ExitCode::SUCCESS)
}

fn study(s: &Settings) -> anyhow::Result<ExitCode> {
    let id = s.problem(None)?;
    let mut spec = StudySpec::new(id, s.epsilon_policy()?, s.meshes()?);
    if !id.is_2d() {
        spec.config = s.discretization()?;
    }
    if let Some(m) = s.wall_margin {
        spec.wall_margin = m;
    }
    let deltas = s.deltas()?.unwrap_or_else(|| vec![spec.delta]);
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let dir = s.out_dir();
    let formats = s.formats();
    for delta in &deltas {
        spec.delta = *delta;
        let res = run_study(&spec).context("running the study")?;
        let (stem, label) = match (deltas.len(), delta) {
            (1, _) => ("study".to_string(), String::new()),
            (_, Delta::MeshWidth) => ("study_delta-h".to_string(), ", delta = h".to_string()),
            (_, Delta::Fixed(d)) => (format!("study_delta-{d}"), format!(", delta = {d}")),
        };
        let title = format!("Convergence study: {}{label}", id.name());
        let md = output::study_markdown(&res, &title);
        if formats.contains(&Format::Csv) {
            write(&dir, &format!("{stem}.csv"), &output::study_csv(&res)?)?;
        }
        if formats.contains(&Format::Md) {
            write(&dir, &format!("{stem}.md"), &md)?;
        }
        if formats.contains(&Format::Svg) {
            write(&dir, &format!("{stem}.svg"), &output::study_svg(&res, &title))?;
        }
        print!("{md}");
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(s: &Settings) -> anyhow::Result<ExitCode> {
    let perturbation = Perturbation { diagonal: s.perturb_diagonal.unwrap_or(0.0) };
    let checks = run_verification(perturbation).context("running the verification suite")?;
    let md = output::verify_markdown(&checks);
    write(&s.out_dir(), "verify.md", &md)?;
    print!("{md}");
    if checks.iter().all(|c| c.passed()) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
