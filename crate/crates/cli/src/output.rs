//! CSV, Markdown and SVG renderings of solves and studies.

use std::fmt::Write as _;

use upg_core::study::{StudyResult, ERROR_COLUMNS};
use upg_core::verify::Check;

/// 17 significant digits: enough to round-trip every `f64`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn short(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3e}")
    } else {
        "n/a".into()
    }
}

pub const STUDY_HEADER: [&str; 15] = [
    "n",
    "h",
    "epsilon",
    "disc_inf",
    "l2_full",
    "l2_sub",
    "h1_full",
    "h1_sub",
    "order_disc_inf",
    "order_l2_full",
    "order_l2_sub",
    "order_h1_full",
    "order_h1_sub",
    "thm_bound",
    "hypothesis",
];

pub fn study_csv(res: &StudyResult) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(STUDY_HEADER)?;
    for (r, row) in res.rows.iter().enumerate() {
        let mut rec = vec![row.n.to_string(), num(row.h), num(row.epsilon)];
        rec.extend(row.errors().iter().map(|&e| num(e)));
        rec.extend(res.orders.iter().map(|col| col[r].map(num).unwrap_or_default()));
        rec.push(row.thm_bound.map(num).unwrap_or_default());
        rec.push(row.hypothesis.map(|b| b.to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn study_markdown(res: &StudyResult, title: &str) -> String {
    let mut out = format!("# {title}\n\n");
    let mut header = vec!["n".to_string(), "h".into(), "epsilon".into()];
    for c in ERROR_COLUMNS {
        header.push(c.into());
        header.push(format!("order {c}"));
    }
    header.extend(["bound".into(), "hypothesis".into()]);
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for (r, row) in res.rows.iter().enumerate() {
        let mut cells = vec![row.n.to_string(), short(row.h), short(row.epsilon)];
        for (c, e) in row.errors().iter().enumerate() {
            cells.push(short(*e));
            cells.push(res.orders[c][r].map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into()));
        }
        cells.push(row.thm_bound.map(short).unwrap_or_else(|| "-".into()));
        cells.push(row.hypothesis.map(|b| b.to_string()).unwrap_or_else(|| "-".into()));
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    let failures: Vec<_> = res.rows.iter().filter_map(|r| r.failure.as_ref().map(|f| (r.n, f))).collect();
    if !failures.is_empty() {
        out.push_str("\n## Failed solves\n\n");
        for (n, f) in failures {
            let _ = writeln!(out, "- n = {n}: {f}");
        }
    }
    out
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 70.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// `log2(h)` against `log2(error)`: one polyline per error column and two
/// dashed reference lines of slope 1 and 2.
pub fn study_svg(res: &StudyResult, title: &str) -> String {
    let series: Vec<Vec<(f64, f64)>> = (0..ERROR_COLUMNS.len())
        .map(|c| {
            res.rows
                .iter()
                .filter(|r| r.errors()[c].is_finite() && r.errors()[c] > 0.0)
                .map(|r| (r.h.log2(), r.errors()[c].log2()))
                .collect()
        })
        .collect();
    let all: Vec<(f64, f64)> = series.iter().flatten().copied().collect();
    let (mut x0, mut x1) = bounds(all.iter().map(|p| p.0)).unwrap_or((-1.0, 0.0));
    let (mut y0, mut y1) = bounds(all.iter().map(|p| p.1)).unwrap_or((-1.0, 0.0));
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    // reference lines start at the smallest error on the finest mesh
    let anchor = y0;
    let refs: Vec<(f64, [(f64, f64); 2])> =
        [1.0, 2.0].iter().map(|&s| (s, [(x0, anchor), (x1, anchor + s * (x1 - x0))])).collect();
    for (_, seg) in &refs {
        y1 = y1.max(seg[1].1);
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#, WIDTH / 2.0, escape(title));
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(out, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">log2(h)</text>"#, WIDTH / 2.0, HEIGHT - 20.0);
    let _ = writeln!(
        out,
        r#"<text x="20" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 20 {})">log2(error)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (v, anchor, pos) in [(x0, "start", b + 18.0), (x1, "end", b + 18.0)] {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{pos}" text-anchor="{anchor}" font-size="11">{v:.1}</text>"#, sx(v));
    }
    for v in [y0, y1] {
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="11">{v:.1}</text>"#, l - 6.0, sy(v));
    }
    for (slope, seg) in &refs {
        let _ = writeln!(
            out,
            r##"<line class="reference" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 4"><title>slope {slope}</title></line>"##,
            sx(seg[0].0),
            sy(seg[0].1),
            sx(seg[1].0),
            sy(seg[1].1)
        );
    }
    for (c, pts) in series.iter().enumerate() {
        let points: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"><title>{}</title></polyline>"#,
            points.join(" "),
            COLORS[c],
            ERROR_COLUMNS[c]
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" fill="{}">{}</text>"#,
            r - 90.0,
            t + 18.0 * (c as f64 + 1.0),
            COLORS[c],
            ERROR_COLUMNS[c]
        );
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((a, b)) => Some((a.min(v), b.max(v))),
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn verify_markdown(checks: &[Check]) -> String {
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let mut out = String::from("# Verification report\n\n");
    let _ = writeln!(out, "{} checks, {} failed.\n", checks.len(), failed);
    out.push_str("| check | residual | threshold | status |\n|---|---|---|---|\n");
    for c in checks {
        let _ = writeln!(
            out,
            "| {} | {:.3e} | {:.0e} | {} |",
            c.name,
            c.residual,
            c.threshold,
            if c.passed() { "pass" } else { "FAIL" }
        );
    }
    out
}

/// Table of named scalar results.
pub fn summary_markdown(title: &str, entries: &[(&str, String)]) -> String {
    let mut out = format!("# {title}\n\n| quantity | value |\n|---|---|\n");
    for (k, v) in entries {
        let _ = writeln!(out, "| {k} | {v} |");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn bounds_of_values() {
        assert_eq!(bounds([3.0, -1.0, 2.0].into_iter()), Some((-1.0, 3.0)));
        assert_eq!(bounds(std::iter::empty()), None);
    }
}
