//! Hand-written SVG line charts of range error against the swept variable.

use std::fmt::Write as _;

use super::{ScenarioError, SweepResult};

pub const SVG_WIDTH: f64 = 800.0;
pub const SVG_HEIGHT: f64 = 500.0;

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const MIN_TICKS: usize = 5;
const MAX_TICKS: usize = 8;

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Round-number ticks for `[lo, hi]`.
///
/// Picks a step of 1, 2, 2.5 or 5 times a power of ten giving 5 to 8 ticks.
/// With `pad` the outer ticks may extend past the data to the next multiple
/// of the step; without it all ticks lie inside `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64, pad: bool) -> Vec<f64> {
    assert!(lo.is_finite() && hi.is_finite() && lo <= hi);
    if lo == hi {
        return nice_ticks(
            lo - 0.5_f64.max(lo.abs() * 0.1),
            hi + 0.5_f64.max(hi.abs() * 0.1),
            pad,
        );
    }
    let span = hi - lo;
    let base = 10f64.powf((span / MAX_TICKS as f64).log10().floor() - 1.0);
    let mut fallback: Option<(usize, Vec<f64>)> = None;
    for exp in 0..4 {
        for mult in [1.0, 2.0, 2.5, 5.0] {
            let step = mult * base * 10f64.powi(exp);
            let (first, last) = if pad {
                ((lo / step).floor(), (hi / step).ceil())
            } else {
                ((lo / step - 1e-9).ceil(), (hi / step + 1e-9).floor())
            };
            let count = (last - first) as usize + 1;
            let ticks: Vec<f64> = (0..count).map(|i| (first + i as f64) * step).collect();
            if (MIN_TICKS..=MAX_TICKS).contains(&count) {
                return ticks;
            }
            let miss = if count < MIN_TICKS {
                MIN_TICKS - count
            } else {
                count.saturating_sub(MAX_TICKS)
            };
            if fallback.as_ref().is_none_or(|(m, _)| miss < *m) {
                fallback = Some((miss, ticks));
            }
        }
    }
    fallback.map(|(_, t)| t).unwrap_or_else(|| vec![lo, hi])
}

fn tick_label(v: f64, ticks: &[f64]) -> String {
    let step = if ticks.len() > 1 {
        (ticks[1] - ticks[0]).abs()
    } else {
        1.0
    };
    let mut decimals = 0usize;
    while decimals < 10
        && ((step * 10f64.powi(decimals as i32)).round() - step * 10f64.powi(decimals as i32)).abs()
            > 1e-6
    {
        decimals += 1;
    }
    let s = format!("{:.*}", decimals, v);
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        format!("{:.*}", decimals, 0.0)
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Series {
    label: String,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

/// Render one or more sweeps as a single SVG 1.1 document.
///
/// Each result contributes its analytic range error curve, plus a dashed
/// oracle curve when the sweep was validated. All results must share the
/// sweep variable and grid.
pub fn render_svg(results: &[&SweepResult]) -> Result<String, ScenarioError> {
    let first = results
        .first()
        .ok_or_else(|| ScenarioError::MismatchedGrids("no results to plot".into()))?;
    for r in &results[1..] {
        if r.variable != first.variable {
            return Err(ScenarioError::MismatchedGrids(format!(
                "sweep variables differ: {} vs {}",
                first.variable.name(),
                r.variable.name()
            )));
        }
        if r.rows.len() != first.rows.len()
            || r.rows
                .iter()
                .zip(&first.rows)
                .any(|(a, b)| a.sweep_value != b.sweep_value)
        {
            return Err(ScenarioError::MismatchedGrids("sweep grids differ".into()));
        }
    }
    if first.rows.is_empty() {
        return Err(ScenarioError::MismatchedGrids("empty sweep".into()));
    }

    let mut series = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        series.push(Series {
            label: format!("{}, analytic", r.model.name()),
            color,
            dashed: false,
            points: r
                .rows
                .iter()
                .map(|row| (row.sweep_value, row.budget.analytic_range_error_m * 100.0))
                .collect(),
        });
        let oracle: Vec<(f64, f64)> = r
            .rows
            .iter()
            .filter_map(|row| {
                row.budget
                    .oracle_range_error_m
                    .map(|e| (row.sweep_value, e * 100.0))
            })
            .collect();
        if !oracle.is_empty() {
            series.push(Series {
                label: format!("{}, exact geometry", r.model.name()),
                color,
                dashed: true,
                points: oracle,
            });
        }
    }

    let xs = first.rows.iter().map(|r| r.sweep_value);
    let (x_lo, x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    let y_hi = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0, f64::max);
    let x_ticks = nice_ticks(x_lo, x_hi, false);
    let y_ticks = nice_ticks(0.0, y_hi, true);
    let y_top = *y_ticks.last().unwrap();

    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - y / y_top * plot_h;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = SVG_WIDTH,
        h = SVG_HEIGHT
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<g font-family="sans-serif" font-size="12" fill="black">"#
    );

    for &t in &x_ticks {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{bot:.2}" stroke="#dddddd"/>"##,
            top = MARGIN_TOP,
            bot = MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle">{}</text>"#,
            tick_label(t, &x_ticks),
            y = MARGIN_TOP + plot_h + 18.0
        );
    }
    for &t in &y_ticks {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{l:.2}" y1="{y:.2}" x2="{r:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            l = MARGIN_LEFT,
            r = MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            tick_label(t, &y_ticks),
            x = MARGIN_LEFT - 8.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        escape(first.variable.axis_label()),
        x = MARGIN_LEFT + plot_w / 2.0,
        y = SVG_HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{y:.2}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {y:.2})">range error (cm)</text>"#,
        y = MARGIN_TOP + plot_h / 2.0
    );
    let _ = writeln!(svg, "</g>");

    for s in &series {
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
            s.color,
            points.join(" ")
        );
    }

    let _ = writeln!(svg, r#"<g font-family="sans-serif" font-size="12">"#);
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 + 18.0 * i as f64;
        let x = MARGIN_LEFT + 16.0;
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"{dash}/>"#,
            s.color,
            x2 = x + 28.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{tx:.2}" y="{y:.2}" dominant-baseline="middle">{}</text>"#,
            escape(&s.label),
            tx = x + 36.0
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
