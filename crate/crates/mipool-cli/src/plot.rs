//! Self-contained SVG coverage plot: coverage against missingness rate, one
//! polyline per (variable, rule), with a horizontal line at the nominal
//! level. Series are clipped to the viewport rather than clamped, so points
//! outside the coverage window simply leave the plot area undistorted.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use mipool::pooling::Rule;
use mipool::simulation::ConditionSummary;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 62.0;
const RIGHT: f64 = 452.0;
const TOP: f64 = 22.0;
const BOTTOM: f64 = 392.0;
const Y_MIN: f64 = 0.90;
const Y_MAX: f64 = 1.005;

fn x_px(rate: f64) -> f64 {
    LEFT + rate * (RIGHT - LEFT)
}

fn y_px(coverage: f64) -> f64 {
    TOP + (Y_MAX - coverage) / (Y_MAX - Y_MIN) * (BOTTOM - TOP)
}

fn rule_color(rule: Rule) -> &'static str {
    match rule {
        Rule::Conventional => "#d95f02",
        Rule::Simplified => "#1b9e77",
    }
}

fn variable_dash(index: usize) -> &'static str {
    ["none", "7 4", "2 3", "10 3 2 3"][index % 4]
}

struct Series {
    variable: String,
    rule: Rule,
    dash: &'static str,
    points: Vec<(f64, f64)>, // (rate, coverage)
}

fn collect_series(rows: &[ConditionSummary]) -> Result<Vec<Series>> {
    let mut variables: Vec<String> = Vec::new();
    for row in rows {
        if !variables.contains(&row.variable) {
            variables.push(row.variable.clone());
        }
    }
    let mut series = Vec::new();
    for (v_idx, variable) in variables.iter().enumerate() {
        for rule in [Rule::Conventional, Rule::Simplified] {
            let mut points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| &r.variable == variable && r.rule == rule)
                .map(|r| (r.pct_missing, r.coverage))
                .collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            if points.is_empty() {
                bail!("variable {variable} has no {rule} rows; the plot needs both rules");
            }
            series.push(Series {
                variable: variable.clone(),
                rule,
                dash: variable_dash(v_idx),
                points,
            });
        }
    }
    Ok(series)
}

/// Render the plot as an SVG 1.1 document with no external assets.
pub fn format_coverage_plot(rows: &[ConditionSummary], level: f64) -> Result<String> {
    ensure!(!rows.is_empty(), "plot has no rows");
    let series = collect_series(rows)?;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<defs><clipPath id="plot-area"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath></defs>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );

    // Gridlines and y tick labels; the top gridline sits at coverage 1.000.
    for tick in [0.90, 0.925, 0.95, 0.975, 1.0] {
        let y = y_px(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#dddddd" stroke-width="1"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{tick:.3}</text>"#,
            LEFT - 8.0,
            y + 4.0
        );
    }
    for tick in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
        let x = x_px(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{:.2}" stroke="#999999" stroke-width="1"/>"##,
            BOTTOM + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{tick:.1}</text>"#,
            BOTTOM + 20.0
        );
    }

    // Frame and axis labels.
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="#333333" stroke-width="1"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">missingness rate</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.2})">coverage</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    // Nominal level reference.
    let y_level = y_px(level);
    let _ = writeln!(
        svg,
        r##"<line x1="{LEFT}" y1="{y_level:.2}" x2="{RIGHT}" y2="{y_level:.2}" stroke="#555555" stroke-width="1" stroke-dasharray="4 4"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="#555555">nominal {level}</text>"##,
        LEFT + 4.0,
        y_level - 4.0
    );

    // Data series, clipped to the plot area.
    let _ = writeln!(svg, r#"<g clip-path="url(#plot-area)">"#);
    for s in &series {
        let points: String = s
            .points
            .iter()
            .map(|&(rate, cov)| format!("{:.2},{:.2}", x_px(rate), y_px(cov)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r#"<polyline points="{points}" fill="none" stroke="{}" stroke-width="2" stroke-dasharray="{}"/>"#,
            rule_color(s.rule),
            s.dash
        );
        for &(rate, cov) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                x_px(rate),
                y_px(cov),
                rule_color(s.rule)
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    // Legend.
    let legend_x = RIGHT + 14.0;
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 14.0 + i as f64 * 22.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2" stroke-dasharray="{}"/>"#,
            legend_x + 28.0,
            rule_color(s.rule),
            s.dash
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="12" dominant-baseline="middle">{} {}</text>"#,
            legend_x + 34.0,
            s.variable,
            s.rule
        );
    }

    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

pub fn write_coverage_plot(rows: &[ConditionSummary], level: f64, path: &Path) -> Result<()> {
    let svg = format_coverage_plot(rows, level)?;
    std::fs::write(path, svg).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
