//! Self-contained static SVG: a heatmap of a learning surface and a scatter
//! plot of 2-D representation outputs. Output depends only on the data, so
//! identical inputs give identical bytes.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::evaluation::ScatterPoint;
use crate::experiments::SurfaceSummary;

/// Upper end of the fixed heatmap color scale.
pub const HEATMAP_MAX: f64 = 0.25;

const CELL: f64 = 28.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_TOP: f64 = 40.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Color for `value` on the fixed `[0, HEATMAP_MAX]` scale, from dark blue
/// through teal to yellow. Values outside the scale are clamped.
pub fn heat_color(value: f64) -> String {
    if !value.is_finite() {
        return "#bbbbbb".into();
    }
    const STOPS: [(f64, [f64; 3]); 3] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.5, [33.0, 145.0, 140.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let t = (value / HEATMAP_MAX).clamp(0.0, 1.0);
    let (lo, hi) = if t <= STOPS[1].0 {
        (STOPS[0], STOPS[1])
    } else {
        (STOPS[1], STOPS[2])
    };
    let u = (t - lo.0) / (hi.0 - lo.0);
    let c: Vec<u8> = (0..3)
        .map(|i| (lo.1[i] + u * (hi.1[i] - lo.1[i])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Mean generalization error over the `(n, m)` grid: `m` on the x axis,
/// `n` on the y axis (increasing upwards).
pub fn heatmap_svg(summary: &SurfaceSummary) -> String {
    let ns = summary.n_values();
    let ms = summary.m_values();
    let plot_w = CELL * ms.len() as f64;
    let plot_h = CELL * ns.len() as f64;
    let legend_x = MARGIN_LEFT + plot_w + 30.0;
    let width = legend_x + 110.0;
    let height = MARGIN_TOP + plot_h + 60.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-size="13" text-anchor="middle">Mean generalization error</text>"#,
        MARGIN_LEFT + plot_w / 2.0
    );
    for (row, n) in ns.iter().rev().enumerate() {
        let y = MARGIN_TOP + row as f64 * CELL;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{n}</text>"#,
            MARGIN_LEFT - 6.0,
            y + CELL / 2.0 + 3.5
        );
        for (col, m) in ms.iter().enumerate() {
            let x = MARGIN_LEFT + col as f64 * CELL;
            let (fill, title) = match summary.get(*n, *m) {
                Some(c) => (
                    heat_color(c.mean),
                    format!("n={n} m={m} mean={:.4} runs={}", c.mean, c.count),
                ),
                None => ("#ffffff".to_string(), format!("n={n} m={m} no data")),
            };
            let _ = writeln!(
                s,
                r#"<rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="white" stroke-width="0.5"><title>{}</title></rect>"#,
                escape(&title)
            );
        }
    }
    let axis_y = MARGIN_TOP + plot_h;
    for (col, m) in ms.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{m}</text>"#,
            MARGIN_LEFT + col as f64 * CELL + CELL / 2.0,
            axis_y + 14.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">m (examples per task)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        axis_y + 34.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">n (tasks)</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    let steps = 20;
    let bar_h = plot_h.max(100.0);
    for i in 0..steps {
        let v = HEATMAP_MAX * (steps - 1 - i) as f64 / (steps - 1) as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{legend_x}" y="{:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            MARGIN_TOP + i as f64 * bar_h / steps as f64,
            bar_h / steps as f64 + 0.5,
            heat_color(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">{HEATMAP_MAX}</text>"#,
        legend_x + 18.0,
        MARGIN_TOP + 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">0</text>"#,
        legend_x + 18.0,
        MARGIN_TOP + bar_h
    );
    let _ = writeln!(
        s,
        r#"<text x="{legend_x}" y="{}">fixed scale [0, {HEATMAP_MAX}]</text>"#,
        MARGIN_TOP + bar_h + 16.0
    );
    s.push_str("</svg>\n");
    s
}

const COLORS: [&str; 4] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a"];

fn marker(shape: usize, x: f64, y: f64, color: &str) -> String {
    let r = 3.5;
    match shape % 4 {
        0 => format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="none" stroke="{color}"/>"#),
        1 => format!(
            r#"<rect x="{:.2}" y="{:.2}" width="{}" height="{}" fill="none" stroke="{color}"/>"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        2 => format!(
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="{color}"/>"#,
            x,
            y - r,
            x - r,
            y + r,
            x + r,
            y + r
        ),
        _ => format!(
            r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="{color}"/>"#,
            x - r,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r,
            x + r,
            y - r
        ),
    }
}

/// Representation outputs on the unit square, one marker shape per
/// ones-count category.
pub fn scatter_svg(points: &[ScatterPoint], title: &str) -> Result<String> {
    if let Some(p) = points.iter().find(|p| p.output.len() != 2) {
        return Err(Error::InvalidArgument(format!(
            "scatter plots need a 2-dimensional representation, got {}; export the raw CSV instead",
            p.output.len()
        )));
    }
    let mut categories: Vec<u32> = points.iter().map(|p| p.ones).collect();
    categories.sort_unstable();
    categories.dedup();

    let size = 320.0;
    let (left, top) = (50.0, 40.0);
    let width = left + size + 110.0;
    let height = top + size + 50.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-size="13" text-anchor="middle">{}</text>"#,
        left + size / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{size}" height="{size}" fill="none" stroke="black"/>"#
    );
    for tick in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{tick}</text>"#,
            left + tick * size,
            top + size + 14.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{tick}</text>"#,
            left - 5.0,
            top + (1.0 - tick) * size + 3.5
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">r0</text>"#,
        left + size / 2.0,
        top + size + 32.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle">r1</text>"#,
        top + size / 2.0
    );
    for p in points {
        let shape = categories.iter().position(|c| *c == p.ones).unwrap_or(0);
        let x = left + p.output[0].clamp(0.0, 1.0) * size;
        let y = top + (1.0 - p.output[1].clamp(0.0, 1.0)) * size;
        let _ = writeln!(
            s,
            r#"<g class="point" data-ones="{}">{}</g>"#,
            p.ones,
            marker(shape, x, y, COLORS[shape % COLORS.len()])
        );
    }
    let lx = left + size + 20.0;
    let _ = writeln!(s, r#"<text x="{lx}" y="{}">ones-count</text>"#, top + 4.0);
    for (i, c) in categories.iter().enumerate() {
        let y = top + 20.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend" data-ones="{c}">{}<text x="{}" y="{}">{c}</text></g>"#,
            marker(i, lx + 5.0, y, COLORS[i % COLORS.len()]),
            lx + 16.0,
            y + 3.5
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
