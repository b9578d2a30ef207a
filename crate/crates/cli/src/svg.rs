//! Minimal self-contained SVG line plots: fixed 800×600 viewBox, one or two
//! stacked panels, linear or log10 ordinate. No plotting service, no
//! external assets; the output is plain SVG 1.1 text.

use std::fmt::Write;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

pub fn render(panels: &[Panel]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let n = panels.len().max(1) as f64;
    let panel_height = HEIGHT / n;
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, i as f64 * panel_height, panel_height);
    }
    out.push_str("</svg>\n");
    out
}

fn render_panel(out: &mut String, panel: &Panel, top: f64, height: f64) {
    let margin_left = 80.0;
    let margin_right = 25.0;
    let margin_top = 40.0;
    let margin_bottom = 55.0;
    let plot_w = WIDTH - margin_left - margin_right;
    let plot_h = height - margin_top - margin_bottom;
    let x0 = margin_left;
    let y0 = top + margin_top;

    // gather transformed data
    let mut pts: Vec<Vec<(f64, f64)>> = Vec::new();
    for s in &panel.series {
        pts.push(
            s.points
                .iter()
                .filter(|&&(_, y)| !panel.log_y || y > 0.0)
                .map(|&(x, y)| (x, if panel.log_y { y.log10() } else { y }))
                .filter(|&(x, y)| x.is_finite() && y.is_finite())
                .collect(),
        );
    }
    let all: Vec<(f64, f64)> = pts.iter().flatten().copied().collect();
    let (xmin, xmax) = span(all.iter().map(|&(x, _)| x));
    let (ymin, ymax) = span(all.iter().map(|&(_, y)| y));
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            x0 + (x - xmin) / (xmax - xmin) * plot_w,
            y0 + plot_h - (y - ymin) / (ymax - ymin) * plot_h,
        )
    };

    // frame and title
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.1}" y="{y0:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="16">{}</text>"#,
        x0 + plot_w / 2.0,
        y0 - 14.0,
        escape(&panel.title)
    );

    // ticks
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = xmin + f * (xmax - xmin);
        let yv = ymin + f * (ymax - ymin);
        let (px, _) = to_px(xv, ymin);
        let (_, py) = to_px(xmin, yv);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/>"#,
            y0 + plot_h,
            y0 + plot_h + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
            y0 + plot_h + 20.0,
            tick_label(xv)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="black"/>"#,
            x0 - 5.0
        );
        let label = if panel.log_y {
            format!("1e{}", tick_label(yv))
        } else {
            tick_label(yv)
        };
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="12">{label}</text>"#,
            x0 - 9.0,
            py + 4.0
        );
    }

    // axis labels
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
        x0 + plot_w / 2.0,
        y0 + plot_h + 42.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        x0 - 58.0,
        y0 + plot_h / 2.0,
        x0 - 58.0,
        y0 + plot_h / 2.0,
        escape(&panel.y_label)
    );

    // data
    for (s, transformed) in panel.series.iter().zip(&pts) {
        if transformed.is_empty() {
            continue;
        }
        let path: String = transformed
            .iter()
            .map(|&(x, y)| {
                let (px, py) = to_px(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            r#"<polyline points="{path}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            s.color
        );
    }

    // legend
    for (i, s) in panel.series.iter().enumerate() {
        if s.label.is_empty() {
            continue;
        }
        let ly = y0 + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/>"#,
            x0 + plot_w - 150.0,
            x0 + plot_w - 120.0,
            s.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
            x0 + plot_w - 112.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.03 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
