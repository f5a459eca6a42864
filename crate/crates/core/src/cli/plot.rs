//! Static SVG plots of spectrum families. Single-drive curves are dashed,
//! double-drive curves solid; the pairing is also written into the file's
//! `<metadata>` block as JSON.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dressed_spectrum::{DriveMode, Spectrum};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

const WIDTH: f64 = 520.0;
const HEIGHT: f64 = 360.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 48.0;

#[derive(Debug, Clone, Serialize)]
pub struct CurveInfo {
    pub label: String,
    pub model: Option<String>,
    pub mode: DriveMode,
    pub temperature_k: Option<f64>,
    /// "dashed" for single drive, "solid" for double drive.
    pub style: &'static str,
    pub color: &'static str,
}

pub struct Panel<'a> {
    pub title: String,
    pub curves: Vec<(CurveInfo, &'a Spectrum)>,
}

fn style_for(mode: DriveMode) -> &'static str {
    match mode {
        DriveMode::Single => "dashed",
        DriveMode::Double => "solid",
    }
}

/// Curve description; `color_index` picks from a fixed palette.
pub fn curve<'a>(s: &'a Spectrum, label: String, color_index: usize) -> (CurveInfo, &'a Spectrum) {
    let m = &s.metadata;
    (
        CurveInfo {
            label,
            model: m.model.map(|x| x.as_str().to_string()),
            mode: m.mode,
            temperature_k: m.temperature,
            style: style_for(m.mode),
            color: PALETTE[color_index % PALETTE.len()],
        },
        s,
    )
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).abs().max(f64::MIN_POSITIVE);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_panel(out: &mut String, panel: &Panel<'_>, x0: f64, y_label: &str) {
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let (mut xmin, mut xmax, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for (_, s) in &panel.curves {
        if let (Some(a), Some(b)) = (s.detunings.first(), s.detunings.last()) {
            xmin = xmin.min(*a);
            xmax = xmax.max(*b);
        }
        ymax = ymax.max(s.max_value());
    }
    if !xmin.is_finite() || xmax <= xmin {
        xmin = -1.0;
        xmax = 1.0;
    }
    if !(ymax > 0.0) {
        ymax = 1.0;
    }
    ymax *= 1.05;
    let px = |x: f64| x0 + MARGIN_L + (x - xmin) / (xmax - xmin) * plot_w;
    let py = |y: f64| MARGIN_T + plot_h - y / ymax * plot_h;

    let _ = writeln!(
        out,
        r##"<rect x="{:.1}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##,
        x0 + MARGIN_L
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        x0 + MARGIN_L + plot_w / 2.0,
        escape(&panel.title)
    );
    for t in nice_ticks(xmin, xmax, 6) {
        let x = px(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="11">{t}</text>"##,
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0,
            MARGIN_T + plot_h + 18.0
        );
    }
    for t in nice_ticks(0.0, ymax, 5) {
        let y = py(t);
        let label = format!("{t:.3}");
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{}</text>"##,
            x0 + MARGIN_L - 5.0,
            x0 + MARGIN_L,
            x0 + MARGIN_L - 8.0,
            y + 4.0,
            label.trim_end_matches('0').trim_end_matches('.')
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">detuning ω − ω_L (rad/ns)</text>"#,
        x0 + MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate({:.1},{:.1}) rotate(-90)" text-anchor="middle" font-size="12">{y_label}</text>"#,
        x0 + 16.0,
        MARGIN_T + plot_h / 2.0
    );

    for (info, s) in &panel.curves {
        let mut d = String::with_capacity(16 * s.values.len());
        for (k, (x, y)) in s.detunings.iter().zip(s.values.iter()).enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if k == 0 { "M" } else { " L" }, px(*x), py(*y));
        }
        let dash = if info.style == "dashed" { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.3"{dash}/>"#,
            info.color
        );
    }

    // Legend, top right.
    let lx = x0 + MARGIN_L + plot_w - 150.0;
    for (k, (info, _)) in panel.curves.iter().enumerate() {
        let y = MARGIN_T + 14.0 + 15.0 * k as f64;
        let dash = if info.style == "dashed" { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="1.5"{dash}/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            lx + 26.0,
            info.color,
            lx + 32.0,
            y + 4.0,
            escape(&info.label)
        );
    }
}

/// Panels side by side in one SVG document.
pub fn render(panels: &[Panel<'_>], y_label: &str) -> String {
    let total_w = WIDTH * panels.len().max(1) as f64;
    let meta: Vec<Vec<&CurveInfo>> = panels.iter().map(|p| p.curves.iter().map(|(c, _)| c).collect()).collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{HEIGHT}" viewBox="0 0 {total_w} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        out,
        "<metadata>{}</metadata>",
        escape(&serde_json::json!({ "panels": meta, "line_styles": { "single": "dashed", "double": "solid" } }).to_string())
    );
    let _ = writeln!(out, r#"<rect width="{total_w}" height="{HEIGHT}" fill="white"/>"#);
    for (k, p) in panels.iter().enumerate() {
        draw_panel(&mut out, p, WIDTH * k as f64, y_label);
    }
    out.push_str("</svg>\n");
    out
}
