//! Minimal SVG plots: empirical vs fitted CDFs, Q–Q plots and contour maps.
//!
//! Output is deterministic text (fixed precision, fixed element order) so
//! repeated runs produce byte-identical files.

use std::fmt::Write;

use crate::event::HailEvent;
use crate::fit::{ellipse_points, BinormalFit, ChiFit, FitError, LogNormalFit, RadialSeries};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const CURVE_SAMPLES: usize = 200;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let (x_min, x_max) = pad(x_min, x_max);
        let (y_min, y_max) = pad(y_min, y_max);
        Self { x_min, x_max, y_min, y_max }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(title: &str, x_label: &str, y_label: &str, frame: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="30" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (left, right) = (MARGIN, WIDTH - MARGIN);
    let (top, bottom) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = frame.x_min + t * (frame.x_max - frame.x_min);
        let yv = frame.y_min + t * (frame.y_max - frame.y_min);
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            frame.px(xv),
            bottom + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            left - 6.0,
            frame.py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 15 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    s
}

fn tick(v: f64) -> String {
    let text = format!("{v:.3}");
    if text == "-0.000" {
        "0.000".to_string()
    } else {
        text
    }
}

fn polyline(s: &mut String, frame: &Frame, points: &[(f64, f64)], class: &str, style: &str) {
    let coords: Vec<String> = points
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|&(x, y)| format!("{:.3},{:.3}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline class="{class}" points="{}" fill="none" {style}/>"#,
        coords.join(" ")
    );
}

fn legend(s: &mut String, entries: &[(&str, &str)]) {
    for (k, (label, style)) in entries.iter().enumerate() {
        let y = MARGIN + 15.0 + 18.0 * k as f64;
        let x = WIDTH - MARGIN - 150.0;
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" {style}/>"#, x + 25.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            x + 32.0,
            y + 4.0,
            escape(label)
        );
    }
}

const STEP_STYLE: &str = r#"stroke="black" stroke-width="1.5""#;
const CHI_STYLE: &str = r##"stroke="#c0392b" stroke-width="1.5""##;
const LN_STYLE: &str = r##"stroke="#2c5aa0" stroke-width="1.5" stroke-dasharray="6 4""##;

/// Empirical step CDF with the fitted chi (solid) and log-normal (dashed)
/// curves.
pub fn cdf_plot(series: &RadialSeries, chi: Option<&ChiFit>, lognormal: Option<&LogNormalFit>, title: &str) -> String {
    let d_max = series.distances().last().copied().unwrap_or(1.0) * 1.1;
    let frame = Frame::new(0.0, d_max.max(1e-12), 0.0, 1.0);
    let mut s = open(title, "distance", "cumulative weight", &frame);

    let mut step = vec![(0.0, 0.0)];
    let mut level = 0.0;
    for (d, c) in series.iter() {
        step.push((d, level));
        step.push((d, c));
        level = c;
    }
    step.push((d_max, level));
    polyline(&mut s, &frame, &step, "empirical", STEP_STYLE);

    let xs: Vec<f64> = (0..=CURVE_SAMPLES).map(|k| d_max * k as f64 / CURVE_SAMPLES as f64).collect();
    let mut entries = vec![("empirical", STEP_STYLE)];
    if let Some(chi) = chi {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, chi.cdf(x))).collect();
        polyline(&mut s, &frame, &pts, "chi", CHI_STYLE);
        entries.push(("chi fit", CHI_STYLE));
    }
    if let Some(ln) = lognormal {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, ln.cdf(x))).collect();
        polyline(&mut s, &frame, &pts, "lognormal", LN_STYLE);
        entries.push(("log-normal fit", LN_STYLE));
    }
    legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

/// Q–Q plot: theoretical quantiles on the horizontal axis, empirical
/// distances on the vertical axis, with the identity line for reference.
pub fn qq_plot(qq_chi: &[(f64, f64)], qq_lognormal: &[(f64, f64)], title: &str) -> String {
    let finite = qq_chi
        .iter()
        .chain(qq_lognormal)
        .flat_map(|&(a, b)| [a, b])
        .filter(|v| v.is_finite());
    let hi = finite.fold(0.0f64, f64::max) * 1.05;
    let frame = Frame::new(0.0, hi.max(1e-12), 0.0, hi.max(1e-12));
    let mut s = open(title, "theoretical quantile", "empirical distance", &frame);
    let _ = writeln!(
        s,
        r#"<line class="identity" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-dasharray="2 3"/>"#,
        frame.px(0.0),
        frame.py(0.0),
        frame.px(frame.x_max),
        frame.py(frame.y_max)
    );
    let mut entries = Vec::new();
    for (points, class, style, label) in [
        (qq_chi, "chi", CHI_STYLE, "chi fit"),
        (qq_lognormal, "lognormal", LN_STYLE, "log-normal fit"),
    ] {
        if points.is_empty() {
            continue;
        }
        polyline(&mut s, &frame, points, class, style);
        let _ = writeln!(s, r#"<g class="{class}-markers">"#);
        for &(x, y) in points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.3}" cy="{:.3}" r="2.5" fill="none" {style}/>"#,
                frame.px(x),
                frame.py(y)
            );
        }
        s.push_str("</g>\n");
        entries.push((label, style));
    }
    legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

/// Event scatter (marker radius proportional to severe probability) with
/// level ellipses of the binormal fit.
pub fn contour_plot(events: &[HailEvent], fit: &BinormalFit, levels: &[f64], title: &str) -> Result<String, FitError> {
    let rings: Vec<Vec<[f64; 2]>> = levels
        .iter()
        .map(|&level| ellipse_points(fit, level, 180))
        .collect::<Result<_, _>>()?;
    let all = events.iter().map(|e| e.location()).chain(rings.iter().flatten().copied());
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in all {
        x_min = x_min.min(p[0]);
        x_max = x_max.max(p[0]);
        y_min = y_min.min(p[1]);
        y_max = y_max.max(p[1]);
    }
    // Equal scale on both axes so ellipses keep their shape.
    let span = (x_max - x_min).max(y_max - y_min) * 1.05;
    let (cx, cy) = (0.5 * (x_min + x_max), 0.5 * (y_min + y_max));
    let aspect = (HEIGHT - 2.0 * MARGIN) / (WIDTH - 2.0 * MARGIN);
    let frame = Frame::new(
        cx - 0.5 * span,
        cx + 0.5 * span,
        cy - 0.5 * span * aspect,
        cy + 0.5 * span * aspect,
    );
    let mut s = open(title, "longitude", "latitude", &frame);
    s.push_str("<g class=\"events\">\n");
    for e in events {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="#e67e22" fill-opacity="0.6" stroke="#a04000"/>"##,
            frame.px(e.lon),
            frame.py(e.lat),
            1.0 + 6.0 * e.prob
        );
    }
    s.push_str("</g>\n");
    for (ring, level) in rings.iter().zip(levels) {
        let pts: Vec<(f64, f64)> = ring.iter().map(|p| (p[0], p[1])).collect();
        polyline(&mut s, &frame, &pts, &format!("level-{level}"), r##"stroke="#2c5aa0" stroke-width="1.2""##);
    }
    s.push_str("</svg>\n");
    Ok(s)
}
