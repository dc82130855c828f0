//! Minimal SVG charts for C-V and P-V curves.

use std::fmt::Write;

use crate::threshold::{CVCurve, SegmentedFit};
use crate::validate::PVCurves;

const W: f64 = 640.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = (hi - lo) * 0.03;
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(svg: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (LEFT + W - RIGHT) / 2.0, H - 15.0, escape(x_label));
    let _ = writeln!(
        svg,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        escape(y_label)
    );
}

fn ticks(svg: &mut String, f: &Frame, xs: &[(f64, String)], ys: &[(f64, String)]) {
    for (x, label) in xs {
        let p = f.px(*x);
        let _ = writeln!(svg, r#"<line x1="{p:.2}" y1="{}" x2="{p:.2}" y2="{}" stroke="black"/>"#, H - BOTTOM, H - BOTTOM + 5.0);
        let _ = writeln!(svg, r#"<text x="{p:.2}" y="{}" text-anchor="middle">{label}</text>"#, H - BOTTOM + 18.0);
    }
    for (y, label) in ys {
        let p = f.py(*y);
        let _ = writeln!(svg, r#"<line x1="{}" y1="{p:.2}" x2="{LEFT}" y2="{p:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 8.0, p + 4.0);
    }
}

fn polyline(svg: &mut String, f: &Frame, pts: impl Iterator<Item = (f64, f64)>, color: &str, width: f64) {
    let coords: Vec<String> = pts.map(|(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
    let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#, coords.join(" "));
}

fn log_ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    let n = 5;
    (0..=n)
        .map(|i| {
            let l = lo + (hi - lo) * i as f64 / n as f64;
            (l, format!("{:.3e}", l.exp()))
        })
        .collect()
}

/// Log-log C-V chart with fitted segments and breakpoints marked.
pub fn cv_chart(title: &str, curve: &CVCurve, fit: &SegmentedFit) -> String {
    let lx: Vec<f64> = curve.values().iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = curve.volumes().iter().map(|v| v.ln()).collect();
    let frame = Frame {
        x: padded(lx[0], lx[lx.len() - 1]),
        y: padded(ly[ly.len() - 1], ly[0]),
    };
    let mut svg = String::new();
    open(&mut svg, title, "value (log scale)", "cumulative voxels (log scale)");
    ticks(&mut svg, &frame, &log_ticks(frame.x.0, frame.x.1), &log_ticks(frame.y.0, frame.y.1));
    for (x, y) in lx.iter().zip(&ly) {
        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="steelblue"/>"#, frame.px(*x), frame.py(*y));
    }
    for s in &fit.segments {
        let ends = [lx[s.first], lx[s.last]];
        polyline(&mut svg, &frame, ends.iter().map(|&x| (x, s.intercept + s.slope * x)), "firebrick", 1.5);
    }
    for b in &fit.breakpoints {
        let x = frame.px(b.ln());
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="gray" stroke-dasharray="4 3"/>"#,
            H - BOTTOM
        );
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{}" font-size="11">{}</text>"#, x + 3.0, TOP + 14.0, format_value(*b));
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_value(v: f64) -> String {
    if (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

/// Prediction-rate and occupied-volume curves with the intersection marked.
pub fn pv_chart(title: &str, pv: &PVCurves) -> String {
    let frame = Frame { x: (0.0, 1.0), y: (0.0, 100.0) };
    let mut svg = String::new();
    open(&mut svg, title, "prospectivity threshold", "percent");
    let steps: Vec<(f64, String)> = (0..=5).map(|i| (i as f64 / 5.0, format!("{:.1}", i as f64 / 5.0))).collect();
    let pct: Vec<(f64, String)> = (0..=5).map(|i| (i as f64 * 20.0, format!("{}", i * 20))).collect();
    ticks(&mut svg, &frame, &steps, &pct);
    polyline(&mut svg, &frame, pv.thresholds.iter().zip(&pv.prediction).map(|(t, p)| (*t, p * 100.0)), "firebrick", 1.5);
    polyline(&mut svg, &frame, pv.thresholds.iter().zip(&pv.volume).map(|(t, v)| (*t, 100.0 - v * 100.0)), "steelblue", 1.5);
    let x = pv.intersection;
    let (cx, cy) = (frame.px(x.threshold), frame.py(x.prediction * 100.0));
    let _ = writeln!(svg, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="11">prediction {:.1}% / volume {:.1}%</text>"#,
        (cx + 8.0).min(W - 220.0),
        cy - 8.0,
        x.prediction * 100.0,
        x.volume * 100.0
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" fill="firebrick">prediction rate of training voxels</text>"#, LEFT + 10.0, TOP + 16.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" fill="steelblue">100 - occupied volume</text>"#, LEFT + 10.0, TOP + 32.0);
    svg.push_str("</svg>\n");
    svg
}
