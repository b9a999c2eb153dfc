//! Deterministic SVG figures: the SZ correction curve and box-and-whisker
//! plots. Coordinates are written with two decimals so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;

use crate::report::fmt_trimmed;
use crate::stats::FiveNumber;
use crate::sz::SzCurve;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 400.0;
pub const MARGIN_LEFT: f64 = 70.0;
pub const MARGIN_RIGHT: f64 = 30.0;
pub const MARGIN_TOP: f64 = 40.0;
pub const MARGIN_BOTTOM: f64 = 60.0;

/// Maps a data interval onto a pixel interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearScale {
    pub domain: (f64, f64),
    pub range: (f64, f64),
}

impl LinearScale {
    pub fn new(domain: (f64, f64), range: (f64, f64)) -> Self {
        let domain = if domain.0 == domain.1 { (domain.0 - 1.0, domain.1 + 1.0) } else { domain };
        Self { domain, range }
    }

    pub fn map(&self, v: f64) -> f64 {
        let t = (v - self.domain.0) / (self.domain.1 - self.domain.0);
        self.range.0 + t * (self.range.1 - self.range.0)
    }

    /// `count + 1` evenly spaced values across the domain.
    pub fn ticks(&self, count: usize) -> Vec<f64> {
        let step = (self.domain.1 - self.domain.0) / count as f64;
        (0..=count).map(|i| self.domain.0 + step * i as f64).collect()
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

pub(crate) fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text class="title" x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        px(WIDTH / 2.0),
        px(MARGIN_TOP / 2.0 + 5.0),
        escape(title)
    );
}

fn plot_bottom() -> f64 {
    HEIGHT - MARGIN_BOTTOM
}

fn value_axis(out: &mut String, scale: &LinearScale, label: &str) {
    let x = MARGIN_LEFT;
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
        px(scale.range.0),
        px(scale.range.1),
        x = px(x)
    );
    for t in scale.ticks(5) {
        let y = px(scale.map(t));
        let _ = writeln!(
            out,
            r#"<line class="tick" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/><text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            px(x - 5.0),
            px(x),
            px(x - 8.0),
            fmt_trimmed(t, 0, 3)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
        px(18.0),
        px(HEIGHT / 2.0),
        px(18.0),
        px(HEIGHT / 2.0),
        escape(label)
    );
}

/// The SZ curve over CA/CR with one marker per anchor and one line segment
/// between consecutive anchors. The clamped extensions beyond the end anchors
/// are drawn dashed. `highlight` adds a marker at that CA/CR.
pub fn sz_curve_svg(curve: &SzCurve, highlight: Option<f64>) -> String {
    let anchors = curve.anchors();
    let last = anchors[anchors.len() - 1];
    let x_max = (last.ca_cr * 1.25).max(highlight.unwrap_or(0.0) * 1.05).max(1.0);
    let y_max = anchors[0].sz * 1.1;
    let xs = LinearScale::new((0.0, x_max), (MARGIN_LEFT, WIDTH - MARGIN_RIGHT));
    let ys = LinearScale::new((0.0, y_max), (plot_bottom(), MARGIN_TOP));

    let mut out = String::new();
    open(&mut out, &format!("SZ correction as a function of CA/CR ({})", curve.name()));
    value_axis(&mut out, &ys, "SZ");
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/>"#,
        px(xs.range.0),
        px(xs.range.1),
        y = px(plot_bottom())
    );
    for t in xs.ticks(5) {
        let x = px(xs.map(t));
        let _ = writeln!(
            out,
            r#"<line class="tick" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            px(plot_bottom()),
            px(plot_bottom() + 5.0),
            px(plot_bottom() + 18.0),
            fmt_trimmed(t, 1, 3)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">CA / CR</text>"#,
        px(WIDTH / 2.0),
        px(HEIGHT - 15.0)
    );

    let first = anchors[0];
    for (x0, x1, y) in [(0.0, first.ca_cr, first.sz), (last.ca_cr, x_max, last.sz)] {
        let _ = writeln!(
            out,
            r##"<line class="extension" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#1f77b4" stroke-dasharray="4 4"/>"##,
            px(xs.map(x0)),
            px(xs.map(x1)),
            y = px(ys.map(y))
        );
    }
    for pair in anchors.windows(2) {
        let _ = writeln!(
            out,
            r##"<line class="segment" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#1f77b4" stroke-width="2"/>"##,
            px(xs.map(pair[0].ca_cr)),
            px(ys.map(pair[0].sz)),
            px(xs.map(pair[1].ca_cr)),
            px(ys.map(pair[1].sz))
        );
    }
    for a in anchors {
        let _ = writeln!(
            out,
            r##"<circle class="anchor" cx="{}" cy="{}" r="4" fill="#1f77b4"><title>CA/CR {} : SZ {}</title></circle>"##,
            px(xs.map(a.ca_cr)),
            px(ys.map(a.sz)),
            a.ca_cr,
            a.sz
        );
    }
    if let Some(h) = highlight {
        let sz = curve.sz_at(h);
        let _ = writeln!(
            out,
            r##"<circle class="marker" cx="{}" cy="{}" r="6" fill="none" stroke="#d62728" stroke-width="2"/><text class="marker-label" x="{}" y="{}" fill="#d62728">SZ = {}</text>"##,
            px(xs.map(h)),
            px(ys.map(sz)),
            px(xs.map(h) + 8.0),
            px(ys.map(sz) - 8.0),
            fmt_trimmed(sz, 1, 4)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Value scale shared by every box in a plot.
pub fn box_value_scale(boxes: &[(String, FiveNumber)]) -> LinearScale {
    let lo = boxes.iter().map(|(_, f)| f.minimum).fold(f64::INFINITY, f64::min);
    let hi = boxes.iter().map(|(_, f)| f.maximum).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if boxes.is_empty() { (0.0, 1.0) } else { (lo, hi) };
    LinearScale::new((lo, hi), (plot_bottom(), MARGIN_TOP))
}

/// Box-and-whisker plot with whiskers at the minimum and maximum.
pub fn boxplot_svg(title: &str, boxes: &[(String, FiveNumber)]) -> String {
    let ys = box_value_scale(boxes);
    let mut out = String::new();
    open(&mut out, title);
    value_axis(&mut out, &ys, "value");
    let slot = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / boxes.len().max(1) as f64;
    let half = (slot * 0.3).min(40.0);
    for (i, (label, f)) in boxes.iter().enumerate() {
        let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
        let (l, r) = (px(cx - half), px(cx + half));
        let _ = writeln!(out, r#"<g class="box" data-label="{}">"#, escape(label));
        let _ = writeln!(
            out,
            r#"<line class="whisker" x1="{c}" y1="{}" x2="{c}" y2="{}" stroke="black"/>"#,
            px(ys.map(f.minimum)),
            px(ys.map(f.q1)),
            c = px(cx)
        );
        let _ = writeln!(
            out,
            r#"<line class="whisker" x1="{c}" y1="{}" x2="{c}" y2="{}" stroke="black"/>"#,
            px(ys.map(f.q3)),
            px(ys.map(f.maximum)),
            c = px(cx)
        );
        for (class, v) in [("minimum", f.minimum), ("maximum", f.maximum)] {
            let y = px(ys.map(v));
            let _ = writeln!(
                out,
                r#"<line class="{class}" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/>"#,
                px(cx - half / 2.0),
                px(cx + half / 2.0)
            );
        }
        let top = ys.map(f.q3);
        let _ = writeln!(
            out,
            r##"<rect class="iqr" x="{l}" y="{}" width="{}" height="{}" fill="#aec7e8" stroke="black"/>"##,
            px(top),
            px(2.0 * half),
            px(ys.map(f.q1) - top)
        );
        let y = px(ys.map(f.median));
        let _ = writeln!(
            out,
            r#"<line class="median" x1="{l}" y1="{y}" x2="{r}" y2="{y}" stroke="black" stroke-width="2"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text class="box-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px(cx),
            px(plot_bottom() + 18.0),
            escape(label)
        );
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
