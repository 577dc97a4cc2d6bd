//! Minimal log-log line plots written as standalone SVG.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesStyle {
    Markers,
    Line,
    Dashed,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: SeriesStyle,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: SeriesStyle) -> Self {
        Series { label: label.into(), points, style }
    }

    /// The line `y = y0 (x / x0)^slope` drawn across `[x_lo, x_hi]`.
    pub fn power_law(label: impl Into<String>, anchor: (f64, f64), slope: f64, x_lo: f64, x_hi: f64) -> Self {
        let (x0, y0) = anchor;
        let at = |x: f64| (x, y0 * (x / x0).powf(slope));
        Series::new(label, vec![at(x_lo), at(x_hi)], SeriesStyle::Dashed)
    }
}

#[derive(Clone, Debug, Default)]
pub struct LogLogPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Free-text lines printed in the top-left corner of the plot area.
    pub annotations: Vec<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Decade range `[floor(log10 lo), ceil(log10 hi)]`, widened if degenerate.
fn decades(lo: f64, hi: f64) -> (f64, f64) {
    let (a, mut b) = (lo.log10().floor(), hi.log10().ceil());
    if b <= a {
        b = a + 1.0;
    }
    (a, b)
}

impl LogLogPlot {
    pub fn render(&self) -> String {
        let finite = |v: f64| v.is_finite() && v > 0.0;
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|p| finite(p.0) && finite(p.1));
        let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
        for &(x, y) in pts {
            xlo = xlo.min(x);
            xhi = xhi.max(x);
            ylo = ylo.min(y);
            yhi = yhi.max(y);
        }
        if !xlo.is_finite() {
            (xlo, xhi, ylo, yhi) = (1.0, 10.0, 1.0, 10.0);
        }
        let (xa, xb) = decades(xlo, xhi);
        let (ya, yb) = decades(ylo, yhi);
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x.log10() - xa) / (xb - xa) * pw;
        let sy = |y: f64| MARGIN_TOP + (yb - y.log10()) / (yb - ya) * ph;

        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(o, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            o,
            r#"<g class="axes" data-scale="log-log"><rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for k in xa as i32..=xb as i32 {
            let x = sx(10f64.powi(k));
            let _ = writeln!(
                o,
                r##"<line x1="{x:.2}" y1="{MARGIN_TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{k}</text>"##,
                MARGIN_TOP + ph,
                MARGIN_TOP + ph + 18.0
            );
        }
        for k in ya as i32..=yb as i32 {
            let y = sy(10f64.powi(k));
            let _ = writeln!(
                o,
                r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{k}</text>"##,
                MARGIN_LEFT + pw,
                MARGIN_LEFT - 6.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            o,
            r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">{}</text></g>"#,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> =
                s.points.iter().copied().filter(|p| finite(p.0) && finite(p.1)).map(|(x, y)| (sx(x), sy(y))).collect();
            let _ = write!(o, r#"<g class="series" data-label="{}">"#, escape(&s.label));
            match s.style {
                SeriesStyle::Markers => {
                    for (x, y) in &pts {
                        let _ = write!(o, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{color}"/>"#);
                    }
                }
                SeriesStyle::Line | SeriesStyle::Dashed => {
                    let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let dash = if s.style == SeriesStyle::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = write!(
                        o,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                        path.join(" ")
                    );
                }
            }
            let ly = MARGIN_TOP + 14.0 + 18.0 * i as f64;
            let lx = MARGIN_LEFT + pw + 12.0;
            let _ = writeln!(
                o,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        for (i, a) in self.annotations.iter().enumerate() {
            let _ = writeln!(
                o,
                r#"<text class="annotation" x="{:.2}" y="{:.2}">{}</text>"#,
                MARGIN_LEFT + 8.0,
                MARGIN_TOP + 16.0 + 16.0 * i as f64,
                escape(a)
            );
        }
        o.push_str("</svg>\n");
        o
    }
}

/// Text of every `class="annotation"` element in an SVG produced by
/// [`LogLogPlot::render`].
pub fn annotations(svg: &str) -> Vec<String> {
    svg.lines()
        .filter(|l| l.contains(r#"class="annotation""#))
        .filter_map(|l| {
            let start = l.find('>')? + 1;
            let end = l[start..].find('<')? + start;
            Some(l[start..end].replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_and_annotations() {
        let plot = LogLogPlot {
            title: "t & u".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![
                Series::new("data", vec![(10.0, 1.0), (100.0, 0.3)], SeriesStyle::Markers),
                Series::power_law("ref", (10.0, 1.0), -0.5, 10.0, 100.0),
            ],
            annotations: vec!["fitted slope = -0.522879".into()],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("data-scale=\"log-log\""));
        assert!(svg.contains("t &amp; u"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert_eq!(annotations(&svg), vec!["fitted slope = -0.522879".to_string()]);
    }

    #[test]
    fn power_law_endpoints() {
        let s = Series::power_law("r", (4.0, 2.0), -0.5, 1.0, 16.0);
        assert_eq!(s.points, vec![(1.0, 4.0), (16.0, 1.0)]);
    }

    #[test]
    fn empty_plot_still_renders() {
        let svg = LogLogPlot::default().render();
        assert!(svg.contains("</svg>"));
    }
}
