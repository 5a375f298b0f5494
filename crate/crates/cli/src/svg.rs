//! Minimal SVG line-plot emitter: axes with linear or log scales, polylines,
//! markers, error bars and horizontal reference lines.

use std::fmt::Write;

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 400.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marker {
    Circle,
    Triangle,
    Square,
    Star,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    /// `(x, y, optional half-width of the error bar)`
    pub points: Vec<(f64, f64, Option<f64>)>,
    pub marker: Marker,
    pub dashed: bool,
    pub filled: bool,
    pub color: usize,
}

#[derive(Debug, Clone)]
pub struct HLine {
    pub y: f64,
    pub color: usize,
}

/// Downward arrow pointing at `(x, y)`.
#[derive(Debug, Clone)]
pub struct Arrow {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_log: bool,
    pub y_log: bool,
    pub series: Vec<Series>,
    pub hlines: Vec<HLine>,
    pub arrows: Vec<Arrow>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    px0: f64,
    px1: f64,
}

impl Axis {
    fn new(values: &[f64], log: bool, px0: f64, px1: f64) -> Self {
        let vals: Vec<f64> = values
            .iter()
            .copied()
            .filter(|v| v.is_finite() && (!log || *v > 0.0))
            .map(|v| if log { v.log10() } else { v })
            .collect();
        let (mut lo, mut hi) = vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        } else {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Axis { lo, hi, log, px0, px1 }
    }

    fn map(&self, v: f64) -> Option<f64> {
        let t = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        Some(self.px0 + (t - self.lo) / (self.hi - self.lo) * (self.px1 - self.px0))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            (self.lo as i32..=self.hi as i32)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect()
        } else {
            let span = self.hi - self.lo;
            let raw = span / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(mag * 10.0);
            let mut t = (self.lo / step).ceil() * step;
            let mut out = Vec::new();
            while t <= self.hi + 1e-12 {
                out.push((t, format!("{}", (t / step).round() * step)));
                t += step;
            }
            out
        }
    }
}

fn marker(out: &mut String, m: Marker, x: f64, y: f64, color: &str, filled: bool) {
    let fill = if filled { color } else { "white" };
    let r = 4.0;
    let _ = match m {
        Marker::Circle => writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}" stroke="{color}"/>"#
        ),
        Marker::Square => writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{}" height="{}" fill="{fill}" stroke="{color}"/>"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        Marker::Triangle => writeln!(
            out,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}" stroke="{color}"/>"#,
            x,
            y - r,
            x - r,
            y + r,
            x + r,
            y + r
        ),
        Marker::Star => {
            let pts: Vec<String> = (0..10)
                .map(|k| {
                    let rad = if k % 2 == 0 { r * 1.3 } else { r * 0.55 };
                    let a = std::f64::consts::PI * (k as f64) / 5.0 - std::f64::consts::FRAC_PI_2;
                    format!("{:.2},{:.2}", x + rad * a.cos(), y + rad * a.sin())
                })
                .collect();
            writeln!(
                out,
                r#"<polygon points="{}" fill="{fill}" stroke="{color}"/>"#,
                pts.join(" ")
            )
        }
    };
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render_panel(out: &mut String, p: &Panel, ox: f64) {
    let (x0, x1) = (ox + MARGIN_L, ox + PANEL_W - MARGIN_R);
    let (y0, y1) = (PANEL_H - MARGIN_B, MARGIN_T);
    let xs: Vec<f64> = p
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|q| q.0))
        .chain(p.arrows.iter().map(|a| a.x))
        .collect();
    let mut ys: Vec<f64> = Vec::new();
    for s in &p.series {
        for &(_, y, e) in &s.points {
            ys.push(y);
            if let Some(e) = e {
                ys.push(y + e);
                if !p.y_log || y - e > 0.0 {
                    ys.push(y - e);
                }
            }
        }
    }
    ys.extend(p.hlines.iter().map(|h| h.y));
    let ax = Axis::new(&xs, p.x_log, x0, x1);
    let ay = Axis::new(&ys, p.y_log, y0, y1);

    let _ = writeln!(
        out,
        r##"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="#000"/>"##,
        x1 - x0,
        y0 - y1
    );
    for (v, label) in ax.ticks() {
        if let Some(px) = ax.map(v) {
            let _ = writeln!(
                out,
                r##"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="#000"/><text x="{px:.2}" y="{}" font-size="11" text-anchor="middle">{label}</text>"##,
                y0 - 5.0,
                y0 + 16.0
            );
        }
    }
    for (v, label) in ay.ticks() {
        if let Some(py) = ay.map(v) {
            let _ = writeln!(
                out,
                r##"<line x1="{x0}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#000"/><text x="{}" y="{:.2}" font-size="11" text-anchor="end">{label}</text>"##,
                x0 + 5.0,
                x0 - 4.0,
                py + 4.0
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        PANEL_H - 15.0,
        escape(&p.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        ox + 18.0,
        (y0 + y1) / 2.0,
        ox + 18.0,
        (y0 + y1) / 2.0,
        escape(&p.y_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        MARGIN_T - 15.0,
        escape(&p.title)
    );

    for h in &p.hlines {
        if let Some(py) = ay.map(h.y) {
            let _ = writeln!(
                out,
                r#"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="{}" stroke-dasharray="6,4"/>"#,
                PALETTE[h.color % PALETTE.len()]
            );
        }
    }
    for s in &p.series {
        let color = PALETTE[s.color % PALETTE.len()];
        let mapped: Vec<(f64, f64, Option<f64>, f64)> = s
            .points
            .iter()
            .filter_map(|&(x, y, e)| Some((ax.map(x)?, ay.map(y)?, e, y)))
            .collect();
        if mapped.len() > 1 {
            let path: Vec<String> = mapped.iter().map(|q| format!("{:.2},{:.2}", q.0, q.1)).collect();
            let dash = if s.dashed { r#" stroke-dasharray="5,3""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}"{dash}/>"#,
                path.join(" ")
            );
        }
        for &(px, py, e, y) in &mapped {
            if let Some(e) = e {
                let top = ay.map(y + e).unwrap_or(py);
                let bottom = ay.map(y - e).unwrap_or(y0);
                let _ = writeln!(
                    out,
                    r#"<line x1="{px:.2}" y1="{top:.2}" x2="{px:.2}" y2="{bottom:.2}" stroke="{color}"/>"#
                );
            }
            marker(out, s.marker, px, py, color, s.filled);
        }
    }
    for a in &p.arrows {
        if let (Some(px), Some(py)) = (ax.map(a.x), ay.map(a.y)) {
            let _ = writeln!(
                out,
                r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000" stroke-width="2"/><polygon points="{px:.2},{py:.2} {:.2},{:.2} {:.2},{:.2}" fill="#000"/>"##,
                py - 40.0,
                py - 8.0,
                px - 5.0,
                py - 10.0,
                px + 5.0,
                py - 10.0
            );
        }
    }
    // legend
    for (k, s) in p.series.iter().enumerate() {
        let color = PALETTE[s.color % PALETTE.len()];
        let ly = y1 + 14.0 + 15.0 * k as f64;
        let lx = x1 - 150.0;
        marker(out, s.marker, lx, ly, color, s.filled);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            lx + 10.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
}

/// Renders panels side by side.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_H}" viewBox="0 0 {width} {PANEL_H}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, PANEL_W * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_axis_covers_decades() {
        let a = Axis::new(&[3.0, 2000.0], true, 0.0, 100.0);
        assert_eq!((a.lo, a.hi), (0.0, 4.0));
        assert_eq!(a.ticks().len(), 5);
        assert!(a.map(-1.0).is_none());
        assert!((a.map(100.0).unwrap() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn renders_all_elements() {
        let p = Panel {
            title: "t".into(),
            x_label: "N".into(),
            y_label: "D".into(),
            x_log: true,
            y_log: true,
            series: vec![Series {
                label: "a<b".into(),
                points: vec![(10.0, 0.1, Some(0.05)), (100.0, 0.03, None)],
                marker: Marker::Star,
                dashed: true,
                filled: false,
                color: 0,
            }],
            hlines: vec![HLine { y: 0.01, color: 0 }],
            arrows: vec![Arrow { x: 50.0, y: 0.01 }],
        };
        let svg = render(&[p.clone(), p]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("stroke-dasharray=\"6,4\""));
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains(r#"width="1040""#));
    }
}
