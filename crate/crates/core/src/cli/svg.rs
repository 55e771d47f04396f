//! Minimal deterministic SVG plots of sweep results.
//!
//! 1-D sweeps and 2-D sweeps whose second axis is a short family (at most
//! [`MAX_CURVES`] values) become one polyline per curve; larger 2-D grids
//! become a grayscale cell map.

use std::fmt::Write;

use crate::sweep::{Axis, Scale, SweepResult};

pub const MAX_CURVES: usize = 8;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

const CURVE_GRAYS: [&str; MAX_CURVES] = [
    "#000000", "#555555", "#888888", "#aaaaaa", "#333333", "#666666", "#999999", "#bbbbbb",
];
const DASHES: [&str; 4] = ["none", "6 3", "2 2", "8 3 2 3"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn tick_label(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-2..1e4).contains(&a) {
        let s = format!("{x:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{x:.2e}")
    }
}

/// Maps a data interval onto a pixel interval, linearly or in log space.
struct Mapping {
    lo: f64,
    hi: f64,
    log: bool,
    p0: f64,
    p1: f64,
}

impl Mapping {
    fn new(lo: f64, hi: f64, log: bool, p0: f64, p1: f64) -> Self {
        let (lo, hi) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
        Mapping {
            lo,
            hi,
            log,
            p0,
            p1,
        }
    }

    fn for_axis(a: &Axis, p0: f64, p1: f64) -> Self {
        Mapping::new(a.min, a.max, a.scale == Scale::Log, p0, p1)
    }

    fn apply(&self, x: f64) -> f64 {
        let x = if self.log { x.ln() } else { x };
        self.p0 + (x - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..TICKS)
            .map(|i| {
                let u = self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64;
                if self.log {
                    u.exp()
                } else {
                    u
                }
            })
            .collect()
    }
}

fn value_range(result: &SweepResult) -> (f64, f64) {
    let (lo, hi) = result.range().unwrap_or((0.0, 1.0));
    if hi > lo {
        (lo, hi)
    } else {
        let pad = 0.05 * lo.abs().max(1e-12);
        (lo - pad, hi + pad)
    }
}

fn x_axis(out: &mut String, m: &Mapping, label: &str) {
    let y = HEIGHT - BOTTOM;
    let _ = writeln!(
        out,
        r#"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="black"/>"#,
        m.p0, m.p1
    );
    for t in m.ticks() {
        let x = m.apply(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.3}" y1="{y:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/>"#,
            y + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.3}" y="{:.3}" text-anchor="middle" font-size="11">{}</text>"#,
            y + 18.0,
            escape(&tick_label(t))
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-size="13">{}</text>"#,
        (m.p0 + m.p1) / 2.0,
        HEIGHT - 15.0,
        escape(label)
    );
}

fn y_axis(out: &mut String, m: &Mapping, label: &str) {
    let x = LEFT;
    let _ = writeln!(
        out,
        r#"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/>"#,
        m.p0, m.p1
    );
    for t in m.ticks() {
        let y = m.apply(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{x:.3}" y2="{y:.3}" stroke="black"/>"#,
            x - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end" font-size="11">{}</text>"#,
            x - 8.0,
            y + 4.0,
            escape(&tick_label(t))
        );
    }
    let cy = (m.p0 + m.p1) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="20" y="{cy:.3}" text-anchor="middle" font-size="13" transform="rotate(-90 20 {cy:.3})">{}</text>"#,
        escape(label)
    );
}

fn curves(out: &mut String, result: &SweepResult) {
    let axes = &result.spec.axes;
    let xm = Mapping::for_axis(&axes[0], LEFT, WIDTH - RIGHT);
    let (lo, hi) = value_range(result);
    let ym = Mapping::new(lo, hi, false, HEIGHT - BOTTOM, TOP);
    x_axis(out, &xm, axes[0].param.name());
    y_axis(out, &ym, result.spec.metric.name());

    let families: Vec<Option<(usize, f64)>> = match axes.get(1) {
        Some(a) => a.values().into_iter().enumerate().map(Some).collect(),
        None => vec![None],
    };
    for (k, fam) in families.iter().enumerate() {
        let pts: Vec<String> = result
            .rows
            .iter()
            .filter(|r| fam.is_none_or(|(j, _)| r.indices[1] == j))
            .filter(|r| r.value.is_finite())
            .map(|r| format!("{:.3},{:.3}", xm.apply(r.values[0]), ym.apply(r.value)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="{}" points="{}"/>"#,
            CURVE_GRAYS[k % MAX_CURVES],
            DASHES[k % DASHES.len()],
            pts.join(" ")
        );
        if let Some((_, value)) = fam {
            let ly = TOP + 20.0 + 18.0 * k as f64;
            let lx = WIDTH - RIGHT + 15.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.3}" y1="{ly:.3}" x2="{:.3}" y2="{ly:.3}" stroke="{}" stroke-width="1.5" stroke-dasharray="{}"/>"#,
                lx + 25.0,
                CURVE_GRAYS[k % MAX_CURVES],
                DASHES[k % DASHES.len()]
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" font-size="11">{} = {}</text>"#,
                lx + 30.0,
                ly + 4.0,
                escape(axes[1].param.name()),
                escape(&tick_label(*value))
            );
        }
    }
}

/// Cell edges: geometric or arithmetic midpoints between grid values.
fn edges(a: &Axis) -> Vec<f64> {
    let v = a.values();
    let mid = |x: f64, y: f64| match a.scale {
        Scale::Log => (x * y).sqrt(),
        Scale::Linear => 0.5 * (x + y),
    };
    let mut e = Vec::with_capacity(v.len() + 1);
    e.push(v[0]);
    e.extend(v.windows(2).map(|w| mid(w[0], w[1])));
    e.push(v[v.len() - 1]);
    e
}

fn cell_map(out: &mut String, result: &SweepResult) {
    let axes = &result.spec.axes;
    let xm = Mapping::for_axis(&axes[0], LEFT, WIDTH - RIGHT);
    let ym = Mapping::for_axis(&axes[1], HEIGHT - BOTTOM, TOP);
    let (lo, hi) = value_range(result);
    let (xe, ye) = (edges(&axes[0]), edges(&axes[1]));
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for r in &result.rows {
        let (i, j) = (r.indices[0], r.indices[1]);
        let (x0, x1) = (xm.apply(xe[i]), xm.apply(xe[i + 1]));
        let (y0, y1) = (ym.apply(ye[j + 1]), ym.apply(ye[j]));
        let fill = if r.value.is_finite() {
            let g = (255.0 * (1.0 - (r.value - lo) / (hi - lo)))
                .round()
                .clamp(0.0, 255.0) as u8;
            format!("#{g:02x}{g:02x}{g:02x}")
        } else {
            "#ff0000".to_string()
        };
        let _ = writeln!(
            out,
            r#"<rect x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
            x1 - x0,
            y1 - y0
        );
    }
    let _ = writeln!(out, "</g>");
    x_axis(out, &xm, axes[0].param.name());
    y_axis(out, &ym, axes[1].param.name());

    // gray bar legend: white = min, black = max
    let bx = WIDTH - RIGHT + 30.0;
    let bh = HEIGHT - TOP - BOTTOM;
    let _ = writeln!(
        out,
        r##"<defs><linearGradient id="scale" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="#ffffff"/><stop offset="1" stop-color="#000000"/></linearGradient></defs>"##
    );
    let _ = writeln!(
        out,
        r#"<rect x="{bx:.3}" y="{TOP:.3}" width="20" height="{bh:.3}" fill="url(#scale)" stroke="black"/>"#
    );
    for (y, v) in [(TOP + 4.0, hi), (TOP + bh, lo)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{y:.3}" font-size="11">{}</text>"#,
            bx + 25.0,
            escape(&tick_label(v))
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-size="11">{}</text>"#,
        bx + 10.0,
        TOP - 8.0,
        escape(result.spec.metric.name())
    );
}

/// Renders a sweep; the output depends only on the sweep definition and its rows.
pub fn render_svg(result: &SweepResult, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
    match result.spec.axes.get(1) {
        Some(a) if a.count > MAX_CURVES => cell_map(&mut out, result),
        _ => curves(&mut out, result),
    }
    out.push_str("</svg>\n");
    out
}
