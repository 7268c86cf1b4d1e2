//! Self-contained SVG renderers: polyline charts and heatmaps.
//!
//! No external assets, no scripts, deterministic output: the same inputs
//! always produce the same bytes. Only what the outputs here need is
//! implemented (log/linear axes, tick labels, legends, a fixed color map).

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 58.0;

/// Fallback fill for cells whose value is missing or unrepresentable.
const MISSING: &str = "#999999";

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct Axes<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Compact number label: plain decimal in a comfortable range, scientific
/// outside it, '.' decimal separator always.
fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return "?".to_string();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        return format!("{v:.1e}");
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// Tick positions at 1-2-5 decades covering [lo, hi].
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return vec![lo];
    }
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        // Snap values like 0.30000000000000004 back onto the grid.
        let snapped = (t / step).round() * step;
        out.push(if snapped.abs() < step * 1e-9 { 0.0 } else { snapped });
        t += step;
    }
    out
}

/// Tick positions for a log axis over [lo, hi], both positive: decades when
/// the span allows, otherwise 1-2-5 mantissas.
fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let decades: Vec<f64> = ((lo.log10().ceil() as i32)..=(hi.log10().floor() as i32))
        .map(|k| 10f64.powi(k))
        .collect();
    if decades.len() >= 2 {
        return decades;
    }
    let mut out = Vec::new();
    for k in (lo.log10().floor() as i32 - 1)..=(hi.log10().ceil() as i32) {
        for m in [1.0, 2.0, 5.0] {
            let v = m * 10f64.powi(k);
            if v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12) {
                out.push(v);
            }
        }
    }
    if out.is_empty() {
        out.push(lo);
    }
    out
}

/// Maps data coordinates to pixels for one plot frame.
struct Frame {
    tx0: f64,
    tx1: f64,
    ty0: f64,
    ty1: f64,
    log_x: bool,
    log_y: bool,
    right: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64, log_x: bool, log_y: bool, right: f64) -> Self {
        let t = |v: f64, log: bool| if log { v.ln() } else { v };
        let widen = |a: f64, b: f64| if a == b { (a - 0.5, b + 0.5) } else { (a, b) };
        let (tx0, tx1) = widen(t(x0, log_x), t(x1, log_x));
        let (ty0, ty1) = widen(t(y0, log_y), t(y1, log_y));
        Frame { tx0, tx1, ty0, ty1, log_x, log_y, right }
    }

    fn plot_w(&self) -> f64 {
        WIDTH - MARGIN_LEFT - self.right
    }

    fn plot_h(&self) -> f64 {
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    fn px(&self, x: f64) -> f64 {
        let t = if self.log_x { x.ln() } else { x };
        MARGIN_LEFT + (t - self.tx0) / (self.tx1 - self.tx0) * self.plot_w()
    }

    fn py(&self, y: f64) -> f64 {
        let t = if self.log_y { y.ln() } else { y };
        MARGIN_TOP + self.plot_h() - (t - self.ty0) / (self.ty1 - self.ty0) * self.plot_h()
    }
}

fn header(out: &mut String) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = write!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn chrome(out: &mut String, axes: &Axes, f: &Frame) {
    let _ = write!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        MARGIN_LEFT + f.plot_w() / 2.0,
        xml_escape(axes.title)
    );
    let _ = write!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        MARGIN_LEFT + f.plot_w() / 2.0,
        HEIGHT - 14.0,
        xml_escape(axes.x_label)
    );
    let ym = MARGIN_TOP + f.plot_h() / 2.0;
    let _ = write!(
        out,
        r#"<text x="20" y="{ym:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 {ym:.2})">{}</text>"#,
        xml_escape(axes.y_label)
    );
    let _ = write!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
        MARGIN_LEFT,
        MARGIN_TOP,
        f.plot_w(),
        f.plot_h()
    );
}

fn ticks_for(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    if log {
        log_ticks(lo, hi)
    } else {
        nice_ticks(lo, hi)
    }
}

fn draw_ticks(out: &mut String, f: &Frame, xt: &[f64], yt: &[f64], grid: bool) {
    let (top, bottom) = (MARGIN_TOP, MARGIN_TOP + f.plot_h());
    let (left, right) = (MARGIN_LEFT, MARGIN_LEFT + f.plot_w());
    for &x in xt {
        let px = f.px(x);
        if !(left - 0.5..=right + 0.5).contains(&px) {
            continue;
        }
        if grid {
            let _ = write!(
                out,
                r##"<line x1="{px:.2}" y1="{top:.2}" x2="{px:.2}" y2="{bottom:.2}" stroke="#ddd"/>"##
            );
        }
        let _ = write!(
            out,
            r##"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333"/>"##,
            bottom + 5.0
        );
        let _ = write!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
            bottom + 18.0,
            fmt_num(x)
        );
    }
    for &y in yt {
        let py = f.py(y);
        if !(top - 0.5..=bottom + 0.5).contains(&py) {
            continue;
        }
        if grid {
            let _ = write!(
                out,
                r##"<line x1="{left:.2}" y1="{py:.2}" x2="{right:.2}" y2="{py:.2}" stroke="#ddd"/>"##
            );
        }
        let _ = write!(
            out,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="#333"/>"##,
            left - 5.0
        );
        let _ = write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#,
            left - 8.0,
            py + 4.0,
            fmt_num(y)
        );
    }
}

/// Multi-series line chart. Points with nonpositive coordinates on a log
/// axis, or non-finite coordinates anywhere, are dropped.
pub fn line_plot(axes: &Axes, series: &[Series]) -> String {
    let keep = |p: &(f64, f64)| {
        p.0.is_finite()
            && p.1.is_finite()
            && (!axes.log_x || p.0 > 0.0)
            && (!axes.log_y || p.1 > 0.0)
    };
    let mut out = String::new();
    header(&mut out);

    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied().filter(keep))
        .collect();
    if pts.is_empty() {
        let _ = write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">no drawable data</text></svg>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
        return out;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let mut f = Frame::new(x0, x1, y0, y1, axes.log_x, axes.log_y, 24.0);
    // 4% breathing room in transformed space.
    let (pw, ph) = ((f.tx1 - f.tx0) * 0.04, (f.ty1 - f.ty0) * 0.04);
    f.tx0 -= pw;
    f.tx1 += pw;
    f.ty0 -= ph;
    f.ty1 += ph;

    chrome(&mut out, axes, &f);
    let xt = ticks_for(x0, x1, axes.log_x);
    let yt = ticks_for(y0, y1, axes.log_y);
    draw_ticks(&mut out, &f, &xt, &yt, true);

    for s in series {
        let mut coords = String::new();
        for p in s.points.iter().copied().filter(keep) {
            let _ = write!(coords, "{:.2},{:.2} ", f.px(p.0), f.py(p.1));
        }
        let _ = write!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.6"/>"#,
            coords.trim_end(),
            s.color
        );
    }

    // Legend, top right of the plot area.
    let lx = MARGIN_LEFT + f.plot_w() - 190.0;
    let mut ly = MARGIN_TOP + 12.0;
    let _ = write!(
        out,
        r#"<rect x="{:.2}" y="{:.2}" width="184" height="{}" fill="white" opacity="0.85"/>"#,
        lx - 4.0,
        ly - 10.0,
        series.len() * 18 + 6
    );
    for s in series {
        let _ = write!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/>"#,
            lx + 22.0,
            s.color
        );
        let _ = write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            xml_escape(s.name)
        );
        ly += 18.0;
    }
    out.push_str("</svg>");
    out
}

/// Five-anchor approximation of a perceptually ordered color map.
fn colormap(t: f64) -> String {
    const ANCHORS: [(f64, [f64; 3]); 5] = [
        (0.00, [68.0, 1.0, 84.0]),
        (0.25, [59.0, 82.0, 139.0]),
        (0.50, [33.0, 145.0, 140.0]),
        (0.75, [94.0, 201.0, 98.0]),
        (1.00, [253.0, 231.0, 37.0]),
    ];
    let t = t.clamp(0.0, 1.0);
    let hi = ANCHORS.iter().position(|(a, _)| *a >= t).unwrap_or(4).max(1);
    let (a0, c0) = ANCHORS[hi - 1];
    let (a1, c1) = ANCHORS[hi];
    let u = if a1 > a0 { (t - a0) / (a1 - a0) } else { 0.0 };
    let mix = |i: usize| (c0[i] + (c1[i] - c0[i]) * u).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

/// Cell-centered heatmap of `values[iy][ix]` over axis value arrays `x`
/// (length nx) and `y` (length ny). Axis positions honor `axes.log_*`;
/// `log_color` puts the color scale on the logs of the positive values.
pub fn heatmap(axes: &Axes, x: &[f64], y: &[f64], values: &[Vec<f64>], log_color: bool) -> String {
    assert!(!x.is_empty() && !y.is_empty());
    assert_eq!(values.len(), y.len());

    let mut out = String::new();
    header(&mut out);
    let f = Frame::new(x[0], *x.last().unwrap(), y[0], *y.last().unwrap(), axes.log_x, axes.log_y, 120.0);
    chrome(&mut out, axes, &f);

    // Color range over drawable values.
    let drawable = |v: f64| v.is_finite() && (!log_color || v > 0.0);
    let (mut vmin, mut vmax) = (f64::MAX, f64::MIN);
    for row in values {
        for &v in row {
            if drawable(v) {
                vmin = vmin.min(v);
                vmax = vmax.max(v);
            }
        }
    }
    let have_data = vmin <= vmax;
    if have_data && vmin == vmax {
        if log_color {
            vmin *= 0.5;
            vmax *= 2.0;
        } else {
            vmin -= 0.5;
            vmax += 0.5;
        }
    }
    let scale = |v: f64| -> f64 {
        if log_color {
            (v.ln() - vmin.ln()) / (vmax.ln() - vmin.ln())
        } else {
            (v - vmin) / (vmax - vmin)
        }
    };

    // Cell edges: midpoints between sample positions, in pixel space.
    let edges = |vals: &[f64], to_px: &dyn Fn(f64) -> f64| -> Vec<f64> {
        let p: Vec<f64> = vals.iter().map(|&v| to_px(v)).collect();
        let n = p.len();
        let mut e = Vec::with_capacity(n + 1);
        if n == 1 {
            return vec![p[0] - 2.0, p[0] + 2.0];
        }
        e.push(p[0] - (p[1] - p[0]) / 2.0);
        for i in 1..n {
            e.push((p[i - 1] + p[i]) / 2.0);
        }
        e.push(p[n - 1] + (p[n - 1] - p[n - 2]) / 2.0);
        e
    };
    let ex = edges(x, &|v| f.px(v));
    let ey = edges(y, &|v| f.py(v));

    let _ = write!(out, r#"<g shape-rendering="crispEdges">"#);
    for (iy, row) in values.iter().enumerate() {
        for (ix, &v) in row.iter().enumerate() {
            let color = if drawable(v) && have_data {
                colormap(scale(v))
            } else {
                MISSING.to_string()
            };
            let (x0, x1) = (ex[ix].min(ex[ix + 1]), ex[ix].max(ex[ix + 1]));
            let (y0, y1) = (ey[iy].min(ey[iy + 1]), ey[iy].max(ey[iy + 1]));
            let _ = write!(
                out,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                x1 - x0,
                y1 - y0
            );
        }
    }
    out.push_str("</g>");

    let xt = ticks_for(x[0], *x.last().unwrap(), axes.log_x);
    let yt = ticks_for(y[0], *y.last().unwrap(), axes.log_y);
    draw_ticks(&mut out, &f, &xt, &yt, false);

    // Colorbar.
    if have_data {
        let (bx, bw) = (WIDTH - 96.0, 14.0);
        let (bt, bh) = (MARGIN_TOP, f.plot_h());
        let slabs = 64;
        for i in 0..slabs {
            let t0 = i as f64 / slabs as f64;
            let t1 = (i + 1) as f64 / slabs as f64;
            let yb = bt + bh * (1.0 - t1);
            let _ = write!(
                out,
                r#"<rect x="{bx:.2}" y="{yb:.2}" width="{bw}" height="{:.2}" fill="{}"/>"#,
                bh * (t1 - t0) + 0.5,
                colormap((t0 + t1) / 2.0)
            );
        }
        let _ = write!(
            out,
            r##"<rect x="{bx:.2}" y="{bt:.2}" width="{bw}" height="{bh:.2}" fill="none" stroke="#333"/>"##
        );
        let label = |t: f64| -> String {
            let v = if log_color {
                (vmin.ln() + (vmax.ln() - vmin.ln()) * t).exp()
            } else {
                vmin + (vmax - vmin) * t
            };
            fmt_num(v)
        };
        for (t, anchor_y) in [(0.0, bt + bh), (0.5, bt + bh / 2.0), (1.0, bt)] {
            let _ = write!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
                bx + bw + 4.0,
                anchor_y + 4.0,
                label(t)
            );
        }
    }
    out.push_str("</svg>");
    out
}
