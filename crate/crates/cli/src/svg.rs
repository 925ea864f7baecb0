//! Hand-rolled line chart of `‖T^n x - x‖` against `n`. Output bytes depend
//! only on the record.

use std::fmt::Write;
use std::path::Path;

use lindyn::{Error, Record, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 28.0;
const BOTTOM: f64 = 40.0;
/// More return markers than this are thinned to every k-th one.
const MAX_MARKERS: usize = 512;

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(record: &Record) -> Result<String> {
    if record.samples.is_empty() {
        return Err(Error::InvalidInput("record has no samples".into()));
    }
    let n_max = record.samples.last().map(|s| s.0).unwrap_or(1).max(1) as f64;
    let d_max = record.samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let mut y_max = d_max.max(record.eps) * 1.1;
    if !y_max.is_finite() || y_max <= 0.0 {
        y_max = 1.0;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |n: f64| LEFT + if n_max > 1.0 { (n - 1.0) / (n_max - 1.0) * plot_w } else { plot_w / 2.0 };
    let py = |d: f64| TOP + plot_h - (d / y_max).clamp(0.0, 1.0) * plot_h;

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="18">{} ‖T^n x - x‖, eps = {:e}</text>"#,
        num(LEFT),
        escape(&record.vector_id),
        record.eps
    );
    // axes
    let (x0, y0, x1, y1) = (LEFT, TOP + plot_h, LEFT + plot_w, TOP);
    let _ = writeln!(w, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, num(x0), num(y0), num(x1), num(y0));
    let _ = writeln!(w, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, num(x0), num(y0), num(x0), num(y1));
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle">1</text>"#, num(x0), num(y0 + 16.0));
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, num(x1), num(y0 + 16.0), n_max);
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle">n</text>"#, num(LEFT + plot_w / 2.0), num(y0 + 30.0));
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="end">0</text>"#, num(x0 - 6.0), num(y0 + 4.0));
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="end">{:.3e}</text>"#, num(x0 - 6.0), num(y1 + 4.0), y_max);
    // eps rule
    let ye = py(record.eps);
    let _ = writeln!(
        w,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 3"/>"#,
        num(x0),
        num(ye),
        num(x1),
        num(ye)
    );
    // distance curve
    let points: Vec<String> =
        record.samples.iter().map(|&(n, d)| format!("{},{}", num(px(n as f64)), num(py(d)))).collect();
    let _ = writeln!(w, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, points.join(" "));
    // return markers
    let step = record.eps_return_times.len().div_ceil(MAX_MARKERS).max(1);
    for &n in record.eps_return_times.iter().step_by(step) {
        let d = record.distance_at(n).unwrap_or(0.0);
        let _ = writeln!(w, r#"<circle cx="{}" cy="{}" r="2.5" fill="crimson"/>"#, num(px(n as f64)), num(py(d)));
    }
    if record.overflow {
        let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="end">growth guard hit</text>"#, num(x1), num(y1 + 12.0));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(record: &Record, path: &Path) -> Result<()> {
    let svg = render_svg(record)?;
    std::fs::write(path, svg).map_err(|e| Error::IoFailure(format!("{}: {e}", path.display())))
}
