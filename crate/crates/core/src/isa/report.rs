//! Static SVG scatter of the instance space.

use std::fmt::Write as _;

use super::hull::Point;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const LEGEND_WIDTH: f64 = 160.0;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Points coloured by `labels[i]` (an index into `classes`), the boundary as
/// a closed polyline and a legend on the right.
pub fn render_svg(title: &str, points: &[Point], labels: &[usize], classes: &[String], boundary: &[Point]) -> String {
    let all = points.iter().chain(boundary);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let r = if hi > lo { (hi - lo) * 0.05 } else { 1.0 };
        (lo - r, hi + r)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{HEIGHT}" viewBox="0 0 {} {HEIGHT}" font-family="sans-serif" font-size="12">"#,
        WIDTH + LEGEND_WIDTH,
        WIDTH + LEGEND_WIDTH
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ =
        writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#999"/>"##
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">Z1</text>"#, WIDTH / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">Z2</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (v, anchor, x, y) in
        [(x0, "start", MARGIN, HEIGHT - MARGIN + 16.0), (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0)]
    {
        let _ = writeln!(s, r##"<text x="{x}" y="{y}" text-anchor="{anchor}" fill="#555">{v:.2}</text>"##);
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN + 10.0)] {
        let _ = writeln!(s, r##"<text x="{}" y="{y}" text-anchor="end" fill="#555">{v:.2}</text>"##, MARGIN - 4.0);
    }
    if boundary.len() >= 3 {
        let pts: Vec<String> =
            boundary.iter().chain(boundary.first()).map(|p| format!("{:.2},{:.2}", sx(p[0]), sy(p[1]))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="red" stroke-width="1.5"/>"#, pts.join(" "));
    }
    for (p, &l) in points.iter().zip(labels) {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.8"/>"#,
            sx(p[0]),
            sy(p[1]),
            PALETTE[l % PALETTE.len()]
        );
    }
    for (i, c) in classes.iter().enumerate() {
        let y = MARGIN + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="5" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            WIDTH + 8.0,
            y,
            PALETTE[i % PALETTE.len()],
            WIDTH + 18.0,
            y + 4.0,
            escape(c)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_has_one_circle_per_point_plus_legend() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let svg = render_svg("t<1>", &pts, &[0, 1, 0], &["a".into(), "b".into()], &pts);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 5);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("t&lt;1&gt;"));
    }
}
