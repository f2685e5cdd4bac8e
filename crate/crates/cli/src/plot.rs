//! Standalone SVG phase portraits of planar trajectories.

use std::fmt::Write;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 48.0;

struct Frame {
    u0: f64,
    v0: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[[f64; 2]]) -> Frame {
        let (mut umin, mut umax, mut vmin, mut vmax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for p in points.iter().filter(|p| p[0].is_finite() && p[1].is_finite()) {
            umin = umin.min(p[0]);
            umax = umax.max(p[0]);
            vmin = vmin.min(p[1]);
            vmax = vmax.max(p[1]);
        }
        let span = (umax - umin).max(vmax - vmin).max(1e-12) * 1.05;
        let (uc, vc) = (0.5 * (umin + umax), 0.5 * (vmin + vmax));
        Frame {
            u0: uc - 0.5 * span,
            v0: vc - 0.5 * span,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            MARGIN + (p[0] - self.u0) * self.scale,
            SIZE - MARGIN - (p[1] - self.v0) * self.scale,
        )
    }
}

/// Orbits in the `(u, v)` plane with the equilibrium at the origin marked.
pub fn phase_portrait(title: &str, orbits: &[Vec<[f64; 2]>]) -> String {
    let all: Vec<[f64; 2]> = orbits.iter().flatten().copied().collect();
    let frame = Frame::fit(&all);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="#999999"/>"##,
        w = SIZE - 2.0 * MARGIN
    );
    let (ox, oy) = frame.map([0.0, 0.0]);
    let _ = writeln!(
        svg,
        r##"<line x1="{MARGIN}" y1="{oy:.2}" x2="{e:.2}" y2="{oy:.2}" stroke="#cccccc"/><line x1="{ox:.2}" y1="{MARGIN}" x2="{ox:.2}" y2="{e:.2}" stroke="#cccccc"/>"##,
        e = SIZE - MARGIN
    );
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    for (k, orbit) in orbits.iter().enumerate() {
        let mut pts = String::new();
        for p in orbit.iter().filter(|p| p[0].is_finite() && p[1].is_finite()) {
            let (x, y) = frame.map(*p);
            let _ = write!(pts, "{x:.2},{y:.2} ");
        }
        let colour = palette[k % palette.len()];
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.2"/>"#,
            pts.trim_end()
        );
        if let Some(first) = orbit.first() {
            let (x, y) = frame.map(*first);
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{colour}"/>"#);
        }
    }
    let _ = writeln!(
        svg,
        r##"<circle cx="{ox:.2}" cy="{oy:.2}" r="5" fill="none" stroke="#000000" stroke-width="2"><title>equilibrium</title></circle>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">u</text>"#,
        SIZE / 2.0,
        SIZE - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="14">v</text>"#,
        SIZE / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
