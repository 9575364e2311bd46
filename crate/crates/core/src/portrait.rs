//! Phase portraits as SVG: invariant circles, singular points of the hole
//! factor, and streamlines traced from a fixed seed grid. Output depends
//! only on the field, so it is byte-for-byte reproducible.

use std::fmt::Write;

use serde::Serialize;

use crate::analysis::{NumericField, OdeOptions, Stepper};
use crate::construct::VectorField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitOptions {
    /// Seeds per side of the grid.
    pub grid: usize,
    /// Fractional growth of the bounding box of all circles.
    pub inflate: f64,
    /// Canvas side in pixels.
    pub size: f64,
    /// Arc length traced each way from a seed, as a fraction of the box side.
    pub reach: f64,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions { grid: 12, inflate: 0.25, size: 800.0, reach: 0.75 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedSeed {
    pub row: usize,
    pub col: usize,
    pub x: f64,
    pub y: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitMetadata {
    pub mode: String,
    pub bounds: [f64; 4],
    pub seeds: usize,
    pub skipped: Vec<SkippedSeed>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub svg: String,
    pub metadata: PortraitMetadata,
    pub streamlines: Vec<Vec<(f64, f64)>>,
}

/// Square box `[x0, y0, x1, y1]` around every circle, grown by `inflate`.
fn bounds(v: &VectorField, inflate: f64) -> [f64; 4] {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in v.config.circles() {
        let (cx, cy) = c.center_f64();
        let r = c.radius_f64();
        x0 = x0.min(cx - r);
        y0 = y0.min(cy - r);
        x1 = x1.max(cx + r);
        y1 = y1.max(cy + r);
    }
    let half = (x1 - x0).max(y1 - y0) * (1.0 + inflate) / 2.0;
    let (mx, my) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    [mx - half, my - half, mx + half, my + half]
}

/// Step cap per half streamline.
const MAX_STEPS: usize = 2_000;

/// Unit-speed direction of the field, or `None` where it vanishes or
/// overflows.
fn direction(field: &NumericField, x: f64, y: f64) -> Option<(f64, f64)> {
    let (a, b) = field.eval(x, y);
    let n = a.hypot(b);
    (n.is_finite() && n > 0.0).then(|| (a / n, b / n))
}

/// Traces the unit-speed flow for arc length `reach`, stopping at the edge
/// of `limit` or where the direction is undefined.
fn trace(field: &NumericField, seed: (f64, f64), sgn: f64, reach: f64, h_max: f64, limit: [f64; 4]) -> Vec<(f64, f64)> {
    let rhs = |y: &[f64; 2]| match direction(field, y[0], y[1]) {
        Some((a, b)) => [sgn * a, sgn * b],
        None => [0.0, 0.0],
    };
    let mut pts = vec![seed];
    let Ok(mut st) = Stepper::new(&rhs, [seed.0, seed.1], OdeOptions { max_steps: MAX_STEPS, ..OdeOptions::from_tol(1e-8) }.with_h_max(h_max)) else {
        return pts;
    };
    while st.s < reach && pts.len() < MAX_STEPS {
        if st.step().is_err() {
            break;
        }
        let (x, y) = (st.y[0], st.y[1]);
        if !(x.is_finite() && y.is_finite()) {
            break;
        }
        pts.push((x, y));
        if x < limit[0] || y < limit[1] || x > limit[2] || y > limit[3] || direction(field, x, y).is_none() {
            break;
        }
    }
    pts
}

pub fn render_portrait(v: &VectorField, opts: &PortraitOptions) -> Portrait {
    let field = NumericField::new(v);
    let b = bounds(v, opts.inflate);
    let side = b[2] - b[0];
    let scale = opts.size / side;
    let px = |x: f64| (x - b[0]) * scale;
    let py = |y: f64| (b[3] - y) * scale;
    let singular = v.config.singular_points_f64();

    let mut streamlines = Vec::new();
    let mut arrows = Vec::new();
    let mut skipped = Vec::new();
    for row in 0..opts.grid {
        for col in 0..opts.grid {
            let x = b[0] + side * (col as f64 + 0.5) / opts.grid as f64;
            let y = b[1] + side * (row as f64 + 0.5) / opts.grid as f64;
            let near = singular.iter().any(|q| (q.0 - x).hypot(q.1 - y) < 1e-3 * side);
            let dir = direction(&field, x, y);
            let reason = if near {
                Some("seed within 1e-3 of a singular point")
            } else if dir.is_none() {
                Some("field vanishes or is not finite at the seed")
            } else {
                None
            };
            if let Some(reason) = reason {
                skipped.push(SkippedSeed { row, col, x, y, reason: reason.into() });
                continue;
            }
            let limit = [b[0] - 0.1 * side, b[1] - 0.1 * side, b[2] + 0.1 * side, b[3] + 0.1 * side];
            let reach = opts.reach * side;
            let h_max = side / 200.0;
            let mut back = trace(&field, (x, y), -1.0, reach, h_max, limit);
            back.reverse();
            let fwd = trace(&field, (x, y), 1.0, reach, h_max, limit);
            back.extend_from_slice(&fwd[1..]);
            streamlines.push(back);
            arrows.push(((x, y), dir.expect("checked above")));
        }
    }

    let mut svg = String::new();
    let s = opts.size;
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#);
    let metadata = PortraitMetadata { mode: v.mode.name().into(), bounds: b, seeds: opts.grid * opts.grid, skipped };
    let meta = serde_json::to_string(&metadata).expect("metadata serializes");
    let _ = writeln!(svg, "<metadata>{}</metadata>", meta.replace('&', "&amp;").replace('<', "&lt;"));
    let _ = writeln!(svg, r#"<rect width="{s}" height="{s}" fill="white"/>"#);
    let _ = writeln!(svg, r##"<g fill="none" stroke="#7a8ca0" stroke-width="0.8">"##);
    for line in &streamlines {
        let pts: Vec<String> = line.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}"/>"#, pts.join(" "));
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r##"<g fill="#3b4a5a">"##);
    let head = 0.01 * s;
    for ((x, y), (a, b)) in &arrows {
        // screen coordinates flip y
        let (tx, ty) = (px(*x), py(*y));
        let (dx, dy) = (*a, -*b);
        let tip = (tx + head * dx, ty + head * dy);
        let l = (tx - 0.5 * head * dx - 0.5 * head * dy, ty - 0.5 * head * dy + 0.5 * head * dx);
        let r = (tx - 0.5 * head * dx + 0.5 * head * dy, ty - 0.5 * head * dy - 0.5 * head * dx);
        let _ = writeln!(svg, r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}"/>"#, tip.0, tip.1, l.0, l.1, r.0, r.1);
    }
    let _ = writeln!(svg, "</g>");
    let n = v.config.n();
    for (k, c) in v.config.circles().iter().enumerate() {
        let (cx, cy) = c.center_f64();
        let r = c.radius_f64() * scale;
        let style = if k < n { r##"stroke="#c0392b" stroke-width="2""## } else { r##"stroke="#555555" stroke-width="1.2" stroke-dasharray="6,4""## };
        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="none" {style}/>"#, px(cx), py(cy));
    }
    for (x, y) in &singular {
        let _ = writeln!(svg, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#000000"/>"##, px(*x), py(*y));
    }
    svg.push_str("</svg>\n");
    Portrait { svg, metadata, streamlines }
}
