//! Minimal SVG output. The first line is a version comment; everything
//! after it depends only on the input.

use std::fmt::Write;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

struct Frame {
    min: (f64, f64),
    scale: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Frame {
        let (mut lo, mut hi) = (
            (f64::INFINITY, f64::INFINITY),
            (f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for &(x, y) in points {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1);
        let scale = if span > 0.0 {
            (SIZE - 2.0 * MARGIN) / span
        } else {
            1.0
        };
        Frame { min: lo, scale }
    }

    /// Screen coordinates, y pointing down.
    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            MARGIN + (x - self.min.0) * self.scale,
            SIZE - MARGIN - (y - self.min.1) * self.scale,
        )
    }
}

fn header(out: &mut String) {
    writeln!(out, "<!-- shadowcut {} -->", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
}

fn polyline(out: &mut String, pts: &[(f64, f64)], closed: bool, style: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    let tag = if closed { "polygon" } else { "polyline" };
    writeln!(out, r#"<{tag} points="{}" {style}/>"#, coords.join(" ")).unwrap();
}

/// All projected vertices as dots, the hull outline, and the shadow path
/// (indices into `points`) drawn on top.
pub fn shadow_polygon(points: &[(f64, f64)], hull: &[usize], path: &[usize]) -> String {
    let frame = Frame::fit(points);
    let mut out = String::new();
    header(&mut out);
    let ring: Vec<(f64, f64)> = hull.iter().map(|&i| frame.map(points[i])).collect();
    polyline(
        &mut out,
        &ring,
        true,
        r##"fill="#eef3fb" stroke="#345" stroke-width="1""##,
    );
    if path.len() >= 2 {
        let line: Vec<(f64, f64)> = path.iter().map(|&i| frame.map(points[i])).collect();
        polyline(
            &mut out,
            &line,
            false,
            r##"fill="none" stroke="#c22" stroke-width="2""##,
        );
    }
    for &p in points {
        let (x, y) = frame.map(p);
        writeln!(
            out,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="2" fill="#222"/>"##
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}

/// Each cone as a wedge between its two unit rays, plus the segment from
/// `w` to `c` when given.
pub fn fan(cones: &[[(f64, f64); 2]], segment: Option<((f64, f64), (f64, f64))>) -> String {
    let frame = Frame::fit(&[(-1.1, -1.1), (1.1, 1.1)]);
    let mut out = String::new();
    header(&mut out);
    let origin = frame.map((0.0, 0.0));
    let palette = [
        "#dbe8f6", "#f6e3db", "#e1f0dc", "#efe0f3", "#f4f0d6", "#dcefef",
    ];
    for (i, [r1, r2]) in cones.iter().enumerate() {
        let mid = (r1.0 + r2.0, r1.1 + r2.1);
        let len = mid.0.hypot(mid.1).max(f64::EPSILON);
        let mid = (mid.0 / len, mid.1 / len);
        let wedge = [origin, frame.map(*r1), frame.map(mid), frame.map(*r2)];
        let style = format!(
            r##"fill="{}" stroke="#345" stroke-width="1""##,
            palette[i % palette.len()]
        );
        polyline(&mut out, &wedge, true, &style);
    }
    if let Some((w, c)) = segment {
        polyline(
            &mut out,
            &[frame.map(w), frame.map(c)],
            false,
            r##"fill="none" stroke="#c22" stroke-width="2""##,
        );
    }
    writeln!(out, "</svg>").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_is_deterministic_and_closed() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let a = shadow_polygon(&pts, &[0, 1, 2, 3], &[0, 1, 2]);
        assert_eq!(a, shadow_polygon(&pts, &[0, 1, 2, 3], &[0, 1, 2]));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<circle").count(), 4);
    }
}
