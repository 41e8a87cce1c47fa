//! Static SVG of a drop boundary with the unit circle for reference.

use std::fmt::Write;

use dropwave_core::{to_grid, LatticeCoeffs};
use num_complex::Complex64;

use crate::error::Result;

const SIZE_PX: f64 = 480.0;
const MARGIN: f64 = 0.05;

/// Boundary samples `Z(e^{i alpha_j})`, `j = 0..grid`.
pub fn boundary(z: &LatticeCoeffs, grid: usize) -> Result<Vec<Complex64>> {
    Ok(to_grid(z, grid)?.into_values())
}

/// SVG document for the closed curve through `points`. The y axis is flipped
/// so that the picture has the usual orientation. Numbers are printed with a
/// fixed precision, so equal input gives identical bytes.
pub fn svg(points: &[Complex64], title: &str) -> String {
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
    for p in points {
        lo_x = lo_x.min(p.re);
        hi_x = hi_x.max(p.re);
        lo_y = lo_y.min(-p.im);
        hi_y = hi_y.max(-p.im);
    }
    let (w, h) = (hi_x - lo_x, hi_y - lo_y);
    let pad = MARGIN * w.max(h);
    let (x0, y0, vw, vh) = (lo_x - pad, lo_y - pad, w + 2.0 * pad, h + 2.0 * pad);
    let stroke = 0.004 * vw.max(vh);

    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{:.6},{:.6} ", p.re, -p.im + 0.0);
    }
    d.push('Z');

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE_PX}" height="{:.0}" viewBox="{x0:.6} {y0:.6} {vw:.6} {vh:.6}">"#,
        SIZE_PX * vh / vw
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        r##"  <circle cx="0" cy="0" r="1" fill="none" stroke="#999999" stroke-width="{stroke:.6}" stroke-dasharray="{:.6}"/>"##,
        4.0 * stroke
    );
    let _ = writeln!(
        out,
        r##"  <path d="{d}" fill="#cfe3f7" fill-opacity="0.6" stroke="#1f4e79" stroke-width="{stroke:.6}"/>"##
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Vertex coordinates of the first path in an SVG produced by [`svg`], in
/// drawing coordinates (y already flipped back).
pub fn path_vertices(svg: &str) -> Vec<(f64, f64)> {
    let Some(start) = svg.find("<path d=\"") else {
        return Vec::new();
    };
    let body = &svg[start + 9..];
    let body = &body[..body.find('"').unwrap_or(body.len())];
    body.split_whitespace()
        .filter_map(|tok| {
            let tok = tok.trim_start_matches(['M', 'L']);
            let (x, y) = tok.split_once(',')?;
            Some((x.parse().ok()?, -y.parse::<f64>().ok()?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_renders_as_regular_polygon() {
        let z = LatticeCoeffs::identity(2, 4).unwrap();
        let pts = boundary(&z, 64).unwrap();
        let doc = svg(&pts, "circle");
        let v = path_vertices(&doc);
        assert_eq!(v.len(), 64);
        for (x, y) in v {
            assert!(((x * x + y * y).sqrt() - 1.0).abs() < 1e-5);
        }
        assert!(doc.contains(r#"viewBox="-1.100000 -1.100000 2.200000 2.200000""#));
        assert_eq!(doc, svg(&pts, "circle"));
    }

    #[test]
    fn titles_are_escaped() {
        assert!(svg(&[Complex64::new(1.0, 0.0)], "a<b&c").contains("a&lt;b&amp;c"));
    }
}
