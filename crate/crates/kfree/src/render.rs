//! Deterministic static rendering of point sets: SVG scatter plots (first
//! set as filled dots, second as open circles, origin marked with a
//! cross) and a minimal PGM raster.

use crate::error::{Error, Result};
use crate::ring::RingId;
use crate::sieve::{PointSet, VSpec};

#[derive(Clone, Copy, Debug)]
pub struct RenderOptions {
    /// Map eisenstein coordinates m + nρ to the triangular lattice.
    pub real_embedding: bool,
    /// Pixels per lattice unit.
    pub scale: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { real_embedding: false, scale: 8.0 }
    }
}

fn embed(ps: &PointSet, opts: &RenderOptions, x: i64, y: i64) -> (f64, f64) {
    if opts.real_embedding {
        if let VSpec::KfreeRing { ring: RingId::Eisenstein, .. } = ps.spec {
            // ρ = (−1 + i√3)/2
            return (x as f64 - y as f64 / 2.0, y as f64 * 3f64.sqrt() / 2.0);
        }
    }
    (x as f64, y as f64)
}

/// Renders one or two point sets to SVG. Both sets must be 2-dimensional.
pub fn render_svg(
    primary: &PointSet,
    secondary: Option<&PointSet>,
    opts: &RenderOptions,
) -> Result<String> {
    if primary.window.dim != 2 || secondary.is_some_and(|s| s.window.dim != 2) {
        return Err(Error::invalid("rendering needs 2-dimensional point sets"));
    }
    let r = primary
        .window
        .half_width
        .max(secondary.map(|s| s.window.half_width).unwrap_or(0)) as f64;
    let scale = opts.scale;
    let margin = 1.0;
    let canvas = (2.0 * (r + margin)) * scale;
    let px = |v: f64| (v + r + margin) * scale;
    let py = |v: f64| (r + margin - v) * scale;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{canvas:.0}\" height=\"{canvas:.0}\" \
         viewBox=\"0 0 {canvas:.0} {canvas:.0}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for p in primary.iter() {
        let (ex, ey) = embed(primary, opts, p.get(0), p.get(1));
        svg.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"black\"/>\n",
            px(ex),
            py(ey),
            0.30 * scale
        ));
    }
    if let Some(sec) = secondary {
        for p in sec.iter() {
            let (ex, ey) = embed(sec, opts, p.get(0), p.get(1));
            svg.push_str(&format!(
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"black\" \
                 stroke-width=\"{:.3}\"/>\n",
                px(ex),
                py(ey),
                0.45 * scale,
                0.08 * scale
            ));
        }
    }
    // origin cross
    let arm = 0.6 * scale;
    let (cx, cy) = (px(0.0), py(0.0));
    svg.push_str(&format!(
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\" stroke-width=\"{:.3}\"/>\n",
        cx - arm, cy, cx + arm, cy, 0.12 * scale
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\" stroke-width=\"{:.3}\"/>\n",
        cx, cy - arm, cx, cy + arm, 0.12 * scale
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders to a binary PGM (P5) raster, one pixel per lattice point:
/// primary black, secondary-only grey, origin mid-grey.
pub fn render_pgm(primary: &PointSet, secondary: Option<&PointSet>) -> Result<Vec<u8>> {
    if primary.window.dim != 2 || secondary.is_some_and(|s| s.window.dim != 2) {
        return Err(Error::invalid("rendering needs 2-dimensional point sets"));
    }
    let r = primary
        .window
        .half_width
        .max(secondary.map(|s| s.window.half_width).unwrap_or(0));
    let side = (2 * r + 1) as usize;
    let mut pixels = vec![255u8; side * side];
    let at = |x: i64, y: i64| ((r - y) as usize) * side + (x + r) as usize;
    if let Some(sec) = secondary {
        for p in sec.iter() {
            pixels[at(p.get(0), p.get(1))] = 128;
        }
    }
    for p in primary.iter() {
        pixels[at(p.get(0), p.get(1))] = 0;
    }
    if pixels[at(0, 0)] == 255 {
        pixels[at(0, 0)] = 192;
    }
    let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{sieve, BoxWindow};

    #[test]
    fn svg_is_deterministic_and_wellformed() {
        let vis = sieve(&VSpec::Visible { d: 2 }, &BoxWindow::new(2, 5).unwrap()).unwrap();
        let gau = sieve(
            &VSpec::KfreeRing { ring: RingId::Gauss, k: 2 },
            &BoxWindow::new(2, 5).unwrap(),
        )
        .unwrap();
        let a = render_svg(&vis, Some(&gau), &RenderOptions::default()).unwrap();
        let b = render_svg(&vis, Some(&gau), &RenderOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<line").count(), 2);
        assert_eq!(a.matches("fill=\"none\"").count(), gau.len());
    }

    #[test]
    fn empty_set_still_renders_origin() {
        // bfree with modulus 2 in a radius-1 box excludes everything but
        // the four odd-coordinate corners; shrink to the degenerate case
        let spec = VSpec::BfreeLattice { d: 2, moduli: vec![2, 3] };
        let ps = sieve(&spec, &BoxWindow::new(2, 1).unwrap()).unwrap();
        let svg = render_svg(&ps, None, &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<line").count(), 2);
    }

    #[test]
    fn pgm_header_and_size() {
        let vis = sieve(&VSpec::Visible { d: 2 }, &BoxWindow::new(2, 4).unwrap()).unwrap();
        let pgm = render_pgm(&vis, None).unwrap();
        assert!(pgm.starts_with(b"P5\n9 9\n255\n"));
        assert_eq!(pgm.len(), b"P5\n9 9\n255\n".len() + 81);
    }

    #[test]
    fn eisenstein_real_embedding_changes_coordinates() {
        let spec = VSpec::KfreeRing { ring: RingId::Eisenstein, k: 2 };
        let ps = sieve(&spec, &BoxWindow::new(2, 3).unwrap()).unwrap();
        let square = render_svg(&ps, None, &RenderOptions::default()).unwrap();
        let tri = render_svg(
            &ps,
            None,
            &RenderOptions { real_embedding: true, ..Default::default() },
        )
        .unwrap();
        assert_ne!(square, tri);
    }
}
