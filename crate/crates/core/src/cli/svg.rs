//! SVG pictures of geodesic families on 2-tori.
//!
//! The fundamental domain is the unit square in lattice coordinates, so
//! skewed lattices are drawn sheared. Each geodesic is a `<g>` holding one
//! polyline per wrapped piece; blockers are circles.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::blocking::BlockingSet;
use crate::error::{Error, Result};
use crate::lattice::{frac, to_f64, Rational, TorusPoint};
use crate::torus::GeodesicFamily;

pub const SIZE: f64 = 400.0;
pub const MARGIN: f64 = 20.0;

/// Pixel position of lattice coordinates in `[0, 1]^2`.
pub fn to_pixel(c: [f64; 2]) -> (f64, f64) {
    (MARGIN + SIZE * c[0], MARGIN + SIZE * (1.0 - c[1]))
}

/// Pieces of `offset + t·direction`, `t ∈ [0, 1]`, cut where a coordinate
/// crosses an integer, each shifted into the unit square.
fn wrapped_pieces(offset: &[Rational], direction: &[Rational]) -> Vec<[[f64; 2]; 2]> {
    let mut cuts: Vec<Rational> = vec![Rational::zero(), Rational::from_integer(1.into())];
    for (o, d) in offset.iter().zip(direction) {
        if d.is_zero() {
            continue;
        }
        let end = o + d;
        let (lo, hi) = if o < &end { (o.clone(), end) } else { (end, o.clone()) };
        let mut k = lo.floor() + Rational::from_integer(1.into());
        while k < hi {
            cuts.push((&k - o) / d);
            k += Rational::from_integer(1.into());
        }
    }
    cuts.sort();
    cuts.dedup();
    let half = Rational::new(1.into(), 2.into());
    cuts.windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) * &half;
            let at = |t: &Rational| -> Vec<Rational> {
                offset.iter().zip(direction).map(|(o, d)| o + d * t).collect()
            };
            let m = at(&mid);
            let shift: Vec<Rational> = m.iter().map(|c| c - frac(c)).collect();
            let a = at(&w[0]);
            let b = at(&w[1]);
            let p = |v: &[Rational]| [to_f64(&(&v[0] - &shift[0])), to_f64(&(&v[1] - &shift[1]))];
            [p(&a), p(&b)]
        })
        .collect()
}

pub fn render_torus_svg(
    family: &GeodesicFamily,
    blocking: Option<&BlockingSet<TorusPoint>>,
) -> Result<String> {
    let lattice = family.config.lattice();
    if lattice.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: lattice.dim(),
        });
    }
    let total = SIZE + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect class="domain" x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
    );
    for (i, g) in family.geodesics.iter().enumerate() {
        let offset = lattice.to_lattice_coords(&g.base);
        let direction = lattice.to_lattice_coords(&g.displacement);
        let _ = writeln!(out, r#"<g class="geodesic" data-index="{i}" stroke="steelblue" fill="none">"#);
        for [a, b] in wrapped_pieces(&offset, &direction) {
            let (x1, y1) = to_pixel(a);
            let (x2, y2) = to_pixel(b);
            let _ = writeln!(out, r#"<polyline points="{x1:.3},{y1:.3} {x2:.3},{y2:.3}"/>"#);
        }
        let _ = writeln!(out, "</g>");
    }
    for p in [family.config.x(), family.config.y()] {
        let c = p.lattice_coords();
        let (x, y) = to_pixel([to_f64(&c[0]), to_f64(&c[1])]);
        let _ = writeln!(out, r#"<circle class="endpoint" cx="{x:.3}" cy="{y:.3}" r="3" fill="black"/>"#);
    }
    if let Some(b) = blocking {
        for p in b.points() {
            let c = p.lattice_coords();
            let (x, y) = to_pixel([to_f64(&c[0]), to_f64(&c[1])]);
            let _ = writeln!(out, r#"<circle class="blocker" cx="{x:.3}" cy="{y:.3}" r="4" fill="crimson"/>"#);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
