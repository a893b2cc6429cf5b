//! Real linking number: Gauss double integral, signed planar crossings of
//! polylines, and the closed form for a pair of skew lines.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{cross, det3, norm3, pair, scale3, sub3, CurveKind, ParamCurve, Vec3};
use crate::quadrature::{integrate_product_with, Domain, ProductIntegrand, ProductOptions, QuadConfig, QuadResult};

/// Default projection direction before normalization.
pub const DEFAULT_DIRECTION: Vec3 = [0.123, 0.456, 1.0];

/// Closed polygon; the last vertex connects back to the first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline3 {
    vertices: Vec<Vec3>,
}

impl Polyline3 {
    pub fn new(vertices: Vec<Vec3>) -> Result<Self> {
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::invariant(
                    "Polyline3.vertices",
                    format!("consecutive vertices {i} and {} coincide", (i + 1) % n),
                ));
            }
        }
        let mut distinct: Vec<&Vec3> = Vec::new();
        for v in &vertices {
            if !distinct.contains(&v) {
                distinct.push(v);
            }
            if distinct.len() >= 3 {
                return Ok(Polyline3 { vertices });
            }
        }
        Err(Error::invariant("Polyline3.vertices", "fewer than 3 distinct vertices"))
    }

    /// `n` vertices sampled at t = k/n along a closed curve.
    pub fn from_curve(curve: &ParamCurve, n: usize) -> Result<Self> {
        if curve.kind != CurveKind::RealClosed {
            return Err(Error::DegenerateConfiguration(
                "polylines need a closed real curve".into(),
            ));
        }
        Polyline3::new(curve.polyline_vertices(n))
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn reversed(&self) -> Polyline3 {
        let mut v = self.vertices.clone();
        v.reverse();
        Polyline3 { vertices: v }
    }

    fn segment(&self, i: usize) -> (Vec3, Vec3) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }
}

/// (1/4π)·det(x−y, dx, dy)/|x−y|³
pub fn gauss_integrand(x: &Vec3, dx: &Vec3, y: &Vec3, dy: &Vec3) -> Result<f64> {
    let r = sub3(x, y);
    let d = norm3(&r);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(det3(&r, dx, dy) / (4.0 * PI * d * d * d))
}

/// Gauss kernel pulled back to the parameters of two real curves.
pub struct GaussKernel<'a> {
    pub c1: &'a ParamCurve,
    pub c2: &'a ParamCurve,
}

impl ProductIntegrand for GaussKernel<'_> {
    fn eval(&self, a: Complex64, b: Complex64) -> Complex64 {
        let (x, dx) = self.c1.point_real(a.re);
        let (y, dy) = self.c2.point_real(b.re);
        let r = sub3(&x, &y);
        let d = norm3(&r);
        Complex64::new(det3(&r, &dx, &dy) / (4.0 * PI * d * d * d), 0.0)
    }

    fn distance(&self, a: Complex64, b: Complex64) -> Option<f64> {
        let (x, _) = self.c1.point_real(a.re);
        let (y, _) = self.c2.point_real(b.re);
        Some(norm3(&sub3(&x, &y)))
    }
}

/// Gauss double integral over two closed curves, or two truncated real
/// lines (tail ~ 1/R, Richardson order 1).
pub fn gauss_linking(c1: &ParamCurve, c2: &ParamCurve, cfg: &QuadConfig) -> Result<QuadResult> {
    let kinds = (c1.kind, c2.kind);
    if !matches!(
        kinds,
        (CurveKind::RealClosed, CurveKind::RealClosed) | (CurveKind::RealOpen, CurveKind::RealOpen)
    ) {
        return Err(Error::DegenerateConfiguration(format!(
            "Gauss linking needs two closed real curves or two real lines, got {kinds:?}"
        )));
    }
    integrate_product_with(
        &GaussKernel { c1, c2 },
        &Domain::of_curve(c1),
        &Domain::of_curve(c2),
        cfg,
        ProductOptions { tail_order: 1 },
    )
}

fn unit(v: &Vec3) -> Vec3 {
    scale3(1.0 / norm3(v), v)
}

/// Orthonormal (p, q) with (p, q, d) right-handed.
fn projection_basis(d: &Vec3) -> (Vec3, Vec3) {
    let k = (0..3).min_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs())).unwrap();
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let p = unit(&cross(&e, d));
    (p, cross(d, &p))
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Linking number as half the signed count of crossings of the projections
/// along `direction`; each crossing contributes
/// sgn((x−y)·d)·sgn(det(d, t₁, t₂)).
pub fn crossing_linking(p1: &Polyline3, p2: &Polyline3, direction: &Vec3) -> Result<i64> {
    let len = norm3(direction);
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::DegenerateProjection { direction: *direction });
    }
    let d = unit(direction);
    let (p, q) = projection_basis(&d);
    let proj = |x: &Vec3| [pair(x, &p), pair(x, &q)];
    let degenerate = || Error::DegenerateProjection { direction: *direction };
    let n1 = p1.vertices.len();
    let n2 = p2.vertices.len();

    let per_segment: Vec<Result<i64>> = (0..n1)
        .into_par_iter()
        .map(|i| {
            let (a0, a1) = p1.segment(i);
            let (pa0, pa1) = (proj(&a0), proj(&a1));
            let ra = [pa1[0] - pa0[0], pa1[1] - pa0[1]];
            let la = (ra[0] * ra[0] + ra[1] * ra[1]).sqrt();
            let mut sum = 0i64;
            for j in 0..n2 {
                let (b0, b1) = p2.segment(j);
                let (pb0, pb1) = (proj(&b0), proj(&b1));
                let rb = [pb1[0] - pb0[0], pb1[1] - pb0[1]];
                let lb = (rb[0] * rb[0] + rb[1] * rb[1]).sqrt();
                let overlap = (0..2)
                    .all(|k| pa0[k].min(pa1[k]) <= pb0[k].max(pb1[k]) && pb0[k].min(pb1[k]) <= pa0[k].max(pa1[k]));
                if !overlap {
                    continue;
                }
                let den = cross2(ra, rb);
                let w = [pb0[0] - pa0[0], pb0[1] - pa0[1]];
                if la == 0.0 || lb == 0.0 {
                    // a segment seen end-on touching the other projection
                    return Err(degenerate());
                }
                if den.abs() <= 1e-12 * la * lb {
                    // parallel: degenerate only if the supporting lines coincide
                    if cross2(ra, w).abs() <= 1e-12 * la * (w[0].hypot(w[1]) + la) {
                        return Err(degenerate());
                    }
                    continue;
                }
                let s = cross2(w, rb) / den;
                let t = cross2(w, ra) / den;
                const EDGE: f64 = 1e-9;
                if s < -EDGE || s > 1.0 + EDGE || t < -EDGE || t > 1.0 + EDGE {
                    continue;
                }
                if s.abs() <= EDGE || (1.0 - s).abs() <= EDGE || t.abs() <= EDGE || (1.0 - t).abs() <= EDGE {
                    return Err(degenerate());
                }
                let ta = sub3(&a1, &a0);
                let tb = sub3(&b1, &b0);
                let x = [a0[0] + s * ta[0], a0[1] + s * ta[1], a0[2] + s * ta[2]];
                let y = [b0[0] + t * tb[0], b0[1] + t * tb[1], b0[2] + t * tb[2]];
                let depth = pair(&sub3(&x, &y), &d);
                if depth.abs() <= 1e-12 * (norm3(&ta) + norm3(&tb)) {
                    return Err(Error::DegenerateConfiguration("polylines intersect".into()));
                }
                let orient = det3(&d, &ta, &tb);
                sum += (depth.signum() * orient.signum()) as i64;
            }
            Ok(sum)
        })
        .collect();
    let mut total = 0i64;
    for r in per_segment {
        total += r?;
    }
    if total % 2 != 0 {
        return Err(degenerate());
    }
    Ok(total / 2)
}

/// `crossing_linking` along the default direction, retried along
/// deterministic perturbations (seeded) on `DegenerateProjection`.
pub fn crossing_linking_auto(p1: &Polyline3, p2: &Polyline3, seed: u64) -> Result<(i64, Vec3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dir = unit(&DEFAULT_DIRECTION);
    let mut last = None;
    for _ in 0..16 {
        match crossing_linking(p1, p2, &dir) {
            Ok(v) => return Ok((v, dir)),
            Err(e @ Error::DegenerateProjection { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        let base = unit(&DEFAULT_DIRECTION);
        let jitter: Vec3 = std::array::from_fn(|_| rng.gen_range(-0.05..0.05));
        dir = unit(&[base[0] + jitter[0], base[1] + jitter[1], base[2] + jitter[2]]);
    }
    Err(last.expect("at least one attempt"))
}

/// ½·sign(det(e₁, e₂, e₃)).
pub fn line_gauss_closed(e1: &Vec3, e2: &Vec3, e3: &Vec3) -> Result<f64> {
    let d = det3(e1, e2, e3);
    if d.abs() <= 1e-14 * norm3(e1) * norm3(e2) * norm3(e3) || !d.is_finite() {
        return Err(Error::DegenerateConfiguration(
            "det(e1, e2, e3) = 0: the lines intersect or are parallel".into(),
        ));
    }
    Ok(0.5 * d.signum())
}

/// (e₁, e₂, e₃) for two real lines: their directions and the vector from a
/// point of the second line to a point of the first.
pub fn line_vectors(c1: &ParamCurve, c2: &ParamCurve) -> Result<(Vec3, Vec3, Vec3)> {
    let real = |c: &ParamCurve| c.kind == CurveKind::RealOpen;
    match (c1.line_data(), c2.line_data()) {
        (Some((x0, e1)), Some((y0, e2))) if real(c1) && real(c2) => Ok((
            e1.map(|c| c.re),
            e2.map(|c| c.re),
            std::array::from_fn(|k| x0[k].re - y0[k].re),
        )),
        _ => Err(Error::DegenerateConfiguration(
            "closed form needs two real lines".into(),
        )),
    }
}
