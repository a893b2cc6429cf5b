//! Maps from unit boxes onto parameter domains, with Jacobians.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Up to two parameter points (the folded chart yields a symmetric pair).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Mapped {
    pub pts: [(Complex64, f64); 2],
    pub n: usize,
}

impl Mapped {
    fn one(p: Complex64, jac: f64) -> Self {
        Mapped {
            pts: [(p, jac), (p, 0.0)],
            n: 1,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Complex64, f64)> {
        self.pts[..self.n].iter()
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Side {
    Re(f64),
    Im(f64),
}

#[derive(Clone, Debug)]
pub(crate) enum Chart {
    Point,
    Interval {
        a: f64,
        b: f64,
    },
    Rect {
        re: [f64; 2],
        im: [f64; 2],
    },
    /// u = center + R·x·e^{2πiy}
    Polar {
        center: Complex64,
        radius: f64,
    },
    /// Rays from `a` between radius ε and the boundary circle |u − center| = R.
    PuncturedDisk {
        a: Complex64,
        eps: f64,
        center: Complex64,
        radius: f64,
    },
    /// Rays from `a` between ε and a single rectangle side, φ ∈ [φ₀, φ₁].
    PuncturedSector {
        a: Complex64,
        eps: f64,
        phi: [f64; 2],
        side: Side,
    },
    /// Symmetric pair p ± r for r ∈ [ε, reach].
    Folded {
        p: f64,
        eps: f64,
        reach: f64,
    },
}

impl Chart {
    pub fn dim(&self) -> usize {
        match self {
            Chart::Point => 0,
            Chart::Interval { .. } | Chart::Folded { .. } => 1,
            _ => 2,
        }
    }

    pub fn map(&self, x: &[f64]) -> Mapped {
        match *self {
            Chart::Point => Mapped::one(Complex64::new(0.0, 0.0), 1.0),
            Chart::Interval { a, b } => Mapped::one(Complex64::new(a + (b - a) * x[0], 0.0), b - a),
            Chart::Rect { re, im } => Mapped::one(
                Complex64::new(re[0] + (re[1] - re[0]) * x[0], im[0] + (im[1] - im[0]) * x[1]),
                (re[1] - re[0]) * (im[1] - im[0]),
            ),
            Chart::Polar { center, radius } => {
                // r = R·x² grades panels toward the centre
                let r = radius * x[0] * x[0];
                Mapped::one(
                    center + Complex64::from_polar(r, TAU * x[1]),
                    TAU * r * 2.0 * radius * x[0],
                )
            }
            Chart::PuncturedDisk { a, eps, center, radius } => {
                let dir = Complex64::from_polar(1.0, TAU * x[1]);
                let d = a - center;
                let b = (d * dir.conj()).re;
                let r_max = -b + (b * b + radius * radius - d.norm_sqr()).sqrt();
                if eps == 0.0 {
                    let r = r_max * x[0] * x[0];
                    return Mapped::one(a + dir * r, r * 2.0 * r_max * x[0] * TAU);
                }
                let r = eps + x[0] * (r_max - eps);
                Mapped::one(a + dir * r, r * (r_max - eps) * TAU)
            }
            Chart::PuncturedSector { a, eps, phi, side } => {
                let angle = phi[0] + x[1] * (phi[1] - phi[0]);
                let dir = Complex64::from_polar(1.0, angle);
                let r_max = match side {
                    Side::Re(v) => (v - a.re) / dir.re,
                    Side::Im(v) => (v - a.im) / dir.im,
                };
                let r = eps + x[0] * (r_max - eps);
                Mapped::one(a + dir * r, r * (r_max - eps) * (phi[1] - phi[0]))
            }
            Chart::Folded { p, eps, reach } => {
                let r = eps + x[0] * (reach - eps);
                let jac = reach - eps;
                Mapped {
                    pts: [(Complex64::new(p + r, 0.0), jac), (Complex64::new(p - r, 0.0), jac)],
                    n: 2,
                }
            }
        }
    }
}

/// Partition-of-unity weight singling out puncture `k`:
/// w_k = Π_{j≠k}|u−a_j|² / Σ_m Π_{j≠m}|u−a_j|².
#[derive(Clone, Debug)]
pub(crate) struct Weight {
    pub k: usize,
    pub punctures: Arc<Vec<Complex64>>,
}

impl Weight {
    pub fn at(&self, u: Complex64) -> f64 {
        let d: Vec<f64> = self.punctures.iter().map(|a| (u - a).norm_sqr()).collect();
        let prod_except = |m: usize| {
            d.iter()
                .enumerate()
                .filter(|&(j, _)| j != m)
                .map(|(_, v)| v)
                .product::<f64>()
        };
        let num = prod_except(self.k);
        let den: f64 = (0..d.len()).map(prod_except).sum();
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub chart: Chart,
    pub weight: Option<Weight>,
}

impl Piece {
    fn plain(chart: Chart) -> Self {
        Piece { chart, weight: None }
    }
}

/// Base (unpunctured) shapes a domain resolves to once radii are fixed.
#[derive(Clone, Debug)]
pub(crate) enum Shape {
    Point,
    Interval { a: f64, b: f64 },
    Rect { re: [f64; 2], im: [f64; 2] },
    Disk { center: Complex64, radius: f64 },
}

impl Shape {
    pub fn base_chart(&self) -> Chart {
        match *self {
            Shape::Point => Chart::Point,
            Shape::Interval { a, b } => Chart::Interval { a, b },
            Shape::Rect { re, im } => Chart::Rect { re, im },
            Shape::Disk { center, radius } => Chart::Polar { center, radius },
        }
    }

    /// Distance from `p` to the boundary; negative outside.
    fn inset(&self, p: Complex64) -> f64 {
        match *self {
            Shape::Point => -1.0,
            Shape::Interval { a, b } => {
                if p.im != 0.0 {
                    -1.0
                } else {
                    (p.re - a).min(b - p.re)
                }
            }
            Shape::Rect { re, im } => (p.re - re[0]).min(re[1] - p.re).min(p.im - im[0]).min(im[1] - p.im),
            Shape::Disk { center, radius } => radius - (p - center).norm(),
        }
    }

    /// Charts covering the whole shape, polar about `p` (disks) or split at
    /// `p` (intervals).
    pub fn focused(&self, p: Complex64) -> Vec<Piece> {
        match *self {
            Shape::Disk { center, radius } if self.inset(p) > 1e-9 * radius => {
                vec![Piece::plain(Chart::PuncturedDisk {
                    a: p,
                    eps: 0.0,
                    center,
                    radius,
                })]
            }
            Shape::Interval { a, b } if self.inset(p) > 1e-9 * (b - a) => vec![
                Piece::plain(Chart::Interval { a, b: p.re }),
                Piece::plain(Chart::Interval { a: p.re, b }),
            ],
            _ => vec![Piece::plain(self.base_chart())],
        }
    }

    /// The shape minus ε-neighbourhoods of `punctures`, as weighted pieces.
    pub fn pieces(&self, punctures: &[Complex64], eps: Option<f64>) -> Result<Vec<Piece>> {
        let eps = match eps {
            Some(e) if !punctures.is_empty() => e,
            _ => return Ok(vec![Piece::plain(self.base_chart())]),
        };
        for p in punctures {
            let inset = self.inset(*p);
            if !(inset > eps) {
                return Err(Error::InvalidConfig(format!(
                    "exclusion radius {eps} does not fit around puncture {p} (distance to boundary {inset})"
                )));
            }
        }
        let shared = Arc::new(punctures.to_vec());
        let weight = |k| {
            (punctures.len() > 1).then(|| Weight {
                k,
                punctures: shared.clone(),
            })
        };
        let mut out = Vec::new();
        for (k, &a) in punctures.iter().enumerate() {
            match *self {
                Shape::Point => unreachable!("points have no interior"),
                Shape::Interval { a: lo, b: hi } => {
                    let p = a.re;
                    let reach = (p - lo).min(hi - p);
                    out.push(Piece {
                        chart: Chart::Folded { p, eps, reach },
                        weight: weight(k),
                    });
                    let rest = if p - lo > hi - p {
                        (lo, p - reach)
                    } else {
                        (p + reach, hi)
                    };
                    if rest.1 - rest.0 > 1e-15 * (hi - lo) {
                        out.push(Piece {
                            chart: Chart::Interval { a: rest.0, b: rest.1 },
                            weight: weight(k),
                        });
                    }
                }
                Shape::Disk { center, radius } => out.push(Piece {
                    chart: Chart::PuncturedDisk { a, eps, center, radius },
                    weight: weight(k),
                }),
                Shape::Rect { re, im } => {
                    let ang = |x: f64, y: f64| (y - a.im).atan2(x - a.re);
                    let br = ang(re[1], im[0]);
                    let tr = ang(re[1], im[1]);
                    let tl = ang(re[0], im[1]);
                    let bl = ang(re[0], im[0]) + TAU;
                    let sectors = [
                        ([br, tr], Side::Re(re[1])),
                        ([tr, tl], Side::Im(im[1])),
                        ([tl, bl], Side::Re(re[0])),
                        ([bl, br + TAU], Side::Im(im[0])),
                    ];
                    debug_assert!(br < 0.0 && tr > 0.0 && tl < PI + 1e-12);
                    for (phi, side) in sectors {
                        out.push(Piece {
                            chart: Chart::PuncturedSector { a, eps, phi, side },
                            weight: weight(k),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}
