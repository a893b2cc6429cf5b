use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{CVec3, Vec3};
use crate::error::{Error, Result};
use crate::poly::Poly;

const CLOSURE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// Closed loop t ∈ [0,1) → R³.
    RealClosed,
    /// Real line or arc s ∈ [−R, R] → R³, truncated like a complex line.
    RealOpen,
    /// Complex parameter u → C³ with polynomial components.
    ComplexAffine,
}

impl CurveKind {
    pub fn is_real(self) -> bool {
        !matches!(self, CurveKind::ComplexAffine)
    }
}

/// One term `cos·cos(2πkt) + sin·sin(2πkt)` of a real Fourier series.
#[derive(Clone, Debug, PartialEq)]
pub struct Harmonic {
    pub k: u32,
    pub cos: Vec3,
    pub sin: Vec3,
}

/// Closed real curve as a finite trigonometric series.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    pub constant: Vec3,
    pub harmonics: Vec<Harmonic>,
}

impl FourierSeries {
    /// Exact coefficients of a trigonometric polynomial of degree ≤ `max_k`
    /// from `2·max_k + 1` or more equispaced samples. Tiny coefficients are
    /// dropped.
    pub fn from_fn(f: impl Fn(f64) -> Vec3, max_k: u32) -> FourierSeries {
        let n = 2 * max_k as usize + 2;
        let samples: Vec<Vec3> = (0..n).map(|j| f(j as f64 / n as f64)).collect();
        let mut constant = [0.0; 3];
        for s in &samples {
            for d in 0..3 {
                constant[d] += s[d] / n as f64;
            }
        }
        let scale = samples
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1.0);
        let mut harmonics = Vec::new();
        for k in 1..=max_k {
            let mut cos = [0.0; 3];
            let mut sin = [0.0; 3];
            for (j, s) in samples.iter().enumerate() {
                let a = TAU * (k as usize * j) as f64 / n as f64;
                for d in 0..3 {
                    cos[d] += 2.0 * s[d] * a.cos() / n as f64;
                    sin[d] += 2.0 * s[d] * a.sin() / n as f64;
                }
            }
            for v in cos.iter_mut().chain(sin.iter_mut()) {
                if v.abs() < 1e-14 * scale {
                    *v = 0.0;
                }
            }
            if cos.iter().chain(sin.iter()).any(|&v| v != 0.0) {
                harmonics.push(Harmonic { k, cos, sin });
            }
        }
        FourierSeries { constant, harmonics }
    }

    pub fn eval(&self, t: f64) -> (Vec3, Vec3) {
        let mut x = self.constant;
        let mut v = [0.0; 3];
        for h in &self.harmonics {
            let w = TAU * h.k as f64;
            let (s, c) = (w * t).sin_cos();
            for d in 0..3 {
                x[d] += h.cos[d] * c + h.sin[d] * s;
                v[d] += w * (h.sin[d] * c - h.cos[d] * s);
            }
        }
        (x, v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CurveMap {
    Polynomial([Poly; 3]),
    Fourier(FourierSeries),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamDomain {
    /// [0, 1] for closed curves.
    UnitInterval,
    /// Disk |u| ≤ R (or interval |s| ≤ R for real curves). `None` defers R
    /// to the quadrature configuration.
    Truncated { radius: Option<f64> },
    /// Axis-aligned rectangle in the complex parameter plane.
    Rect { re: [f64; 2], im: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamCurve {
    pub kind: CurveKind,
    pub map: CurveMap,
    pub domain: ParamDomain,
    pub marked_points: Vec<Complex64>,
}

impl ParamCurve {
    /// Closed curve given by a trigonometric series.
    pub fn fourier(series: FourierSeries) -> Self {
        ParamCurve {
            kind: CurveKind::RealClosed,
            map: CurveMap::Fourier(series),
            domain: ParamDomain::UnitInterval,
            marked_points: Vec::new(),
        }
    }

    /// `s ↦ point + s·dir`, s real.
    pub fn real_line(point: Vec3, dir: Vec3) -> Self {
        ParamCurve {
            kind: CurveKind::RealOpen,
            map: CurveMap::Polynomial(std::array::from_fn(|k| Poly::from_real(&[point[k], dir[k]]))),
            domain: ParamDomain::Truncated { radius: None },
            marked_points: Vec::new(),
        }
    }

    /// `u ↦ point + u·dir`, u complex.
    pub fn complex_line(point: CVec3, dir: CVec3) -> Self {
        ParamCurve {
            kind: CurveKind::ComplexAffine,
            map: CurveMap::Polynomial(std::array::from_fn(|k| Poly::linear(point[k], dir[k]))),
            domain: ParamDomain::Truncated { radius: None },
            marked_points: Vec::new(),
        }
    }

    pub fn with_domain(mut self, domain: ParamDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_marked_points(mut self, marked: Vec<Complex64>) -> Self {
        self.marked_points = marked;
        self
    }

    pub fn components(&self) -> Option<&[Poly; 3]> {
        match &self.map {
            CurveMap::Polynomial(p) => Some(p),
            CurveMap::Fourier(_) => None,
        }
    }

    /// `(point, direction)` when every component has degree ≤ 1.
    pub fn line_data(&self) -> Option<(CVec3, CVec3)> {
        let comps = self.components()?;
        if comps.iter().any(|p| p.degree().unwrap_or(0) > 1) {
            return None;
        }
        let point = std::array::from_fn(|k| comps[k].coeff(0));
        let dir: CVec3 = std::array::from_fn(|k| comps[k].coeff(1));
        if dir.iter().all(|c| c.norm() == 0.0) {
            return None;
        }
        Some((point, dir))
    }

    /// Truncation radius, falling back to `default` when the scene leaves it open.
    pub fn radius(&self, default: f64) -> Option<f64> {
        match self.domain {
            ParamDomain::Truncated { radius } => Some(radius.unwrap_or(default)),
            _ => None,
        }
    }

    /// Position and velocity without domain checks.
    pub fn point(&self, param: Complex64) -> (CVec3, CVec3) {
        match &self.map {
            CurveMap::Polynomial(comps) => {
                let mut x = [Complex64::new(0.0, 0.0); 3];
                let mut v = x;
                for k in 0..3 {
                    (x[k], v[k]) = comps[k].eval_with_derivative(param);
                }
                (x, v)
            }
            CurveMap::Fourier(series) => {
                let (x, v) = series.eval(param.re);
                (super::complexify(&x), super::complexify(&v))
            }
        }
    }

    /// Position and velocity of a real curve without domain checks.
    pub fn point_real(&self, t: f64) -> (Vec3, Vec3) {
        match &self.map {
            CurveMap::Fourier(series) => series.eval(t),
            CurveMap::Polynomial(_) => {
                let (x, v) = self.point(Complex64::new(t, 0.0));
                (x.map(|c| c.re), v.map(|c| c.re))
            }
        }
    }

    /// Checked evaluation: position and exact velocity at `param`.
    pub fn evaluate(&self, param: Complex64) -> Result<(CVec3, CVec3)> {
        if !self.contains(param) {
            return Err(Error::ParamOutOfDomain { param });
        }
        if self
            .marked_points
            .iter()
            .any(|m| (param - m).norm() <= 1e-14 * (1.0 + m.norm()))
        {
            return Err(Error::ParamAtPuncture { param });
        }
        Ok(self.point(param))
    }

    pub fn evaluate_real(&self, t: f64) -> Result<(Vec3, Vec3)> {
        let (x, v) = self.evaluate(Complex64::new(t, 0.0))?;
        Ok((x.map(|c| c.re), v.map(|c| c.re)))
    }

    fn contains(&self, p: Complex64) -> bool {
        if !p.is_finite() || (self.kind.is_real() && p.im != 0.0) {
            return false;
        }
        match &self.domain {
            ParamDomain::UnitInterval => (0.0..=1.0).contains(&p.re),
            ParamDomain::Truncated { radius: None } => true,
            ParamDomain::Truncated { radius: Some(r) } => p.norm() <= *r,
            ParamDomain::Rect { re, im } => (re[0]..=re[1]).contains(&p.re) && (im[0]..=im[1]).contains(&p.im),
        }
    }

    fn strictly_inside(&self, p: Complex64) -> bool {
        if !p.is_finite() || (self.kind.is_real() && p.im != 0.0) {
            return false;
        }
        match &self.domain {
            ParamDomain::UnitInterval => p.re > 0.0 && p.re < 1.0,
            ParamDomain::Truncated { radius: None } => true,
            ParamDomain::Truncated { radius: Some(r) } => p.norm() < *r,
            ParamDomain::Rect { re, im } => p.re > re[0] && p.re < re[1] && p.im > im[0] && p.im < im[1],
        }
    }

    /// Checks every type invariant, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        match (&self.kind, &self.domain) {
            (CurveKind::RealClosed, ParamDomain::UnitInterval) => {}
            (CurveKind::RealOpen, ParamDomain::Truncated { .. }) => {}
            (CurveKind::ComplexAffine, ParamDomain::Truncated { .. } | ParamDomain::Rect { .. }) => {}
            (kind, domain) => {
                return Err(Error::invariant(
                    "ParamCurve.domain",
                    format!("{kind:?} curves cannot use domain {domain:?}"),
                ))
            }
        }
        match &self.domain {
            ParamDomain::Truncated { radius: Some(r) } if !(*r > 0.0 && r.is_finite()) => {
                return Err(Error::invariant(
                    "ParamCurve.domain",
                    format!("radius {r} must be positive"),
                ));
            }
            ParamDomain::Rect { re, im } if !(re[0] < re[1] && im[0] < im[1]) => {
                return Err(Error::invariant(
                    "ParamCurve.domain",
                    "rectangle bounds must be increasing",
                ));
            }
            _ => {}
        }
        match &self.map {
            CurveMap::Polynomial(comps) => {
                if self.kind.is_real() && comps.iter().flat_map(|p| p.coeffs()).any(|c| c.im != 0.0) {
                    return Err(Error::invariant(
                        "ParamCurve.map",
                        "real curves need real polynomial coefficients",
                    ));
                }
                if comps.iter().all(|p| p.degree().unwrap_or(0) < 1) {
                    return Err(Error::invariant(
                        "ParamCurve.degree",
                        "polynomial degree must be >= 1 with non-zero velocity",
                    ));
                }
            }
            CurveMap::Fourier(series) => {
                if self.kind != CurveKind::RealClosed {
                    return Err(Error::invariant(
                        "ParamCurve.map",
                        "Fourier maps describe closed real curves",
                    ));
                }
                if series.harmonics.iter().all(|h| h.k == 0) {
                    return Err(Error::invariant("ParamCurve.degree", "closed curve is constant"));
                }
            }
        }
        if self.kind == CurveKind::RealClosed {
            let (a, _) = self.point_real(0.0);
            let (b, _) = self.point_real(1.0);
            let gap = super::norm3(&super::sub3(&a, &b));
            if gap > CLOSURE_TOL {
                return Err(Error::invariant(
                    "ParamCurve.closed",
                    format!("map(0) and map(1) differ by {gap:e}"),
                ));
            }
        }
        for (i, m) in self.marked_points.iter().enumerate() {
            if !self.strictly_inside(*m) {
                return Err(Error::invariant(
                    "ParamCurve.marked_points",
                    format!("marked point {m} is not strictly inside the domain"),
                ));
            }
            if self.marked_points[..i].contains(m) {
                return Err(Error::invariant(
                    "ParamCurve.marked_points",
                    format!("marked point {m} is repeated"),
                ));
            }
        }
        Ok(())
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> ParamCurve {
        let map = match &self.map {
            CurveMap::Fourier(series) => CurveMap::Fourier(FourierSeries {
                constant: series.constant,
                harmonics: series
                    .harmonics
                    .iter()
                    .map(|h| Harmonic {
                        k: h.k,
                        cos: h.cos,
                        sin: h.sin.map(|x| -x),
                    })
                    .collect(),
            }),
            CurveMap::Polynomial(comps) => CurveMap::Polynomial(comps.clone().map(|p| {
                Poly::new(
                    p.coeffs()
                        .iter()
                        .enumerate()
                        .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                        .collect(),
                )
            })),
        };
        let flip = |p: Complex64| match (&self.kind, &self.domain) {
            (CurveKind::RealClosed, _) => Complex64::new(1.0, 0.0) - p,
            _ => -p,
        };
        let domain = match &self.domain {
            ParamDomain::Rect { re, im } => ParamDomain::Rect {
                re: [-re[1], -re[0]],
                im: [-im[1], -im[0]],
            },
            d => d.clone(),
        };
        ParamCurve {
            kind: self.kind,
            map,
            domain,
            marked_points: self.marked_points.iter().map(|&m| flip(m)).collect(),
        }
    }

    /// Same curve shifted by `v` (imaginary parts ignored for real curves).
    pub fn translated(&self, v: CVec3) -> ParamCurve {
        let map = match &self.map {
            CurveMap::Fourier(series) => CurveMap::Fourier(FourierSeries {
                constant: std::array::from_fn(|k| series.constant[k] + v[k].re),
                harmonics: series.harmonics.clone(),
            }),
            CurveMap::Polynomial(comps) => CurveMap::Polynomial(std::array::from_fn(|k| {
                let shift = if self.kind.is_real() {
                    Complex64::new(v[k].re, 0.0)
                } else {
                    v[k]
                };
                &comps[k] + &Poly::constant(shift)
            })),
        };
        ParamCurve { map, ..self.clone() }
    }

    /// `n` vertices at t = k/n of a closed real curve.
    pub fn polyline_vertices(&self, n: usize) -> Vec<Vec3> {
        (0..n).map(|k| self.point_real(k as f64 / n as f64).0).collect()
    }
}
