//! Adaptive, proximity-aware integration over one curve or a product of two
//! curve domains, with deterministic parallel reduction.

mod chart;
mod engine;
mod pv;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CurveKind, ParamCurve, ParamDomain};
use chart::{Piece, Shape};
use engine::{BoxIntegrand, Region};

pub use pv::Punctures;

/// Curve pairs closer than this make a linking query ill-posed.
pub const MIN_SEPARATION: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    /// Relative tolerance target.
    pub tol: f64,
    /// Maximum number of times a panel may be bisected.
    pub max_depth: u32,
    /// Gauss–Legendre points per panel per axis.
    pub panel_order: usize,
    /// R for truncated domains that do not fix their own radius.
    pub truncation_radius: f64,
    /// Decreasing exclusion radii for principal values.
    pub pv_epsilons: Vec<f64>,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: 1e-6,
            max_depth: 24,
            panel_order: 8,
            truncation_radius: 40.0,
            pv_epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            workers: None,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_depth > 40 {
            return Err(Error::InvalidConfig(format!("max_depth {} exceeds 40", self.max_depth)));
        }
        if !(4..=32).contains(&self.panel_order) {
            return Err(Error::InvalidConfig(format!(
                "panel_order {} outside [4, 32]",
                self.panel_order
            )));
        }
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return Err(Error::InvalidConfig("truncation_radius must be positive".into()));
        }
        if self.pv_epsilons.is_empty()
            || self.pv_epsilons.iter().any(|&e| !(e > 0.0))
            || self.pv_epsilons.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidConfig(
                "pv_epsilons must be positive and strictly decreasing".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(())
    }

    fn with_tol(&self, tol: f64) -> QuadConfig {
        QuadConfig { tol, ..self.clone() }
    }
}

/// Values at R and 2R behind a tail-extrapolated result.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub radius: f64,
    pub at_radius: Complex64,
    pub at_double: Complex64,
}

/// The ε-sequence behind a principal value.
#[derive(Clone, Debug, PartialEq)]
pub struct PvInfo {
    pub epsilons: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Extrapolants to ε = 0 using the last 1, 2, … values.
    pub extrapolants: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub panels_evaluated: usize,
    /// |value(2R) − value(R)| on truncated domains, else 0.
    pub tail_estimate: f64,
    pub converged: bool,
    pub truncation: Option<Truncation>,
    pub pv: Option<PvInfo>,
}

impl QuadResult {
    /// Turns a non-converged result into `MaxDepthExceeded`.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::MaxDepthExceeded {
                err_estimate: self.err_estimate,
            })
        }
    }

    /// Multiplies value and error estimates by `s`.
    pub fn scaled(mut self, s: Complex64) -> Self {
        self.value *= s;
        self.err_estimate *= s.norm();
        self.tail_estimate *= s.norm();
        if let Some(t) = &mut self.truncation {
            t.at_radius *= s;
            t.at_double *= s;
        }
        if let Some(p) = &mut self.pv {
            p.values
                .iter_mut()
                .chain(p.extrapolants.iter_mut())
                .for_each(|v| *v *= s);
        }
        self
    }
}

/// Parameter domain of one factor of an integral.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// A single point: turns a product into a single integral.
    Point,
    /// Real interval [a, b].
    Interval { a: f64, b: f64 },
    /// Rectangle in the complex parameter plane.
    Rect { re: [f64; 2], im: [f64; 2] },
    /// Closed disk in the complex parameter plane.
    Disk { center: Complex64, radius: f64 },
    /// [−R, R]; `None` takes R from the configuration. Tail-extrapolated.
    TruncatedLine { radius: Option<f64> },
    /// |u| ≤ R; `None` takes R from the configuration. Tail-extrapolated.
    TruncatedPlane { radius: Option<f64> },
}

impl Domain {
    pub fn of_curve(curve: &ParamCurve) -> Domain {
        match (&curve.kind, &curve.domain) {
            (_, ParamDomain::UnitInterval) => Domain::Interval { a: 0.0, b: 1.0 },
            (CurveKind::ComplexAffine, ParamDomain::Truncated { radius }) => Domain::TruncatedPlane { radius: *radius },
            (_, ParamDomain::Truncated { radius }) => Domain::TruncatedLine { radius: *radius },
            (_, ParamDomain::Rect { re, im }) => Domain::Rect { re: *re, im: *im },
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self, Domain::TruncatedLine { .. } | Domain::TruncatedPlane { .. })
    }

    fn radius(&self, cfg: &QuadConfig) -> Option<f64> {
        match self {
            Domain::TruncatedLine { radius } | Domain::TruncatedPlane { radius } => {
                Some(radius.unwrap_or(cfg.truncation_radius))
            }
            _ => None,
        }
    }

    fn shape(&self, cfg: &QuadConfig, scale: f64) -> Result<Shape> {
        let shape = match *self {
            Domain::Point => Shape::Point,
            Domain::Interval { a, b } => Shape::Interval { a, b },
            Domain::Rect { re, im } => Shape::Rect { re, im },
            Domain::Disk { center, radius } => Shape::Disk { center, radius },
            Domain::TruncatedLine { .. } => {
                let r = scale * self.radius(cfg).unwrap();
                Shape::Interval { a: -r, b: r }
            }
            Domain::TruncatedPlane { .. } => Shape::Disk {
                center: Complex64::new(0.0, 0.0),
                radius: scale * self.radius(cfg).unwrap(),
            },
        };
        let ok = match &shape {
            Shape::Point => true,
            Shape::Interval { a, b } => a < b && a.is_finite() && b.is_finite(),
            Shape::Rect { re, im } => re[0] < re[1] && im[0] < im[1],
            Shape::Disk { radius, .. } => *radius > 0.0 && radius.is_finite(),
        };
        if !ok {
            return Err(Error::InvalidConfig(format!("degenerate integration domain {self:?}")));
        }
        Ok(shape)
    }
}

/// Integrand of a product integral over (param A, param B).
pub trait ProductIntegrand: Sync {
    fn eval(&self, a: Complex64, b: Complex64) -> Complex64;

    /// Distance between the curve points coupled at (a, b), when the
    /// integrand comes from a pair of curves. Drives proximity refinement.
    fn distance(&self, _a: Complex64, _b: Complex64) -> Option<f64> {
        None
    }
}

impl<F: Fn(Complex64, Complex64) -> Complex64 + Sync> ProductIntegrand for F {
    fn eval(&self, a: Complex64, b: Complex64) -> Complex64 {
        self(a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductOptions {
    /// The truncation error behaves like R^(−tail_order).
    pub tail_order: u32,
}

impl Default for ProductOptions {
    fn default() -> Self {
        ProductOptions { tail_order: 2 }
    }
}

struct ProductBox<'a, I: ?Sized> {
    f: &'a I,
    a: Vec<Piece>,
    b: Vec<Piece>,
    da: usize,
    db: usize,
}

impl<I: ProductIntegrand + ?Sized> BoxIntegrand for ProductBox<'_, I> {
    fn dim(&self) -> usize {
        self.da + self.db
    }

    fn eval(&self, region: usize, x: &[f64]) -> Result<(Complex64, f64)> {
        let pa = &self.a[region / self.b.len()];
        let pb = &self.b[region % self.b.len()];
        let ma = pa.chart.map(&x[..self.da]);
        let mb = pb.chart.map(&x[self.da..]);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut dist = f64::INFINITY;
        for &(u, ju) in ma.iter() {
            let wu = pa.weight.as_ref().map_or(1.0, |w| w.at(u));
            for &(v, jv) in mb.iter() {
                let wv = pb.weight.as_ref().map_or(1.0, |w| w.at(v));
                let val = self.f.eval(u, v);
                if !val.is_finite() {
                    return Err(Error::NonFiniteIntegrand { params: vec![u, v] });
                }
                if let Some(d) = self.f.distance(u, v) {
                    dist = dist.min(d);
                }
                sum += val * (ju * jv * wu * wv);
            }
        }
        Ok((sum, dist))
    }
}

fn regions(na: usize, nb: usize, da: usize, db: usize) -> Vec<Region> {
    (0..na * nb)
        .map(|tag| Region {
            tag,
            lo: vec![0.0; da + db],
            hi: vec![1.0; da + db],
        })
        .collect()
}

/// Coarse grid scan plus local compass search for the closest pair of
/// coupled curve points, returned as parameters. Errors with
/// `CurvesTooClose` below the threshold.
fn prescan<I: ProductIntegrand + ?Sized>(f: &I, a: &Shape, b: &Shape) -> Result<Option<(Complex64, Complex64)>> {
    let (ca, cb) = (a.base_chart(), b.base_chart());
    let (da, db) = (ca.dim(), cb.dim());
    let probe = ca.map(&vec![0.5; da]).pts[0].0;
    if f.distance(probe, cb.map(&vec![0.5; db]).pts[0].0).is_none() {
        return Ok(None);
    }
    let dist = |x: &[f64]| {
        let u = ca.map(&x[..da]).pts[0].0;
        let v = cb.map(&x[da..]).pts[0].0;
        f.distance(u, v).unwrap_or(f64::INFINITY)
    };
    let d = da + db;
    let per_axis = match d {
        0 | 1 | 2 => 65,
        3 => 33,
        _ => 17,
    };
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let total = (per_axis as usize).pow(d as u32);
    let mut x = vec![0.0; d];
    for flat in 0..total {
        let mut rest = flat;
        for xi in x.iter_mut() {
            *xi = (rest % per_axis) as f64 / (per_axis - 1) as f64;
            rest /= per_axis;
        }
        let dd = dist(&x);
        if dd < MIN_SEPARATION {
            return Err(Error::CurvesTooClose { distance: dd });
        }
        best.push((dd, x.clone()));
        if best.len() > 64 {
            best.sort_by(|p, q| p.0.total_cmp(&q.0));
            best.truncate(4);
        }
    }
    best.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut closest = (f64::INFINITY, vec![0.0; d]);
    for (mut fx, mut x) in best.into_iter().take(4) {
        let mut h = 1.0 / (per_axis - 1) as f64;
        while h > 1e-12 {
            let mut improved = false;
            for i in 0..d {
                for s in [-1.0, 1.0] {
                    let mut y = x.clone();
                    y[i] = (y[i] + s * h).clamp(0.0, 1.0);
                    let fy = dist(&y);
                    if fy < fx {
                        (fx, x, improved) = (fy, y, true);
                    }
                }
            }
            if fx < MIN_SEPARATION {
                return Err(Error::CurvesTooClose { distance: fx });
            }
            if !improved {
                h /= 2.0;
            }
        }
        if fx < closest.0 {
            closest = (fx, x);
        }
    }
    let x = closest.1;
    Ok(Some((ca.map(&x[..da]).pts[0].0, cb.map(&x[da..]).pts[0].0)))
}

/// One adaptive run over (A minus ε-disks) × (B minus ε-disks) at a fixed radius scale.
fn run_once<I: ProductIntegrand + ?Sized>(
    f: &I,
    a: &Domain,
    b: &Domain,
    punctures: &Punctures,
    eps: Option<f64>,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<engine::EngineOut> {
    let sa = a.shape(cfg, scale)?;
    let sb = b.shape(cfg, scale)?;
    // charts centred on the closest approach, where the kernel peaks
    let (pa, pb) = match eps {
        None => match prescan(f, &sa, &sb)? {
            Some((u, v)) => (sa.focused(u), sb.focused(v)),
            None => (sa.pieces(&[], None)?, sb.pieces(&[], None)?),
        },
        Some(_) => (sa.pieces(&punctures.a, eps)?, sb.pieces(&punctures.b, eps)?),
    };
    let (da, db) = (pa[0].chart.dim(), pb[0].chart.dim());
    let regions = regions(pa.len(), pb.len(), da, db);
    let boxed = ProductBox {
        f,
        a: pa,
        b: pb,
        da,
        db,
    };
    engine::run(&boxed, &regions, cfg)
}

/// Runs at R (and 2R for truncated domains), combining by Richardson.
fn integrate_scaled<I: ProductIntegrand + ?Sized>(
    f: &I,
    a: &Domain,
    b: &Domain,
    punctures: &Punctures,
    eps: Option<f64>,
    cfg: &QuadConfig,
    opts: ProductOptions,
) -> Result<QuadResult> {
    if !(a.is_truncated() || b.is_truncated()) {
        let out = run_once(f, a, b, punctures, eps, 1.0, cfg)?;
        return Ok(QuadResult {
            value: out.value,
            err_estimate: out.err,
            panels_evaluated: out.panels_evaluated,
            tail_estimate: 0.0,
            converged: out.converged,
            truncation: None,
            pv: None,
        });
    }
    let inner = cfg.with_tol(cfg.tol / 4.0);
    let r1 = run_once(f, a, b, punctures, eps, 1.0, &inner)?;
    let r2 = run_once(f, a, b, punctures, eps, 2.0, &inner)?;
    let k = 2f64.powi(opts.tail_order as i32) - 1.0;
    let value = r2.value + (r2.value - r1.value) / k;
    let err_estimate = ((k + 1.0) * r2.err + r1.err) / k;
    let radius = a.radius(cfg).or_else(|| b.radius(cfg)).unwrap();
    Ok(QuadResult {
        value,
        err_estimate,
        panels_evaluated: r1.panels_evaluated + r2.panels_evaluated,
        tail_estimate: (r2.value - r1.value).norm(),
        converged: r1.converged && r2.converged && err_estimate <= cfg.tol * value.norm().max(1.0),
        truncation: Some(Truncation {
            radius,
            at_radius: r1.value,
            at_double: r2.value,
        }),
        pv: None,
    })
}

/// ∫ f(u) du over one domain.
pub fn integrate_curve(
    f: impl Fn(Complex64) -> Complex64 + Sync,
    domain: &Domain,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    integrate_product(&|u: Complex64, _| f(u), domain, &Domain::Point, cfg)
}

/// ∬ f(u, v) du dv over a product of domains.
pub fn integrate_product<I: ProductIntegrand + ?Sized>(
    f: &I,
    a: &Domain,
    b: &Domain,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    integrate_product_with(f, a, b, cfg, ProductOptions::default())
}

pub fn integrate_product_with<I: ProductIntegrand + ?Sized>(
    f: &I,
    a: &Domain,
    b: &Domain,
    cfg: &QuadConfig,
    opts: ProductOptions,
) -> Result<QuadResult> {
    cfg.validate()?;
    integrate_scaled(f, a, b, &Punctures::default(), None, cfg, opts)
}

/// Principal value over the product with ε-disks removed around the
/// punctures, extrapolated to ε → 0.
pub fn integrate_pv<I: ProductIntegrand + ?Sized>(
    f: &I,
    a: &Domain,
    b: &Domain,
    punctures: &Punctures,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    integrate_pv_with(f, a, b, punctures, cfg, ProductOptions::default())
}

pub fn integrate_pv_with<I: ProductIntegrand + ?Sized>(
    f: &I,
    a: &Domain,
    b: &Domain,
    punctures: &Punctures,
    cfg: &QuadConfig,
    opts: ProductOptions,
) -> Result<QuadResult> {
    cfg.validate()?;
    pv::integrate(f, a, b, punctures, cfg, opts)
}

/// ∫ f(x) dx over the box [lo, hi] ⊂ Rᵈ.
pub fn integrate_box(
    f: impl Fn(&[f64]) -> Complex64 + Sync,
    lo: &[f64],
    hi: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    if lo.len() != hi.len() || lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
        return Err(Error::InvalidConfig("box bounds must satisfy lo < hi per axis".into()));
    }
    struct Boxed<'a, F> {
        f: F,
        lo: &'a [f64],
        hi: &'a [f64],
    }
    impl<F: Fn(&[f64]) -> Complex64 + Sync> BoxIntegrand for Boxed<'_, F> {
        fn dim(&self) -> usize {
            self.lo.len()
        }
        fn eval(&self, _: usize, x: &[f64]) -> Result<(Complex64, f64)> {
            let y: Vec<f64> = x
                .iter()
                .zip(self.lo.iter().zip(self.hi))
                .map(|(t, (a, b))| a + (b - a) * t)
                .collect();
            let v = (self.f)(&y);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand {
                    params: y.iter().map(|&t| Complex64::new(t, 0.0)).collect(),
                });
            }
            let vol: f64 = self.lo.iter().zip(self.hi).map(|(a, b)| b - a).product();
            Ok((v * vol, f64::INFINITY))
        }
    }
    let d = lo.len();
    let out = engine::run(
        &Boxed { f, lo, hi },
        &[Region {
            tag: 0,
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }],
        cfg,
    )?;
    Ok(QuadResult {
        value: out.value,
        err_estimate: out.err,
        panels_evaluated: out.panels_evaluated,
        tail_estimate: 0.0,
        converged: out.converged,
        truncation: None,
        pv: None,
    })
}
