//! Holomorphic linking in C³ through the Bochner–Martinelli kernel, the
//! complex linking number, the closed form for complex lines, and the
//! reproducing-property check on small spheres.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{c3, cnorm_sqr, det3, sub3, CVec3, CurveKind, NormalizationConstants, OneForm, ParamCurve};
use crate::poly::Poly3;
use crate::quadrature::{
    integrate_box, integrate_product, integrate_pv, Domain, ProductIntegrand, Punctures, QuadConfig, QuadResult,
};

/// Kernel conventions: ambient dimension is fixed at 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BmContext {
    /// Volume of the unit 5-sphere, π³.
    pub c3: f64,
    /// Whether the C₃ prefactor multiplies the kernel.
    pub include_cn: bool,
}

impl Default for BmContext {
    fn default() -> Self {
        BmContext {
            c3: c3(),
            include_cn: true,
        }
    }
}

impl BmContext {
    pub fn from_constants(k: &NormalizationConstants, include_cn: bool) -> Self {
        BmContext { c3: k.c3, include_cn }
    }

    pub fn prefactor(&self) -> f64 {
        if self.include_cn {
            self.c3
        } else {
            1.0
        }
    }

    /// Stored constants carry the C₃ factor; rescale them to this context.
    pub fn constants(&self, k: &NormalizationConstants) -> NormalizationConstants {
        let s = self.prefactor() / k.c3;
        NormalizationConstants {
            c3: k.c3,
            kappa_line: k.kappa_line.map(|v| v * s),
            kappa_xmethod: k.kappa_xmethod.map(|v| v * s),
        }
    }
}

const LEVI_CIVITA: [([usize; 3], f64); 6] = [
    ([0, 1, 2], 1.0),
    ([1, 2, 0], 1.0),
    ([2, 0, 1], 1.0),
    ([0, 2, 1], -1.0),
    ([2, 1, 0], -1.0),
    ([1, 0, 2], -1.0),
];

/// Σ ε^{ijk}·conj(zᵢ−wᵢ)·conj(dz_j)·conj(dw_k) / |z−w|⁶, times C₃ when
/// the context asks for it.
pub fn bm_pullback_integrand(z: &CVec3, dz: &CVec3, w: &CVec3, dw: &CVec3, ctx: &BmContext) -> Result<Complex64> {
    let r = sub3(z, w);
    let d2 = cnorm_sqr(&r);
    if d2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for ([i, j, k], sign) in LEVI_CIVITA {
        sum += r[i].conj() * dz[j].conj() * dw[k].conj() * sign;
    }
    Ok(sum * ctx.prefactor() / (d2 * d2 * d2))
}

/// The same kernel written as conj(det3(z−w, dz, dw)) / |z−w|⁶.
pub fn bm_pullback_det(z: &CVec3, dz: &CVec3, w: &CVec3, dw: &CVec3, ctx: &BmContext) -> Result<Complex64> {
    let r = sub3(z, w);
    let d2 = cnorm_sqr(&r);
    if d2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(det3(&r, dz, dw).conj() * ctx.prefactor() / (d2 * d2 * d2))
}

struct Pair<'a> {
    c1: &'a ParamCurve,
    c2: &'a ParamCurve,
}

impl Pair<'_> {
    fn new<'a>(c1: &'a ParamCurve, c2: &'a ParamCurve) -> Result<Pair<'a>> {
        for c in [c1, c2] {
            if c.kind != CurveKind::ComplexAffine {
                return Err(Error::DegenerateConfiguration(format!(
                    "holomorphic linking needs complex curves, got {:?}",
                    c.kind
                )));
            }
            c.validate()?;
        }
        Ok(Pair { c1, c2 })
    }

    /// (det3(z−w, dz, dw), |z−w|²)
    fn det(&self, a: Complex64, b: Complex64) -> (Complex64, f64) {
        let (z, dz) = self.c1.point(a);
        let (w, dw) = self.c2.point(b);
        let r = sub3(&z, &w);
        (det3(&r, &dz, &dw), cnorm_sqr(&r))
    }

    fn distance(&self, a: Complex64, b: Complex64) -> f64 {
        self.det(a, b).1.sqrt()
    }

    fn domains(&self) -> (Domain, Domain) {
        (Domain::of_curve(self.c1), Domain::of_curve(self.c2))
    }

    fn punctures(&self) -> Punctures {
        Punctures {
            a: self.c1.marked_points.clone(),
            b: self.c2.marked_points.clone(),
        }
    }
}

struct HoloKernel<'a> {
    pair: Pair<'a>,
    theta1: &'a OneForm,
    theta2: &'a OneForm,
    prefactor: f64,
}

impl ProductIntegrand for HoloKernel<'_> {
    fn eval(&self, a: Complex64, b: Complex64) -> Complex64 {
        let (det, d2) = self.pair.det(a, b);
        det.conj() * self.theta1.coeff_at(a) * self.theta2.coeff_at(b) * (self.prefactor / (d2 * d2 * d2))
    }

    fn distance(&self, a: Complex64, b: Complex64) -> Option<f64> {
        Some(self.pair.distance(a, b))
    }
}

/// Holomorphic linking of (Σ₁, θ₁) and (Σ₂, θ₂): the kernel pulled back to
/// the parameter domains against area measure. Marked points switch to the
/// principal value.
pub fn holo_linking_integral(
    s1: (&ParamCurve, &OneForm),
    s2: (&ParamCurve, &OneForm),
    ctx: &BmContext,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let pair = Pair::new(s1.0, s2.0)?;
    s1.1.validate(s1.0)?;
    s2.1.validate(s2.0)?;
    let (da, db) = pair.domains();
    let punctures = pair.punctures();
    let kernel = HoloKernel {
        pair,
        theta1: s1.1,
        theta2: s2.1,
        prefactor: ctx.prefactor(),
    };
    if punctures.is_empty() {
        integrate_product(&kernel, &da, &db, cfg)
    } else {
        integrate_pv(&kernel, &da, &db, &punctures, cfg)
    }
}

/// κ_line · c₁c₂ / det3(e₁, e₂, e₃), with e₃ running from Σ₁ to Σ₂.
pub fn line_holo_closed(
    e1: &CVec3,
    e2: &CVec3,
    e3: &CVec3,
    c1: Complex64,
    c2: Complex64,
    constants: &NormalizationConstants,
) -> Result<Complex64> {
    let kappa = constants
        .kappa_line
        .ok_or_else(|| Error::InvalidConfig("kappa_line is not calibrated".into()))?;
    let d = det3(e1, e2, e3);
    let scale = cnorm_sqr(e1).sqrt() * cnorm_sqr(e2).sqrt() * cnorm_sqr(e3).sqrt();
    if !(d.norm() > 1e-14 * scale) {
        return Err(Error::DegenerateConfiguration(
            "det(e1, e2, e3) = 0: the lines intersect or are parallel".into(),
        ));
    }
    Ok(kappa * c1 * c2 / d)
}

/// Directions, joining vector (Σ₁ → Σ₂) and pairings ⟨eᵢ, θᵢ⟩ of two complex
/// lines carrying constant forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineData {
    pub e1: CVec3,
    pub e2: CVec3,
    pub e3: CVec3,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl LineData {
    pub fn from_scene(s1: (&ParamCurve, &OneForm), s2: (&ParamCurve, &OneForm)) -> Result<LineData> {
        let line = |c: &ParamCurve| {
            c.line_data()
                .filter(|_| c.kind == CurveKind::ComplexAffine)
                .ok_or_else(|| Error::DegenerateConfiguration("closed form needs two complex lines".into()))
        };
        let constant = |f: &OneForm| {
            if f.coeff.is_polynomial() && f.coeff.num.degree().unwrap_or(0) == 0 {
                Ok(f.coeff_at(Complex64::new(0.0, 0.0)))
            } else {
                Err(Error::DegenerateConfiguration(
                    "closed form needs constant forms".into(),
                ))
            }
        };
        let (p1, e1) = line(s1.0)?;
        let (p2, e2) = line(s2.0)?;
        Ok(LineData {
            e1,
            e2,
            e3: sub3(&p2, &p1),
            c1: constant(s1.1)?,
            c2: constant(s2.1)?,
        })
    }

    pub fn closed(&self, constants: &NormalizationConstants) -> Result<Complex64> {
        line_holo_closed(&self.e1, &self.e2, &self.e3, self.c1, self.c2, constants)
    }
}

struct LinkKernel<'a> {
    pair: Pair<'a>,
    prefactor: f64,
}

impl ProductIntegrand for LinkKernel<'_> {
    fn eval(&self, a: Complex64, b: Complex64) -> Complex64 {
        let (det, d2) = self.pair.det(a, b);
        Complex64::new(det.norm_sqr() * self.prefactor / (d2 * d2 * d2), 0.0)
    }

    fn distance(&self, a: Complex64, b: Complex64) -> Option<f64> {
        Some(self.pair.distance(a, b))
    }
}

/// Kernel wedged with its conjugate, |det3(z−w, dz, dw)|² / |z−w|⁶, over
/// both curves; independent of any 1-forms.
pub fn complex_linking_number(
    s1: &ParamCurve,
    s2: &ParamCurve,
    ctx: &BmContext,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let pair = Pair::new(s1, s2)?;
    let (da, db) = pair.domains();
    integrate_product(
        &LinkKernel {
            pair,
            prefactor: ctx.prefactor(),
        },
        &da,
        &db,
        cfg,
    )
}

/// Point and area element of the radius-ε 5-sphere in Hopf coordinates
/// (α, β, φ₁, φ₂, φ₃) ∈ [0, π/2]² × [0, 2π]³.
fn hopf_point(x: &[f64], eps: f64) -> (CVec3, f64) {
    let (sa, ca) = x[0].sin_cos();
    let (sb, cb) = x[1].sin_cos();
    let r = [ca, sa * cb, sa * sb];
    let z = std::array::from_fn(|j| Complex64::from_polar(eps * r[j], x[2 + j]));
    (z, eps.powi(5) * ca * sa * sa * sa * cb * sb)
}

/// ∫ over |z − w₀| = ε of f·K, with K the Bochner–Martinelli (3,2)-form
/// K = Σⱼ (−1)^{j−1} conj(x_j) dz̄[ĵ]∧dz / (4i·C₃·|x|⁶), x = z − w₀.
///
/// The form is pulled back as ι_a vol: with a = Σ 8i·conj(x_j) ∂/∂z̄_j, only
/// the normal component a·n survives on the sphere.
pub fn bm_reproduce(f: &Poly3, w0: &CVec3, eps: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "sphere radius must be positive, got {eps}"
        )));
    }
    let norm = Complex64::new(0.0, 4.0 * c3()).inv();
    let integrand = |x: &[f64]| {
        let (dx, area) = hopf_point(x, eps);
        // ∂/∂z̄ = (∂/∂x + i∂/∂y)/2, paired with n = x/ε
        let a_dot_n: Complex64 = dx
            .iter()
            .map(|&xj| Complex64::new(0.0, 8.0) * xj.conj() * 0.5 * xj / eps)
            .sum();
        let d2 = cnorm_sqr(&dx);
        let z = std::array::from_fn(|j| w0[j] + dx[j]);
        f.eval(&z) * a_dot_n * norm * area / (d2 * d2 * d2)
    };
    let lo = [0.0; 5];
    let hi = [FRAC_PI_2, FRAC_PI_2, TAU, TAU, TAU];
    integrate_box(integrand, &lo, &hi, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: [f64; 3]) -> CVec3 {
        v.map(|x| c(x, 0.0))
    }

    const RAW: BmContext = BmContext {
        c3: PI * PI * PI,
        include_cn: false,
    };

    #[test]
    fn integrand_examples() {
        let o = real([0.0; 3]);
        let v = bm_pullback_integrand(
            &real([1.0, 0.0, 0.0]),
            &real([0.0, 1.0, 0.0]),
            &o,
            &real([0.0, 0.0, 1.0]),
            &RAW,
        );
        assert_eq!(v.unwrap(), c(1.0, 0.0));
        let v = bm_pullback_integrand(
            &real([1.0, 0.0, 0.0]),
            &real([0.0, 1.0, 0.0]),
            &o,
            &real([0.0, 2.0, 0.0]),
            &RAW,
        );
        assert_eq!(v.unwrap(), c(0.0, 0.0));
        let zi = [c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)];
        let v = bm_pullback_integrand(&zi, &real([0.0, 1.0, 0.0]), &o, &real([0.0, 0.0, 1.0]), &RAW);
        assert_eq!(v.unwrap(), c(0.0, -1.0));
        let with = bm_pullback_integrand(
            &zi,
            &real([0.0, 1.0, 0.0]),
            &o,
            &real([0.0, 0.0, 1.0]),
            &BmContext::default(),
        );
        assert!((with.unwrap() - c(0.0, -PI * PI * PI)).norm() < 1e-12);
        assert!(matches!(
            bm_pullback_integrand(&o, &o, &o, &o, &RAW),
            Err(Error::CoincidentPoints)
        ));
    }

    fn cvec() -> impl Strategy<Value = CVec3> {
        prop::array::uniform3((-2.0..2.0f64, -2.0..2.0f64)).prop_map(|a| a.map(|(x, y)| c(x, y)))
    }

    proptest! {
        #[test]
        fn epsilon_sum_matches_determinant(z in cvec(), dz in cvec(), w in cvec(), dw in cvec()) {
            prop_assume!(cnorm_sqr(&sub3(&z, &w)) > 1e-2);
            let a = bm_pullback_integrand(&z, &dz, &w, &dw, &RAW).unwrap();
            let b = bm_pullback_det(&z, &dz, &w, &dw, &RAW).unwrap();
            prop_assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
        }

        #[test]
        fn closed_form_scaling(lambda in 0.1..5.0f64, mu in 0.1..5.0f64) {
            let k = NormalizationConstants { kappa_line: Some(c(-2.0, 0.5)), ..Default::default() };
            let (e1, e2, e3) = (real([1.0, 0.2, 0.0]), real([0.0, 1.0, 0.3]), real([0.1, 0.0, 1.0]));
            let base = line_holo_closed(&e1, &e2, &e3, c(1.0, 1.0), c(0.5, 0.0), &k).unwrap();
            let l = c(lambda, mu);
            let e1s = e1.map(|x| x * l);
            let scaled = line_holo_closed(&e1s, &e2, &e3, c(1.0, 1.0) * l, c(0.5, 0.0), &k).unwrap();
            prop_assert!((scaled - base).norm() <= 1e-14 * base.norm());
            let e3s = e3.map(|x| x * lambda);
            let shrunk = line_holo_closed(&e1, &e2, &e3s, c(1.0, 1.0), c(0.5, 0.0), &k).unwrap();
            prop_assert!((shrunk * lambda - base).norm() <= 1e-14 * base.norm());
        }
    }

    #[test]
    fn closed_form_examples() {
        let k = NormalizationConstants {
            kappa_line: Some(c(-3.0, 0.0)),
            ..Default::default()
        };
        let e = [real([1.0, 0.0, 0.0]), real([0.0, 1.0, 0.0]), real([0.0, 0.0, 1.0])];
        let one = c(1.0, 0.0);
        assert_eq!(
            line_holo_closed(&e[0], &e[1], &e[2], one, one, &k).unwrap(),
            c(-3.0, 0.0)
        );
        let e3 = real([0.0, 0.0, 2.0]);
        assert_eq!(line_holo_closed(&e[0], &e[1], &e3, one, one, &k).unwrap(), c(-1.5, 0.0));
        assert!(line_holo_closed(&e[0], &e[0], &e[2], one, one, &k).is_err());
        let blank = NormalizationConstants::default();
        assert!(matches!(
            line_holo_closed(&e[0], &e[1], &e[2], one, one, &blank),
            Err(Error::InvalidConfig(_))
        ));
    }

    /// ∬ dA dA / (1 + |u|² + |v|²)³ over two disks of radius R.
    fn l0_truncated(r: f64) -> f64 {
        let s = r * r;
        PI * PI / 2.0 * (1.0 - 2.0 / (1.0 + s) + 1.0 / (1.0 + 2.0 * s))
    }

    #[test]
    fn truncated_oracle_agrees_with_brute_force() {
        // ∫₀^{R²}∫₀^{R²} π² ds dt / (1+s+t)³ by a 2000² midpoint rule
        let r: f64 = 3.0;
        let n = 2000;
        let h = r * r / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (s, t) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                sum += (1.0 + s + t).powi(-3);
            }
        }
        let brute = PI * PI * sum * h * h;
        assert!((brute - l0_truncated(r)).abs() < 1e-5 * brute);
    }

    #[test]
    fn l0_integral_matches_oracle() {
        let scene = crate::geometry::Scene::l0();
        let (a, b) = scene.linking_pair().unwrap();
        let fa = scene.form_on(&a.name).unwrap();
        let fb = scene.form_on(&b.name).unwrap();
        let r = holo_linking_integral((&a.value, fa), (&b.value, fb), &RAW, &QuadConfig::default()).unwrap();
        let truncation = r.truncation.as_ref().unwrap();
        assert!((truncation.at_radius.re + l0_truncated(40.0)).abs() < 1e-6);
        assert!((r.value.re + PI * PI / 2.0).abs() < 1e-5, "{}", r.value);
        assert!(r.value.im.abs() < 1e-9);
    }

    #[test]
    fn complex_linking_number_on_l0() {
        let scene = crate::geometry::Scene::l0();
        let (a, b) = scene.linking_pair().unwrap();
        let r = complex_linking_number(&a.value, &b.value, &RAW, &QuadConfig::default()).unwrap();
        assert!((r.value.re - PI * PI / 2.0).abs() < 1e-5, "{}", r.value);
    }

    #[test]
    fn reproduces_constants_and_linear_functions() {
        let cfg = QuadConfig {
            tol: 1e-8,
            ..Default::default()
        };
        let origin = real([0.0; 3]);
        let one = bm_reproduce(&Poly3::one(), &origin, 0.1, &cfg).unwrap();
        assert!((one.value - c(1.0, 0.0)).norm() < 1e-3, "{}", one.value);
        let z1 = Poly3::coordinate(0);
        let v = bm_reproduce(&z1, &origin, 0.3, &cfg).unwrap();
        assert!(v.value.norm() < 1e-3);
        let v = bm_reproduce(&z1, &real([1.0, 0.0, 0.0]), 0.05, &cfg).unwrap();
        assert!((v.value - c(1.0, 0.0)).norm() < 5e-3);
    }

    #[test]
    fn sphere_area_element_integrates_to_c3() {
        let cfg = QuadConfig {
            tol: 1e-10,
            ..Default::default()
        };
        let v = integrate_box(
            |x: &[f64]| c(hopf_point(x, 1.0).1, 0.0),
            &[0.0; 5],
            &[FRAC_PI_2, FRAC_PI_2, TAU, TAU, TAU],
            &cfg,
        )
        .unwrap();
        assert!((v.value.re - c3()).abs() < 1e-9);
    }
}
