//! Residue route: double Leray residues of rational 3-forms, intersections
//! of a curve with a surface, and linking as a sum of one-variable residues.
//!
//! Convention: res(du/u) = 1, no factors of 2πi.

mod atiyah;

pub use atiyah::{atiyah_p3, AtiyahResult};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{det3, AmbientForm, CVec3, OneForm, ParamCurve, SurfaceCut};
use crate::poly::{sort_complex, Poly, Poly3, Rational};

/// Largest multiplier degree `lift_theta` tries by default.
pub const MAX_MULTIPLIER_DEGREE: usize = 4;

/// M·η / (F1·F2).
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedThreeForm {
    pub base: AmbientForm,
    pub f1: Poly3,
    pub f2: Poly3,
    pub multiplier: Poly3,
}

impl LiftedThreeForm {
    pub fn new(base: AmbientForm, cut: &SurfaceCut, multiplier: Poly3) -> Result<Self> {
        let f2 = cut.f2.clone().ok_or_else(|| {
            Error::DegenerateConfiguration(format!("cut of `{}` has no second surface", cut.contains_curve))
        })?;
        Ok(LiftedThreeForm {
            base,
            f1: cut.f1.clone(),
            f2,
            multiplier,
        })
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        LiftedThreeForm {
            multiplier: self.multiplier.scale(s),
            ..self.clone()
        }
    }
}

/// Simple roots t* of F∘γ over the whole parameter plane, sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionSet {
    pub params: Vec<Complex64>,
    pub multiplicities: Vec<u32>,
}

fn components(curve: &ParamCurve) -> Result<&[Poly; 3]> {
    curve
        .components()
        .ok_or_else(|| Error::DegenerateConfiguration("the residue route needs a polynomial curve".into()))
}

pub fn curve_surface_intersections(f: &Poly3, curve: &ParamCurve) -> Result<IntersectionSet> {
    let g = f.compose(components(curve)?);
    let scale = g.max_abs_coeff();
    if g.is_zero() || scale <= 1e-14 * f.max_abs_coeff() {
        return Err(Error::IdenticallyZero);
    }
    let g = g.trimmed(1e-14);
    let deg = g.degree().unwrap_or(0);
    let mut roots = g.roots()?;
    sort_complex(&mut roots);
    for &t in &roots {
        let growth = t.norm().max(1.0);
        let (v, dv) = g.eval_with_derivative(t);
        if v.norm() > 1e-10 * scale * growth.powi(deg as i32) {
            return Err(Error::RootFinding { degree: deg });
        }
        if dv.norm() < 1e-8 * scale * growth.powi(deg as i32 - 1) {
            return Err(Error::NonSimpleRoot { t });
        }
    }
    Ok(IntersectionSet {
        multiplicities: vec![1; roots.len()],
        params: roots,
    })
}

fn solve3(rows: &[CVec3; 3], rhs: &CVec3) -> Option<CVec3> {
    let d = det3(
        &[rows[0][0], rows[1][0], rows[2][0]],
        &[rows[0][1], rows[1][1], rows[2][1]],
        &[rows[0][2], rows[1][2], rows[2][2]],
    );
    if d.norm() == 0.0 {
        return None;
    }
    let col = |k: usize| [rows[0][k], rows[1][k], rows[2][k]];
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut cols = [col(0), col(1), col(2)];
        cols[k] = *rhs;
        *slot = det3(&cols[0], &cols[1], &cols[2]) / d;
    }
    Some(out)
}

/// Coefficient of the double residue τ at parameter `s` of Σ₁: the unique
/// 1-form with dF1 ∧ dF2 ∧ τ = M·η along the curve, τ(γ') = M·η(u₁, u₂, γ')
/// where dFᵢ(u_j) = δᵢⱼ.
pub fn double_leray_residue(lift: &LiftedThreeForm, curve: &ParamCurve, s: Complex64) -> Result<Complex64> {
    let (z, v) = curve.point(s);
    let g1 = lift.f1.gradient(&z);
    let g2 = lift.f2.gradient(&z);
    let rows = [g1, g2, v.map(|c| c.conj())];
    let norm = |a: &CVec3| a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let d = det3(
        &[g1[0], g2[0], v[0].conj()],
        &[g1[1], g2[1], v[1].conj()],
        &[g1[2], g2[2], v[2].conj()],
    );
    if !(d.norm() > 1e-12 * norm(&g1) * norm(&g2) * norm(&v)) {
        return Err(Error::DependentGradients { s });
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let u1 = solve3(&rows, &[one, zero, zero]).ok_or(Error::DependentGradients { s })?;
    let u2 = solve3(&rows, &[zero, one, zero]).ok_or(Error::DependentGradients { s })?;
    Ok(lift.multiplier.eval(&z) * lift.base.ratio(&z) * det3(&u1, &u2, &v))
}

/// Chebyshev points of [−1, 1].
fn chebyshev(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// Finds the multiplier M (a polynomial in the Σ₁ parameter of degree at
/// most `max_degree`, extended to C³ through a degree-1 component of Σ₁)
/// whose double residue reproduces θ₁.
pub fn lift_theta(
    cut: &SurfaceCut,
    eta: &AmbientForm,
    theta1: &OneForm,
    sigma1: &ParamCurve,
    max_degree: usize,
) -> Result<LiftedThreeForm> {
    let unit = LiftedThreeForm::new(eta.clone(), cut, Poly3::one())?;
    let comps = components(sigma1)?;
    let nodes = chebyshev(2 * max_degree + 8);
    let mut ratio = Vec::with_capacity(nodes.len());
    for &x in &nodes {
        let s = Complex64::new(x, 0.0);
        let tau = double_leray_residue(&unit, sigma1, s)?;
        ratio.push(theta1.coeff_at(s) / tau);
    }
    let not_poly = |detail: String| Error::MultiplierNotPolynomial { max_degree, detail };
    if ratio.iter().any(|r| !r.is_finite()) {
        return Err(not_poly("θ₁ / τ is not finite at a sample".into()));
    }
    let scale = ratio.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(unit.scaled(Complex64::new(0.0, 0.0)));
    }
    let rhs = DVector::from_vec(ratio.clone());
    let mut best = f64::INFINITY;
    for d in 0..=max_degree {
        let v = DMatrix::from_fn(nodes.len(), d + 1, |i, j| Complex64::new(nodes[i].powi(j as i32), 0.0));
        let coeffs = v
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| not_poly(e.to_string()))?;
        let resid = (&v * &coeffs - &rhs).iter().map(|c| c.norm()).fold(0.0, f64::max);
        best = best.min(resid / scale);
        if resid > 1e-10 * scale {
            continue;
        }
        let p = Poly::new(coeffs.iter().copied().collect());
        if p.degree().unwrap_or(0) == 0 {
            return Ok(unit.scaled(p.coeff(0)));
        }
        // s = (z_k − a)/b along a component z_k = a + b·s
        let k = (0..3)
            .filter(|&k| comps[k].degree() == Some(1))
            .max_by(|&a, &b| comps[a].coeff(1).norm().total_cmp(&comps[b].coeff(1).norm()))
            .ok_or_else(|| not_poly("Σ₁ has no degree-1 component to recover its parameter from".into()))?;
        let (a, b) = (comps[k].coeff(0), comps[k].coeff(1));
        let mut dir = [Complex64::new(0.0, 0.0); 3];
        dir[k] = b.inv();
        let param = Poly3::affine(-a / b, dir);
        return Ok(LiftedThreeForm {
            multiplier: Poly3::from_univariate(&p, &param),
            ..unit
        });
    }
    Err(not_poly(format!("best polynomial fit has relative residual {best:e}")))
}

fn eta_ratio(lift: &LiftedThreeForm, eta: &AmbientForm, z: &CVec3) -> Complex64 {
    lift.base.ratio(z) / eta.ratio(z)
}

/// Σ over t* with F1(γ₂(t*)) = 0 of θ₂(t*)·M(γ₂(t*))·(η₁/η) / ((F1∘γ₂)'(t*)·F2(γ₂(t*))).
pub fn residue_linking(lift: &LiftedThreeForm, s2: (&ParamCurve, &OneForm), eta: &AmbientForm) -> Result<Complex64> {
    let (sigma2, theta2) = s2;
    let comps = components(sigma2)?;
    let hits = curve_surface_intersections(&lift.f1, sigma2)?;
    let g1 = lift.f1.compose(comps);
    let g2 = lift.f2.compose(comps);
    let scale2 = g2.max_abs_coeff();
    let terms: Vec<Result<Complex64>> = hits
        .params
        .par_iter()
        .map(|&t| {
            let (z, _) = sigma2.point(t);
            let f2 = g2.eval(t);
            if f2.norm() <= 1e-10 * scale2 * t.norm().max(1.0).powi(g2.degree().unwrap_or(0) as i32) {
                return Err(Error::PoleCollision { t });
            }
            if theta2.poles.iter().any(|p| (p - t).norm() <= 1e-10 * p.norm().max(1.0)) {
                return Err(Error::PoleCollision { t });
            }
            let (_, dg1) = g1.eval_with_derivative(t);
            Ok(theta2.coeff_at(t) * lift.multiplier.eval(&z) * eta_ratio(lift, eta, &z) / (dg1 * f2))
        })
        .collect();
    terms.into_iter().sum()
}

/// h(t) dt on Σ₂ as an explicit rational function of t, with every factor
/// kept (no cancellation), for residue-theorem checks.
pub fn residue_form(lift: &LiftedThreeForm, s2: (&ParamCurve, &OneForm), eta: &AmbientForm) -> Result<Rational> {
    let (sigma2, theta2) = s2;
    let comps = components(sigma2)?;
    let on = |p: &Poly3| p.compose(comps);
    let num = &(&(&on(&lift.multiplier) * &on(&lift.base.numerator)) * &on(&eta.denominator)) * &theta2.coeff.num;
    let den =
        &(&(&(&on(&lift.f1) * &on(&lift.f2)) * &on(&lift.base.denominator)) * &on(&eta.numerator)) * &theta2.coeff.den;
    Ok(Rational::new(num, den))
}
