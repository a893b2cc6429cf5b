use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{cnorm_sqr, cross, CVec3, CurveKind, ParamCurve, ParamDomain};
use crate::error::{Error, Result};
use crate::poly::{Poly, Poly3, Rational};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Sample parameters spread over the curve domain, avoiding marked points.
/// Open truncations without a radius are sampled on |u| ≤ 1.
pub(crate) fn sample_params(curve: &ParamCurve, n: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> = match (&curve.kind, &curve.domain) {
        (_, ParamDomain::UnitInterval) => (0..n)
            .map(|k| Complex64::new((k as f64 + 0.5) / n as f64, 0.0))
            .collect(),
        (CurveKind::ComplexAffine, ParamDomain::Truncated { radius }) => {
            let r = radius.unwrap_or(1.0);
            (0..n)
                .map(|k| {
                    let rho = r * (0.15 + 0.8 * ((k * 7 % n) as f64 + 0.5) / n as f64);
                    Complex64::from_polar(rho, TAU * (k as f64 * 0.618_033_988_75).fract())
                })
                .collect()
        }
        (_, ParamDomain::Truncated { radius }) => {
            let r = radius.unwrap_or(1.0);
            (0..n)
                .map(|k| Complex64::new(r * (-0.95 + 1.9 * (k as f64 + 0.5) / n as f64), 0.0))
                .collect()
        }
        (_, ParamDomain::Rect { re, im }) => {
            let side = (n as f64).sqrt().ceil() as usize;
            (0..side * side)
                .map(|k| {
                    let (a, b) = ((k % side) as f64 + 0.5, (k / side) as f64 + 0.5);
                    Complex64::new(
                        re[0] + (re[1] - re[0]) * a / side as f64,
                        im[0] + (im[1] - im[0]) * b / side as f64,
                    )
                })
                .collect()
        }
    };
    raw.into_iter()
        .filter(|p| curve.marked_points.iter().all(|m| (p - m).norm() > 1e-9))
        .collect()
}

fn in_working_domain(curve: &ParamCurve, p: Complex64) -> bool {
    let real_tol = 1e-10 * (1.0 + p.norm());
    match (&curve.kind, &curve.domain) {
        (CurveKind::ComplexAffine, ParamDomain::Truncated { radius }) => radius.map_or(true, |r| p.norm() <= r),
        (CurveKind::ComplexAffine, ParamDomain::Rect { re, im }) => {
            (re[0]..=re[1]).contains(&p.re) && (im[0]..=im[1]).contains(&p.im)
        }
        (_, ParamDomain::UnitInterval) => p.im.abs() <= real_tol && (0.0..=1.0).contains(&p.re),
        (_, ParamDomain::Truncated { radius }) => p.im.abs() <= real_tol && radius.map_or(true, |r| p.re.abs() <= r),
        (_, ParamDomain::Rect { .. }) => false,
    }
}

/// A 1-form `coeff(u) du` along a named curve.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub curve: String,
    pub coeff: Rational,
    pub poles: Vec<Complex64>,
}

impl OneForm {
    pub fn constant(curve: impl Into<String>, c: Complex64) -> Self {
        OneForm {
            curve: curve.into(),
            coeff: Rational::constant(c),
            poles: Vec::new(),
        }
    }

    pub fn polynomial(curve: impl Into<String>, p: Poly) -> Self {
        OneForm {
            curve: curve.into(),
            coeff: Rational::polynomial(p),
            poles: Vec::new(),
        }
    }

    pub fn coeff_at(&self, u: Complex64) -> Complex64 {
        self.coeff.eval(u)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        OneForm {
            coeff: self.coeff.scale(s),
            ..self.clone()
        }
    }

    /// `a·self + b·other` for forms on the same curve.
    pub fn combine(&self, a: Complex64, other: &OneForm, b: Complex64) -> Self {
        let num = &(&self.coeff.num * &other.coeff.den).scale(a) + &(&other.coeff.num * &self.coeff.den).scale(b);
        let mut poles = self.poles.clone();
        poles.extend(other.poles.iter().filter(|p| !self.poles.contains(p)));
        OneForm {
            curve: self.curve.clone(),
            coeff: Rational::new(num, &self.coeff.den * &other.coeff.den),
            poles,
        }
    }

    pub fn validate(&self, curve: &ParamCurve) -> Result<()> {
        let den = &self.coeff.den;
        if den.is_zero() {
            return Err(Error::invariant("OneForm.denominator", "denominator is zero"));
        }
        let scale = den.max_abs_coeff();
        for p in &self.poles {
            if !curve
                .marked_points
                .iter()
                .any(|m| (m - p).norm() <= 1e-12 * (1.0 + m.norm()))
            {
                return Err(Error::invariant(
                    "OneForm.poles",
                    format!("pole {p} is not a marked point of curve `{}`", self.curve),
                ));
            }
            let (v, dv) = den.eval_with_derivative(*p);
            if v.norm() > 1e-10 * scale * (1.0 + p.norm()).powi(den.degree().unwrap_or(0) as i32)
                || dv.norm() < 1e-8 * scale
            {
                return Err(Error::invariant(
                    "OneForm.pole_order",
                    format!("denominator does not vanish to order exactly 1 at {p}"),
                ));
            }
        }
        for r in den.roots()? {
            if in_working_domain(curve, r) && !self.poles.iter().any(|p| (p - r).norm() <= 1e-8 * (1.0 + p.norm())) {
                return Err(Error::invariant(
                    "OneForm.denominator",
                    format!("denominator vanishes at undeclared parameter {r}"),
                ));
            }
        }
        Ok(())
    }
}

/// `(numerator/denominator)·dz¹∧dz²∧dz³`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientForm {
    pub numerator: Poly3,
    pub denominator: Poly3,
}

impl Default for AmbientForm {
    fn default() -> Self {
        AmbientForm::standard()
    }
}

impl AmbientForm {
    /// dz¹∧dz²∧dz³
    pub fn standard() -> Self {
        AmbientForm {
            numerator: Poly3::one(),
            denominator: Poly3::one(),
        }
    }

    pub fn ratio(&self, z: &CVec3) -> Complex64 {
        self.numerator.eval(z) / self.denominator.eval(z)
    }

    pub fn validate_on(&self, name: &str, curve: &ParamCurve) -> Result<()> {
        let scale = self.denominator.max_abs_coeff();
        for p in sample_params(curve, 64) {
            let (z, _) = curve.point(p);
            let d = self.denominator.eval(&z);
            if !(d.norm() > 1e-12 * scale) {
                return Err(Error::invariant(
                    "AmbientForm.denominator",
                    format!("denominator vanishes on curve `{name}` at parameter {p}"),
                ));
            }
        }
        Ok(())
    }
}

/// Polynomials whose common zero set contains a named curve.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceCut {
    pub f1: Poly3,
    pub f2: Option<Poly3>,
    pub contains_curve: String,
}

impl SurfaceCut {
    /// Two linear equations cutting out the line `point + u·dir`.
    pub fn for_line(point: CVec3, dir: CVec3, name: impl Into<String>) -> Self {
        let big = (0..3).max_by(|&a, &b| dir[a].norm().total_cmp(&dir[b].norm())).unwrap();
        let [a, b]: [CVec3; 2] = std::array::from_fn(|i| {
            let mut e = [Complex64::new(0.0, 0.0); 3];
            e[(big + 1 + i) % 3] = ONE;
            cross(&dir, &e)
        });
        let affine = |a: CVec3| {
            let c0 = -super::pair(&a, &point);
            Poly3::affine(c0, a)
        };
        SurfaceCut {
            f1: affine(a),
            f2: Some(affine(b)),
            contains_curve: name.into(),
        }
    }

    pub fn validate(&self, curve: &ParamCurve) -> Result<()> {
        for p in sample_params(curve, 32) {
            let (z, _) = curve.point(p);
            let zscale = 1.0 + cnorm_sqr(&z).sqrt();
            for (label, f) in std::iter::once(("F1", &self.f1)).chain(self.f2.iter().map(|f| ("F2", f))) {
                let tol = 1e-10 * f.max_abs_coeff().max(1.0) * zscale.powi(f.total_degree() as i32);
                let v = f.eval(&z);
                if !(v.norm() <= tol) {
                    return Err(Error::invariant(
                        "SurfaceCut.contains",
                        format!("{label} = {v} on curve `{}` at parameter {p}", self.contains_curve),
                    ));
                }
            }
            let g1 = self.f1.gradient(&z);
            let n1 = cnorm_sqr(&g1).sqrt();
            let independent = match &self.f2 {
                None => n1 > 0.0,
                Some(f2) => {
                    let g2 = f2.gradient(&z);
                    let n2 = cnorm_sqr(&g2).sqrt();
                    cnorm_sqr(&cross(&g1, &g2)).sqrt() > 1e-10 * n1 * n2 && n1 * n2 > 0.0
                }
            };
            if !independent {
                return Err(Error::invariant(
                    "SurfaceCut.regularity",
                    format!("gradients are dependent at parameter {p}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationConstants {
    /// Volume of the unit 5-sphere, π³.
    pub c3: f64,
    /// Closed-form line constant, stored with the C₃ factor included.
    pub kappa_line: Option<Complex64>,
    /// Ratio of the kernel integral to the residue sum, with C₃ included.
    pub kappa_xmethod: Option<Complex64>,
}

impl Default for NormalizationConstants {
    fn default() -> Self {
        NormalizationConstants {
            c3: c3(),
            kappa_line: None,
            kappa_xmethod: None,
        }
    }
}

/// 2πⁿ/(n−1)! for n = 3.
pub fn c3() -> f64 {
    PI * PI * PI
}

impl NormalizationConstants {
    pub fn validate(&self) -> Result<()> {
        if (self.c3 - c3()).abs() > 4.0 * f64::EPSILON * c3() {
            return Err(Error::invariant(
                "NormalizationConstants.c3",
                format!("C3 = {} but must equal pi^3", self.c3),
            ));
        }
        for (name, k) in [("kappa_line", self.kappa_line), ("kappa_xmethod", self.kappa_xmethod)] {
            if k.is_some_and(|k| !k.is_finite() || k.norm() == 0.0) {
                return Err(Error::invariant(
                    "NormalizationConstants.kappa",
                    format!("{name} must be finite and non-zero"),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x_axis() -> ParamCurve {
        ParamCurve::complex_line([c(0.0, 0.0); 3], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
    }

    #[test]
    fn pole_declarations() {
        let curve = x_axis().with_marked_points(vec![c(0.5, 0.0)]);
        let simple = OneForm {
            curve: "a".into(),
            coeff: Rational::new(Poly::from_real(&[1.0]), Poly::from_real(&[-0.5, 1.0])),
            poles: vec![c(0.5, 0.0)],
        };
        assert!(simple.validate(&curve).is_ok());

        let undeclared = OneForm {
            poles: vec![],
            ..simple.clone()
        };
        assert!(matches!(
            undeclared.validate(&curve),
            Err(Error::InvariantViolated {
                invariant: "OneForm.denominator",
                ..
            })
        ));

        let double = OneForm {
            coeff: Rational::new(Poly::from_real(&[1.0]), Poly::from_real(&[0.25, -1.0, 1.0])),
            ..simple.clone()
        };
        assert!(matches!(
            double.validate(&curve),
            Err(Error::InvariantViolated {
                invariant: "OneForm.pole_order",
                ..
            })
        ));

        let unmarked = OneForm {
            poles: vec![c(0.5, 0.0)],
            ..simple
        };
        assert!(unmarked.validate(&x_axis()).is_err());
    }

    #[test]
    fn line_cut_vanishes_on_its_line() {
        let point = [c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5)];
        let dir = [c(0.3, 0.1), c(1.0, 0.0), c(-0.2, 0.7)];
        let curve = ParamCurve::complex_line(point, dir);
        let cut = SurfaceCut::for_line(point, dir, "a");
        assert!(cut.validate(&curve).is_ok());
    }

    #[test]
    fn cut_not_containing_curve_is_rejected() {
        let cut = SurfaceCut {
            f1: Poly3::coordinate(0),
            f2: Some(Poly3::coordinate(2)),
            contains_curve: "a".into(),
        };
        assert!(matches!(
            cut.validate(&x_axis()),
            Err(Error::InvariantViolated {
                invariant: "SurfaceCut.contains",
                ..
            })
        ));
        let dependent = SurfaceCut {
            f1: Poly3::coordinate(1),
            f2: Some(Poly3::coordinate(1).scale(c(2.0, 0.0))),
            contains_curve: "a".into(),
        };
        assert!(matches!(
            dependent.validate(&x_axis()),
            Err(Error::InvariantViolated {
                invariant: "SurfaceCut.regularity",
                ..
            })
        ));
    }

    #[test]
    fn ambient_denominator_checked_on_curve() {
        let eta = AmbientForm {
            numerator: Poly3::one(),
            denominator: Poly3::coordinate(1),
        };
        assert!(eta.validate_on("a", &x_axis()).is_err());
        assert!(AmbientForm::standard().validate_on("a", &x_axis()).is_ok());
    }

    #[test]
    fn constants() {
        let k = NormalizationConstants::default();
        assert!((k.c3 - 31.006_276_680_299_82).abs() < 1e-13);
        assert!(k.validate().is_ok());
        let bad = NormalizationConstants { c3: 31.0, ..k };
        assert!(bad.validate().is_err());
    }
}
