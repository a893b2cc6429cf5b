use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    AmbientForm, CurveKind, CurveMap, FourierSeries, Harmonic, NormalizationConstants, OneForm, ParamCurve,
    ParamDomain, SurfaceCut, Vec3,
};
use crate::error::{Error, Result};
use crate::poly::{Poly, Poly3, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct Named<T> {
    pub name: String,
    pub value: T,
}

impl<T> Named<T> {
    pub fn new(name: impl Into<String>, value: T) -> Self {
        Named {
            name: name.into(),
            value,
        }
    }
}

/// Two lines and four auxiliary hyperplanes in P³, each a linear form in
/// homogeneous coordinates (z₀..z₃).
#[derive(Clone, Debug, PartialEq)]
pub struct AtiyahInput {
    pub l: [[Complex64; 4]; 4],
    pub p: [[Complex64; 4]; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub curves: Vec<Named<ParamCurve>>,
    pub forms: Vec<Named<OneForm>>,
    pub ambient: AmbientForm,
    pub cuts: Vec<Named<SurfaceCut>>,
    pub constants: Option<NormalizationConstants>,
    pub atiyah: Option<AtiyahInput>,
}

impl Scene {
    pub fn curve(&self, name: &str) -> Option<&ParamCurve> {
        self.curves.iter().find(|c| c.name == name).map(|c| &c.value)
    }

    /// The first form declared on `curve`.
    pub fn form_on(&self, curve: &str) -> Option<&OneForm> {
        self.forms.iter().map(|f| &f.value).find(|f| f.curve == curve)
    }

    /// Every cut declared as containing `curve`.
    pub fn cuts_for<'a>(&'a self, curve: &'a str) -> impl Iterator<Item = &'a SurfaceCut> {
        self.cuts
            .iter()
            .map(|c| &c.value)
            .filter(move |c| c.contains_curve == curve)
    }

    /// The curves of a linking query: the first two declared.
    pub fn linking_pair(&self) -> Option<(&Named<ParamCurve>, &Named<ParamCurve>)> {
        match self.curves.as_slice() {
            [a, b, ..] => Some((a, b)),
            _ => None,
        }
    }

    /// The reference scene: the x-axis and the line (0, t, 1), each with the
    /// unit form, the first cut by z² = z³ = 0.
    pub fn l0() -> Scene {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Scene {
            curves: vec![
                Named::new("sigma1", ParamCurve::complex_line([zero; 3], [one, zero, zero])),
                Named::new("sigma2", ParamCurve::complex_line([zero, zero, one], [zero, one, zero])),
            ],
            forms: vec![
                Named::new("theta1", OneForm::constant("sigma1", one)),
                Named::new("theta2", OneForm::constant("sigma2", one)),
            ],
            ambient: AmbientForm::standard(),
            cuts: vec![Named::new(
                "S1",
                SurfaceCut {
                    f1: Poly3::coordinate(1),
                    f2: Some(Poly3::coordinate(2)),
                    contains_curve: "sigma1".into(),
                },
            )],
            constants: None,
            atiyah: None,
        }
    }

    /// Parses and validates a scene document.
    pub fn from_json(text: &str) -> Result<Scene> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let wire: wire::Scene = serde_path_to_error::deserialize(de).map_err(|e| Error::SceneInvalid {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        let scene = wire.into_scene()?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Scene> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::SceneInvalid {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Scene::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&wire::Scene::from_scene(self)).expect("scene serializes")
    }

    /// Checks every type invariant of the scene and its members.
    pub fn validate(&self) -> Result<()> {
        let at = |what: String| {
            move |e: Error| match e {
                Error::InvariantViolated { invariant, detail } => Error::InvariantViolated {
                    invariant,
                    detail: format!("{what}: {detail}"),
                },
                e => e,
            }
        };
        for (i, c) in self.curves.iter().enumerate() {
            if self.curves[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::invariant(
                    "Scene.names",
                    format!("curve name `{}` repeated", c.name),
                ));
            }
            c.value.validate().map_err(at(format!("curves[{i}] `{}`", c.name)))?;
            self.ambient
                .validate_on(&c.name, &c.value)
                .map_err(at("ambient".into()))?;
        }
        for (i, f) in self.forms.iter().enumerate() {
            let curve = self.curve(&f.value.curve).ok_or_else(|| {
                Error::invariant(
                    "Scene.references",
                    format!("forms[{i}] `{}` references unknown curve `{}`", f.name, f.value.curve),
                )
            })?;
            f.value
                .validate(curve)
                .map_err(at(format!("forms[{i}] `{}`", f.name)))?;
        }
        for (i, c) in self.cuts.iter().enumerate() {
            let curve = self.curve(&c.value.contains_curve).ok_or_else(|| {
                Error::invariant(
                    "Scene.references",
                    format!(
                        "cuts[{i}] `{}` references unknown curve `{}`",
                        c.name, c.value.contains_curve
                    ),
                )
            })?;
            c.value.validate(curve).map_err(at(format!("cuts[{i}] `{}`", c.name)))?;
        }
        if let Some(k) = &self.constants {
            k.validate().map_err(at("constants".into()))?;
        }
        Ok(())
    }
}

mod wire {
    use super::*;

    #[derive(Clone, Copy, Serialize, Deserialize)]
    pub struct C(f64, f64);

    impl From<C> for Complex64 {
        fn from(c: C) -> Self {
            Complex64::new(c.0, c.1)
        }
    }

    impl From<Complex64> for C {
        fn from(c: Complex64) -> Self {
            C(c.re, c.im)
        }
    }

    fn cs(v: &[Complex64]) -> Vec<C> {
        v.iter().map(|&c| c.into()).collect()
    }

    fn from_cs(v: Vec<C>) -> Vec<Complex64> {
        v.into_iter().map(Into::into).collect()
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Scene {
        pub curves: Vec<Curve>,
        #[serde(default)]
        pub forms: Vec<Form>,
        #[serde(default)]
        pub ambient: Option<Ambient>,
        #[serde(default)]
        pub cuts: Vec<Cut>,
        #[serde(default)]
        pub constants: Option<Constants>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub atiyah: Option<Atiyah>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Curve {
        pub name: String,
        pub kind: Kind,
        pub map: Map,
        pub domain: Domain,
        #[serde(default)]
        pub marked_points: Vec<C>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(rename_all = "snake_case")]
    pub enum Kind {
        RealClosed,
        RealOpen,
        ComplexAffine,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(rename_all = "snake_case", deny_unknown_fields)]
    pub enum Map {
        Polynomial([Vec<C>; 3]),
        Fourier(Fourier),
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Fourier {
        pub constant: Vec3,
        pub harmonics: Vec<Term>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Term {
        pub k: u32,
        pub cos: Vec3,
        pub sin: Vec3,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(rename_all = "snake_case", deny_unknown_fields)]
    pub enum Domain {
        UnitInterval,
        Truncation {
            #[serde(default)]
            radius: Option<f64>,
        },
        Rect {
            re: [f64; 2],
            im: [f64; 2],
        },
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Form {
        pub name: String,
        pub curve: String,
        pub coeff: Coeff,
        #[serde(default)]
        pub poles: Vec<C>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Coeff {
        pub numerator: Vec<C>,
        #[serde(default = "one")]
        pub denominator: Vec<C>,
    }

    fn one() -> Vec<C> {
        vec![C(1.0, 0.0)]
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Monomial {
        pub exponents: [u32; 3],
        pub coeff: C,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Ambient {
        pub numerator: Vec<Monomial>,
        pub denominator: Vec<Monomial>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Cut {
        pub name: String,
        #[serde(rename = "F1")]
        pub f1: Vec<Monomial>,
        #[serde(rename = "F2", default, skip_serializing_if = "Option::is_none")]
        pub f2: Option<Vec<Monomial>>,
        pub contains_curve: String,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Constants {
        #[serde(rename = "C3")]
        pub c3: f64,
        #[serde(default)]
        pub kappa_line: Option<C>,
        #[serde(default)]
        pub kappa_xmethod: Option<C>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Atiyah {
        pub l: [[C; 4]; 4],
        pub p: [[C; 4]; 4],
    }

    fn poly3(terms: Vec<Monomial>) -> Poly3 {
        Poly3::new(terms.into_iter().map(|m| (m.exponents, m.coeff.into())))
    }

    fn monomials(p: &Poly3) -> Vec<Monomial> {
        p.terms()
            .iter()
            .map(|&(exponents, c)| Monomial {
                exponents,
                coeff: c.into(),
            })
            .collect()
    }

    impl Constants {
        pub fn from_constants(k: &NormalizationConstants) -> Self {
            Constants {
                c3: k.c3,
                kappa_line: k.kappa_line.map(Into::into),
                kappa_xmethod: k.kappa_xmethod.map(Into::into),
            }
        }

        pub fn into_constants(self) -> NormalizationConstants {
            NormalizationConstants {
                c3: self.c3,
                kappa_line: self.kappa_line.map(Into::into),
                kappa_xmethod: self.kappa_xmethod.map(Into::into),
            }
        }
    }

    impl Scene {
        pub fn into_scene(self) -> Result<super::Scene> {
            let curves = self
                .curves
                .into_iter()
                .map(|c| {
                    let kind = match c.kind {
                        Kind::RealClosed => CurveKind::RealClosed,
                        Kind::RealOpen => CurveKind::RealOpen,
                        Kind::ComplexAffine => CurveKind::ComplexAffine,
                    };
                    let map = match c.map {
                        Map::Polynomial(comps) => CurveMap::Polynomial(comps.map(|p| Poly::new(from_cs(p)))),
                        Map::Fourier(f) => CurveMap::Fourier(FourierSeries {
                            constant: f.constant,
                            harmonics: f
                                .harmonics
                                .into_iter()
                                .map(|t| Harmonic {
                                    k: t.k,
                                    cos: t.cos,
                                    sin: t.sin,
                                })
                                .collect(),
                        }),
                    };
                    let domain = match c.domain {
                        Domain::UnitInterval => ParamDomain::UnitInterval,
                        Domain::Truncation { radius } => ParamDomain::Truncated { radius },
                        Domain::Rect { re, im } => ParamDomain::Rect { re, im },
                    };
                    Named::new(
                        c.name,
                        ParamCurve {
                            kind,
                            map,
                            domain,
                            marked_points: from_cs(c.marked_points),
                        },
                    )
                })
                .collect();
            let forms = self
                .forms
                .into_iter()
                .map(|f| {
                    Named::new(
                        f.name,
                        OneForm {
                            curve: f.curve,
                            coeff: Rational::new(
                                Poly::new(from_cs(f.coeff.numerator)),
                                Poly::new(from_cs(f.coeff.denominator)),
                            ),
                            poles: from_cs(f.poles),
                        },
                    )
                })
                .collect();
            let ambient = self.ambient.map_or_else(AmbientForm::standard, |a| AmbientForm {
                numerator: poly3(a.numerator),
                denominator: poly3(a.denominator),
            });
            let cuts = self
                .cuts
                .into_iter()
                .map(|c| {
                    Named::new(
                        c.name,
                        SurfaceCut {
                            f1: poly3(c.f1),
                            f2: c.f2.map(poly3),
                            contains_curve: c.contains_curve,
                        },
                    )
                })
                .collect();
            Ok(super::Scene {
                curves,
                forms,
                ambient,
                cuts,
                constants: self.constants.map(Constants::into_constants),
                atiyah: self.atiyah.map(|a| AtiyahInput {
                    l: a.l.map(|row| row.map(Into::into)),
                    p: a.p.map(|row| row.map(Into::into)),
                }),
            })
        }

        pub fn from_scene(s: &super::Scene) -> Self {
            Scene {
                curves: s
                    .curves
                    .iter()
                    .map(|c| Curve {
                        name: c.name.clone(),
                        kind: match c.value.kind {
                            CurveKind::RealClosed => Kind::RealClosed,
                            CurveKind::RealOpen => Kind::RealOpen,
                            CurveKind::ComplexAffine => Kind::ComplexAffine,
                        },
                        map: match &c.value.map {
                            CurveMap::Polynomial(p) => Map::Polynomial(p.clone().map(|p| cs(p.coeffs()))),
                            CurveMap::Fourier(f) => Map::Fourier(Fourier {
                                constant: f.constant,
                                harmonics: f
                                    .harmonics
                                    .iter()
                                    .map(|h| Term {
                                        k: h.k,
                                        cos: h.cos,
                                        sin: h.sin,
                                    })
                                    .collect(),
                            }),
                        },
                        domain: match &c.value.domain {
                            ParamDomain::UnitInterval => Domain::UnitInterval,
                            ParamDomain::Truncated { radius } => Domain::Truncation { radius: *radius },
                            ParamDomain::Rect { re, im } => Domain::Rect { re: *re, im: *im },
                        },
                        marked_points: cs(&c.value.marked_points),
                    })
                    .collect(),
                forms: s
                    .forms
                    .iter()
                    .map(|f| Form {
                        name: f.name.clone(),
                        curve: f.value.curve.clone(),
                        coeff: Coeff {
                            numerator: cs(f.value.coeff.num.coeffs()),
                            denominator: cs(f.value.coeff.den.coeffs()),
                        },
                        poles: cs(&f.value.poles),
                    })
                    .collect(),
                ambient: Some(Ambient {
                    numerator: monomials(&s.ambient.numerator),
                    denominator: monomials(&s.ambient.denominator),
                }),
                cuts: s
                    .cuts
                    .iter()
                    .map(|c| Cut {
                        name: c.name.clone(),
                        f1: monomials(&c.value.f1),
                        f2: c.value.f2.as_ref().map(monomials),
                        contains_curve: c.value.contains_curve.clone(),
                    })
                    .collect(),
                constants: s.constants.as_ref().map(Constants::from_constants),
                atiyah: s.atiyah.as_ref().map(|a| Atiyah {
                    l: a.l.map(|row| row.map(Into::into)),
                    p: a.p.map(|row| row.map(Into::into)),
                }),
            }
        }
    }
}

/// Reads a constants file: `{"C3": .., "kappa_line": [re, im], "kappa_xmethod": [re, im]}`.
pub fn constants_from_json(text: &str) -> Result<NormalizationConstants> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let wire: wire::Constants = serde_path_to_error::deserialize(de).map_err(|e| Error::SceneInvalid {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let k = wire.into_constants();
    k.validate()?;
    Ok(k)
}

pub fn constants_to_json(k: &NormalizationConstants) -> String {
    serde_json::to_string_pretty(&wire::Constants::from_constants(k)).expect("constants serialize")
}
