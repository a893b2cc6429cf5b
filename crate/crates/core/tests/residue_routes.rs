use holink::geometry::{det3, sub3, AmbientForm, CVec3, OneForm, ParamCurve, Scene, SurfaceCut};
use holink::poly::{Poly, Poly3, Rational};
use holink::residue::{lift_theta, residue_form, residue_linking, MAX_MULTIPLIER_DEGREE};
use holink::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z(axis: usize) -> Poly3 {
    Poly3::coordinate(axis)
}

fn cut(f1: Poly3, f2: Poly3) -> SurfaceCut {
    SurfaceCut {
        f1,
        f2: Some(f2),
        contains_curve: "sigma1".into(),
    }
}

fn l0() -> (ParamCurve, ParamCurve) {
    let s = Scene::l0();
    (s.curves[0].value.clone(), s.curves[1].value.clone())
}

fn residue(k: &SurfaceCut, s1: (&ParamCurve, &OneForm), s2: (&ParamCurve, &OneForm)) -> Complex64 {
    let eta = AmbientForm::standard();
    let lift = lift_theta(k, &eta, s1.1, s1.0, MAX_MULTIPLIER_DEGREE).unwrap();
    residue_linking(&lift, s2, &eta).unwrap()
}

/// Five cuts of Σ₁ = (s, 0, 0), some with nonconstant multipliers.
fn l0_cuts() -> Vec<SurfaceCut> {
    let one = Poly3::one();
    vec![
        cut(z(1), z(2)),
        cut(&z(1) + &z(2), z(2)),
        cut(
            &z(1).scale(c(2.0, 1.0)) + &z(2).scale(c(-1.0, 0.5)),
            &z(1) + &z(2).scale(c(0.0, 3.0)),
        ),
        cut(&z(1) + &(&z(2) * &z(2)), z(2)),
        cut(&z(1) * &(&one + &z(0)), z(2)),
        cut(&z(1) + &(&z(2) * &z(0)).scale(c(-1.0, 0.0)), z(2)),
    ]
}

#[test]
fn cuts_of_the_reference_curve_agree() {
    let (s1, s2) = l0();
    let t1 = OneForm::constant("sigma1", c(1.0, 0.0));
    let t2 = OneForm::constant("sigma2", c(1.0, 0.0));
    for k in l0_cuts() {
        k.validate(&s1).unwrap();
        let v = residue(&k, (&s1, &t1), (&s2, &t2));
        assert!((v - 1.0).norm() <= 1e-10, "cut {:?} gave {v}", k.f1);
    }
}

#[test]
fn role_swap_on_reference_curve() {
    let (s1, s2) = l0();
    let t1 = OneForm::constant("sigma1", c(1.0, 0.0));
    let t2 = OneForm::constant("sigma2", c(1.0, 0.0));
    // Σ₂ = (0, t, 1) is cut out by z¹ = 0 and z³ = 1
    let k2 = SurfaceCut {
        f1: z(0),
        f2: Some(&z(2) + &Poly3::constant(c(-1.0, 0.0))),
        contains_curve: "sigma2".into(),
    };
    let swapped = residue(&k2, (&s2, &t2), (&s1, &t1));
    assert!((swapped - 1.0).norm() <= 1e-9, "{swapped}");
}

fn cvec() -> impl Strategy<Value = CVec3> {
    prop::array::uniform3((-1.5..1.5f64, -1.5..1.5f64)).prop_map(|a| a.map(|(x, y)| c(x, y)))
}

fn scalar() -> impl Strategy<Value = Complex64> {
    (0.3..2.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

prop_compose! {
    fn line_pair()(p1 in cvec(), e1 in cvec(), p2 in cvec(), e2 in cvec()) -> (CVec3, CVec3, CVec3, CVec3) {
        (p1, e1, p2, e2)
    }
}

fn well_posed(p1: &CVec3, e1: &CVec3, p2: &CVec3, e2: &CVec3) -> bool {
    let n = |v: &CVec3| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    n(e1) > 0.3 && n(e2) > 0.3 && det3(e1, e2, &sub3(p2, p1)).norm() > 0.2 * n(e1) * n(e2) * n(&sub3(p2, p1)).max(0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn line_pairs_match_the_determinant_law(
        (p1, e1, p2, e2) in line_pair(), c1 in scalar(), c2 in scalar(),
    ) {
        prop_assume!(well_posed(&p1, &e1, &p2, &e2));
        let s1 = ParamCurve::complex_line(p1, e1);
        let s2 = ParamCurve::complex_line(p2, e2);
        let t1 = OneForm::constant("sigma1", c1);
        let t2 = OneForm::constant("sigma2", c2);
        let v = residue(&SurfaceCut::for_line(p1, e1, "sigma1"), (&s1, &t1), (&s2, &t2));
        let want = c1 * c2 / det3(&e1, &e2, &sub3(&p2, &p1));
        prop_assert!((v - want).norm() <= 1e-9 * want.norm(), "{} vs {}", v, want);
    }

    #[test]
    fn role_swap_on_random_lines((p1, e1, p2, e2) in line_pair(), c1 in scalar(), c2 in scalar()) {
        prop_assume!(well_posed(&p1, &e1, &p2, &e2));
        let s1 = ParamCurve::complex_line(p1, e1);
        let s2 = ParamCurve::complex_line(p2, e2);
        let t1 = OneForm::constant("sigma1", c1);
        let t2 = OneForm::constant("sigma2", c2);
        let direct = residue(&SurfaceCut::for_line(p1, e1, "sigma1"), (&s1, &t1), (&s2, &t2));
        let swapped = residue(&SurfaceCut::for_line(p2, e2, "sigma2"), (&s2, &t2), (&s1, &t1));
        prop_assert!((direct - swapped).norm() <= 1e-9 * direct.norm());
    }

    #[test]
    fn bilinear_in_both_forms(
        a in scalar(), b in scalar(),
        p in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..4),
        q in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..4),
    ) {
        let (s1, s2) = l0();
        let poly = |v: &[(f64, f64)]| Poly::new(v.iter().map(|&(x, y)| c(x, y)).collect());
        let th = OneForm::polynomial("sigma1", poly(&p));
        let th2 = OneForm::polynomial("sigma1", poly(&q));
        let dt = OneForm::constant("sigma2", c(1.0, 0.0));
        let k = cut(&z(1) + &z(2), z(2));
        let lhs = residue(&k, (&s1, &th.combine(a, &th2, b)), (&s2, &dt));
        let rhs = a * residue(&k, (&s1, &th), (&s2, &dt)) + b * residue(&k, (&s1, &th2), (&s2, &dt));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let one = OneForm::constant("sigma1", c(1.0, 0.0));
        let f = OneForm::polynomial("sigma2", poly(&p));
        let g = OneForm::polynomial("sigma2", poly(&q));
        let lhs = residue(&k, (&s1, &one), (&s2, &f.combine(a, &g, b)));
        let rhs = a * residue(&k, (&s1, &one), (&s2, &f)) + b * residue(&k, (&s1, &one), (&s2, &g));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn residues_including_infinity_cancel(
        (p1, e1, p2, e2) in line_pair(),
        theta in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..5),
    ) {
        prop_assume!(well_posed(&p1, &e1, &p2, &e2));
        let s1 = ParamCurve::complex_line(p1, e1);
        let s2 = ParamCurve::complex_line(p2, e2);
        let eta = AmbientForm::standard();
        let lift = lift_theta(&SurfaceCut::for_line(p1, e1, "sigma1"), &eta, &OneForm::constant("sigma1", c(1.0, 0.0)), &s1, 4).unwrap();
        let t2 = OneForm::polynomial("sigma2", Poly::new(theta.iter().map(|&(x, y)| c(x, y)).collect()));
        let h: Rational = residue_form(&lift, (&s2, &t2), &eta).unwrap();
        let total = h.total_residue().unwrap();
        prop_assert!(total.norm() <= 1e-10, "total residue {}", total);
    }
}
