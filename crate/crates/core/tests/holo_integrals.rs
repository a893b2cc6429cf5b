use std::f64::consts::PI;

use holink::geometry::{det3, sub3, CVec3, CurveKind, CurveMap, OneForm, ParamCurve, ParamDomain, Scene};
use holink::holo::{complex_linking_number, holo_linking_integral, BmContext};
use holink::poly::Poly;
use holink::quadrature::QuadConfig;
use holink::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const RAW: BmContext = BmContext {
    c3: PI * PI * PI,
    include_cn: false,
};

fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    c(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn rand_vec(rng: &mut ChaCha8Rng, r: f64) -> CVec3 {
    std::array::from_fn(|_| rand_c(rng, r))
}

/// Quadratic curve over the square [−1, 1]², centred near `offset`.
fn patch(rng: &mut ChaCha8Rng, offset: CVec3) -> ParamCurve {
    let comps = std::array::from_fn(|k| {
        let mut e = [c(0.0, 0.0); 3];
        e[k] = c(1.0, 0.0);
        Poly::new(vec![offset[k], rand_c(rng, 0.3) + e[(k + 1) % 3], rand_c(rng, 0.15)])
    });
    ParamCurve {
        kind: CurveKind::ComplexAffine,
        map: CurveMap::Polynomial(comps),
        domain: ParamDomain::Rect {
            re: [-1.0, 1.0],
            im: [-1.0, 1.0],
        },
        marked_points: Vec::new(),
    }
}

fn form(rng: &mut ChaCha8Rng, curve: &str) -> OneForm {
    OneForm::polynomial(curve, Poly::new(vec![rand_c(rng, 1.0), rand_c(rng, 0.5)]))
}

#[test]
fn random_lines_follow_the_determinant_law() {
    // ∬ over two complex lines = −π²/2 · c₁c₂ / det(e₁, e₂, p₂ − p₁)
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = QuadConfig::default();
    let mut done = 0;
    while done < 3 {
        let (p1, e1, p2, e2) = (
            rand_vec(&mut rng, 1.0),
            rand_vec(&mut rng, 1.0),
            rand_vec(&mut rng, 1.0),
            rand_vec(&mut rng, 1.0),
        );
        let d = det3(&e1, &e2, &sub3(&p2, &p1));
        if d.norm() < 0.5 {
            continue;
        }
        let (c1, c2) = (rand_c(&mut rng, 1.0), rand_c(&mut rng, 1.0));
        let s1 = ParamCurve::complex_line(p1, e1);
        let s2 = ParamCurve::complex_line(p2, e2);
        let r = holo_linking_integral(
            (&s1, &OneForm::constant("a", c1)),
            (&s2, &OneForm::constant("b", c2)),
            &RAW,
            &cfg,
        )
        .unwrap();
        let want = -PI * PI / 2.0 * c1 * c2 / d;
        assert!((r.value - want).norm() <= 2e-3 * want.norm(), "{} vs {want}", r.value);
        done += 1;
    }
}

#[test]
fn symmetric_and_bilinear_on_random_patches() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = QuadConfig {
        tol: 1e-8,
        ..Default::default()
    };
    for _ in 0..4 {
        let a = patch(&mut rng, [c(0.0, 0.0); 3]);
        let b = patch(&mut rng, [c(0.2, 0.1), c(-0.3, 0.0), c(3.0, 0.5)]);
        let (ta, tb) = (form(&mut rng, "a"), form(&mut rng, "b"));
        let ab = holo_linking_integral((&a, &ta), (&b, &tb), &RAW, &cfg).unwrap();
        let ba = holo_linking_integral((&b, &tb), (&a, &ta), &RAW, &cfg).unwrap();
        assert!((ab.value - ba.value).norm() <= ab.err_estimate + ba.err_estimate + 1e-15);

        let tb2 = form(&mut rng, "b");
        let (x, y) = (rand_c(&mut rng, 2.0), rand_c(&mut rng, 2.0));
        let mix = holo_linking_integral((&a, &ta), (&b, &tb.combine(x, &tb2, y)), &RAW, &cfg).unwrap();
        let ab2 = holo_linking_integral((&a, &ta), (&b, &tb2), &RAW, &cfg).unwrap();
        let errs = [
            mix.err_estimate,
            ab.err_estimate * x.norm(),
            ab2.err_estimate * y.norm(),
        ];
        let bound = 3.0 * errs.iter().cloned().fold(0.0, f64::max) + 1e-14 * mix.value.norm();
        assert!((mix.value - x * ab.value - y * ab2.value).norm() <= bound);
    }
}

/// ∬ dA dA / (1 + |u|² + |v|²)³ over two disks of radius R, by a midpoint
/// rule in (|u|², |v|²).
fn brute_force_l0(r: f64, n: usize) -> f64 {
    let h = r * r / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let s = (i as f64 + 0.5) * h;
        for j in 0..n {
            let t = (j as f64 + 0.5) * h;
            sum += (1.0 + s + t).powi(-3);
        }
    }
    PI * PI * sum * h * h
}

#[test]
fn complex_linking_number_matches_brute_force() {
    let scene = Scene::l0();
    let radius = ParamDomain::Truncated { radius: Some(10.0) };
    let a = scene.curves[0].value.clone().with_domain(radius.clone());
    let b = scene.curves[1].value.clone().with_domain(radius);
    let r = complex_linking_number(&a, &b, &RAW, &QuadConfig::default()).unwrap();
    let at_ten = r.truncation.as_ref().unwrap().at_radius.re;
    // midpoint error is O(h²): combine 4000² and 2000² grids
    let brute = (4.0 * brute_force_l0(10.0, 4000) - brute_force_l0(10.0, 2000)) / 3.0;
    assert!((at_ten - brute).abs() <= 1e-6 * brute, "{at_ten} vs {brute}");
    let refined = r.truncation.as_ref().unwrap().at_double.re;
    assert!((refined - at_ten).abs() <= 1.5 * r.tail_estimate.max(1e-12));

    let swapped = complex_linking_number(&b, &a, &RAW, &QuadConfig::default()).unwrap();
    assert!((swapped.value - r.value).norm() <= r.err_estimate + swapped.err_estimate + 1e-12);
    let shift = [c(1.0, 0.0); 3];
    let moved =
        complex_linking_number(&a.translated(shift), &b.translated(shift), &RAW, &QuadConfig::default()).unwrap();
    assert!((moved.value - r.value).norm() <= r.err_estimate + moved.err_estimate + 1e-12);
}

#[test]
fn l0_is_stable_under_doubling_the_radius() {
    let scene = Scene::l0();
    let (a, b) = (&scene.curves[0].value, &scene.curves[1].value);
    let (fa, fb) = (&scene.forms[0].value, &scene.forms[1].value);
    let at = |r: f64| {
        let cfg = QuadConfig {
            truncation_radius: r,
            ..Default::default()
        };
        holo_linking_integral((a, fa), (b, fb), &BmContext::default(), &cfg).unwrap()
    };
    let (r40, r80) = (at(40.0), at(80.0));
    assert!((r40.value - r80.value).norm() <= r40.tail_estimate + r40.err_estimate);
    let doubled = holo_linking_integral(
        (a, &fa.scaled(c(2.0, 0.0))),
        (b, fb),
        &BmContext::default(),
        &QuadConfig::default(),
    )
    .unwrap();
    assert!((doubled.value - 2.0 * r40.value).norm() <= doubled.err_estimate + 2.0 * r40.err_estimate);
}
