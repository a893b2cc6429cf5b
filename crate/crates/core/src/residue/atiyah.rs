//! Two disjoint lines in P³ with the twistor-space forms: Atiyah's residue
//! formula next to the geometric formula with four marked hyperplanes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

type Form4 = [Complex64; 4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtiyahResult {
    /// Σ res (z₀dz₁ − z₁dz₀)/(l₁l₂) over S₁ ∩ Σ₂.
    pub atiyah: Complex64,
    /// Σ res (η₁/η)·θ₂ over S₁ ∩ Σ₂ with all p-factors kept.
    pub holomorphic: Complex64,
    /// atiyah / holomorphic, when the latter is nonzero.
    pub ratio: Option<Complex64>,
}

fn norm4(a: &Form4) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn apply(l: &Form4, z: &Form4) -> Complex64 {
    l.iter().zip(z).map(|(a, b)| a * b).sum()
}

fn det4(m: &[Form4; 4]) -> Complex64 {
    let minor = |skip_row: usize, skip_col: usize| {
        let rows: Vec<usize> = (0..4).filter(|&r| r != skip_row).collect();
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip_col).collect();
        let e = |i: usize, j: usize| m[rows[i]][cols[j]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    (0..4)
        .map(|j| m[0][j] * minor(0, j) * if j % 2 == 0 { 1.0 } else { -1.0 })
        .sum()
}

/// Largest 2×2 minor of the pair (a, b) and its column pair.
fn max_minor(a: &Form4, b: &Form4) -> (Complex64, usize, usize) {
    let mut best = (Complex64::new(0.0, 0.0), 0, 1);
    for i in 0..4 {
        for j in i + 1..4 {
            let m = a[i] * b[j] - a[j] * b[i];
            if m.norm() > best.0.norm() {
                best = (m, i, j);
            }
        }
    }
    best
}

/// Basis (B₀, B₁) of the kernel of {a = b = 0} in C⁴.
fn kernel_basis(a: &Form4, b: &Form4) -> [Form4; 2] {
    let (m, i, j) = max_minor(a, b);
    let free: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
    std::array::from_fn(|n| {
        let f = free[n];
        let mut x = [Complex64::new(0.0, 0.0); 4];
        x[f] = Complex64::new(1.0, 0.0);
        // a_i x_i + a_j x_j = −a_f, b_i x_i + b_j x_j = −b_f
        x[i] = (-a[f] * b[j] + b[f] * a[j]) / m;
        x[j] = (-a[i] * b[f] + b[i] * a[f]) / m;
        x
    })
}

/// Residues of num/den at the roots of `at`, after deflating any root the
/// numerator and denominator share there.
fn residue_sum(num: &Poly, den: &Poly, at: &Poly) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for t in at.roots()? {
        let (mut n, mut d) = (num.clone(), den.clone());
        let small = |p: &Poly| {
            p.eval(t).norm() <= 1e-10 * p.max_abs_coeff() * t.norm().max(1.0).powi(p.degree().unwrap_or(0) as i32)
        };
        while small(&n) && small(&d) && d.degree().unwrap_or(0) > 0 {
            n = n.div_rem(&Poly::root_factor(t)).0;
            d = d.div_rem(&Poly::root_factor(t)).0;
        }
        let (_, dd) = d.eval_with_derivative(t);
        if dd.norm() < 1e-8 * d.max_abs_coeff() {
            return Err(Error::NonSimpleRoot { t });
        }
        total += n.eval(t) / dd;
    }
    Ok(total)
}

/// Linking of Σ₁ = {l₁ = l₂ = 0} and Σ₂ = {l₃ = l₄ = 0} in P³ with
/// η = η⁰/(p₁p₂p₃p₄), η₁ = η⁰/(p₁p₂l₁l₂) and θ₂ = θ₂⁰/(p₃p₄), where
/// θ₂⁰ = z₀dz₁ − z₁dz₀.
///
/// Σ₂ is parametrized as B₀ + t·B₁ from a kernel basis; when S₁ = {l₁ = 0}
/// meets Σ₂ at t = ∞ the roles of B₀ and B₁ are exchanged.
pub fn atiyah_p3(l: &[Form4; 4], p: &[Form4; 4]) -> Result<AtiyahResult> {
    let lscale: f64 = l.iter().map(norm4).product();
    if !(det4(l).norm() > 1e-12 * lscale) {
        return Err(Error::LinesIntersect);
    }
    let pscale: f64 = p.iter().map(norm4).product();
    if !(det4(p).norm() > 1e-12 * pscale) {
        return Err(Error::NonGenericHyperplanes(
            "the p-hyperplanes are not in general position".into(),
        ));
    }
    for (i, pi) in p.iter().enumerate() {
        for (j, lj) in l.iter().enumerate() {
            if max_minor(pi, lj).0.norm() <= 1e-12 * norm4(pi) * norm4(lj) {
                return Err(Error::NonGenericHyperplanes(format!(
                    "p{} coincides with l{}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let [mut b0, mut b1] = kernel_basis(&l[2], &l[3]);
    if apply(&l[0], &b1).norm() <= 1e-12 * norm4(&l[0]) * norm4(&b1) {
        std::mem::swap(&mut b0, &mut b1);
    }
    let restrict = |f: &Form4| Poly::linear(apply(f, &b0), apply(f, &b1));
    let (l1, l2) = (restrict(&l[0]), restrict(&l[1]));
    let (p3, p4) = (restrict(&p[2]), restrict(&p[3]));
    for (k, q) in [(3, &p3), (4, &p4)] {
        if q.max_abs_coeff() <= 1e-12 * norm4(&p[k - 1]) * norm4(&b0).max(norm4(&b1)) {
            return Err(Error::NonGenericHyperplanes(format!(
                "Σ₂ lies in the hyperplane p{k} = 0"
            )));
        }
    }
    // (z₀dz₁ − z₁dz₀) along B₀ + t·B₁
    let w = Poly::constant(b0[0] * b1[1] - b0[1] * b1[0]);

    let atiyah = residue_sum(&w, &(&l1 * &l2), &l1)?;
    let marked = &p3 * &p4;
    let holomorphic = residue_sum(&(&w * &marked), &(&(&l1 * &l2) * &marked), &l1)?;
    Ok(AtiyahResult {
        atiyah,
        holomorphic,
        ratio: (holomorphic.norm() > 0.0).then(|| atiyah / holomorphic),
    })
}
