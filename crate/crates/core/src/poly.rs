//! Dense complex polynomials in one variable, sparse polynomials in
//! (z¹, z², z³), and univariate rational functions.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::CVec3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Univariate polynomial, coefficients lowest degree first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// `c0 + c1·t`
    pub fn linear(c0: Complex64, c1: Complex64) -> Self {
        Poly::new(vec![c0, c1])
    }

    /// `(t - root)`
    pub fn root_factor(root: Complex64) -> Self {
        Poly::linear(-root, ONE)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * t + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, t: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * t + p;
            p = p * t + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(ONE), |acc, _| &acc * self)
    }

    /// Drops leading coefficients below `rel · max|c|`.
    pub fn trimmed(&self, rel: f64) -> Poly {
        let cut = rel * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Quotient and remainder of division by `divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![ZERO; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
            rem[k + dd] = ZERO;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// All complex roots, from the eigenvalues of the companion matrix,
    /// Newton-polished. Leading coefficients below 1e-13 relative are
    /// treated as zero.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let p = self.trimmed(1e-13);
        let n = match p.degree() {
            None | Some(0) => return Ok(Vec::new()),
            Some(n) => n,
        };
        let lead = p.coeffs[n];
        if n == 1 {
            return Ok(vec![-p.coeffs[0] / lead]);
        }
        let mut companion = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = ONE;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -p.coeffs[i] / lead;
        }
        let schur = Schur::try_new(companion, 1e-15, 10_000).ok_or(Error::RootFinding { degree: n })?;
        let eig = schur.eigenvalues().ok_or(Error::RootFinding { degree: n })?;
        Ok(eig.iter().map(|&z| p.polish_root(z)).collect())
    }

    fn polish_root(&self, mut z: Complex64) -> Complex64 {
        for _ in 0..50 {
            let (f, df) = self.eval_with_derivative(z);
            if df == ZERO {
                break;
            }
            let step = f / df;
            if !step.is_finite() {
                break;
            }
            z -= step;
            if step.norm() <= 1e-15 * z.norm().max(1.0) {
                break;
            }
        }
        z
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-ONE)
    }
}

/// Sparse polynomial in (z¹, z², z³); exponents index the coordinates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly3 {
    terms: Vec<([u32; 3], Complex64)>,
}

impl Poly3 {
    /// Like terms are merged and zero terms dropped; term order is canonical.
    pub fn new(terms: impl IntoIterator<Item = ([u32; 3], Complex64)>) -> Self {
        let mut merged: Vec<([u32; 3], Complex64)> = Vec::new();
        for (e, c) in terms {
            match merged.iter_mut().find(|(f, _)| *f == e) {
                Some((_, acc)) => *acc += c,
                None => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| *c != ZERO);
        merged.sort_by_key(|(e, _)| (e.iter().sum::<u32>(), *e));
        Poly3 { terms: merged }
    }

    pub fn zero() -> Self {
        Poly3 { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly3::new([([0, 0, 0], c)])
    }

    pub fn one() -> Self {
        Poly3::constant(ONE)
    }

    /// The coordinate function z^(axis+1).
    pub fn coordinate(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Poly3::new([(e, ONE)])
    }

    /// `c0 + a·z`
    pub fn affine(c0: Complex64, a: CVec3) -> Self {
        Poly3::new(std::iter::once(([0, 0, 0], c0)).chain((0..3).map(|k| (Poly3::coordinate(k).terms[0].0, a[k]))))
    }

    pub fn terms(&self) -> &[([u32; 3], Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: &CVec3) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * z[0].powu(e[0]) * z[1].powu(e[1]) * z[2].powu(e[2]))
            .sum()
    }

    pub fn gradient(&self, z: &CVec3) -> CVec3 {
        let mut g = [ZERO; 3];
        for (e, c) in &self.terms {
            for k in 0..3 {
                if e[k] == 0 {
                    continue;
                }
                let mut term = c * e[k] as f64;
                for j in 0..3 {
                    let p = if j == k { e[j] - 1 } else { e[j] };
                    term *= z[j].powu(p);
                }
                g[k] += term;
            }
        }
        g
    }

    pub fn scale(&self, s: Complex64) -> Poly3 {
        Poly3::new(self.terms.iter().map(|&(e, c)| (e, c * s)))
    }

    /// Univariate polynomial `t ↦ self(γ(t))` for a polynomial curve γ.
    pub fn compose(&self, curve: &[Poly; 3]) -> Poly {
        let max_e = self
            .terms
            .iter()
            .flat_map(|(e, _)| e.iter().copied())
            .max()
            .unwrap_or(0);
        let powers: Vec<Vec<Poly>> = curve
            .iter()
            .map(|g| {
                let mut p = vec![Poly::constant(ONE)];
                for k in 1..=max_e as usize {
                    let next = &p[k - 1] * g;
                    p.push(next);
                }
                p
            })
            .collect();
        self.terms.iter().fold(Poly::zero(), |acc, (e, c)| {
            let term = &(&powers[0][e[0] as usize] * &powers[1][e[1] as usize]) * &powers[2][e[2] as usize];
            &acc + &term.scale(*c)
        })
    }

    /// Substitutes the univariate `p` evaluated at the polynomial `arg`.
    pub fn from_univariate(p: &Poly, arg: &Poly3) -> Poly3 {
        p.coeffs()
            .iter()
            .rev()
            .fold(Poly3::zero(), |acc, &c| &(&acc * arg) + &Poly3::constant(c))
    }
}

impl Add for &Poly3 {
    type Output = Poly3;
    fn add(self, rhs: &Poly3) -> Poly3 {
        Poly3::new(self.terms.iter().chain(rhs.terms.iter()).copied())
    }
}

impl Mul for &Poly3 {
    type Output = Poly3;
    fn mul(self, rhs: &Poly3) -> Poly3 {
        Poly3::new(self.terms.iter().flat_map(|(ea, ca)| {
            rhs.terms
                .iter()
                .map(move |(eb, cb)| ([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb))
        }))
    }
}

/// Quotient of two univariate polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub num: Poly,
    pub den: Poly,
}

impl Rational {
    pub fn new(num: Poly, den: Poly) -> Self {
        Rational { num, den }
    }

    pub fn polynomial(num: Poly) -> Self {
        Rational {
            num,
            den: Poly::constant(ONE),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Rational::polynomial(Poly::constant(c))
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.num.eval(t) / self.den.eval(t)
    }

    pub fn scale(&self, s: Complex64) -> Rational {
        Rational::new(self.num.scale(s), self.den.clone())
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        Rational::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Poles (roots of the denominator), sorted by (re, im).
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        let mut r = self.den.roots()?;
        sort_complex(&mut r);
        Ok(r)
    }

    /// Residue at a simple root `p` of the denominator: num(p)/den'(p).
    pub fn simple_residue(&self, p: Complex64) -> Result<Complex64> {
        let (_, dden) = self.den.eval_with_derivative(p);
        if dden.norm() < 1e-8 * self.den.max_abs_coeff() {
            return Err(Error::NonSimpleRoot { t: p });
        }
        Ok(self.num.eval(p) / dden)
    }

    /// Residue of `self(t) dt` at t = ∞, i.e. minus the coefficient of 1/t
    /// in the expansion at infinity.
    pub fn residue_at_infinity(&self) -> Complex64 {
        let den = self.den.trimmed(1e-14);
        let m = den.degree().expect("zero denominator");
        if m == 0 {
            return ZERO;
        }
        let (_, rem) = self.num.div_rem(&den);
        -rem.coeff(m - 1) / den.coeff(m)
    }

    /// Sum of residues at all finite poles (assumed simple) and at ∞.
    pub fn total_residue(&self) -> Result<Complex64> {
        let finite: Complex64 = self
            .poles()?
            .into_iter()
            .map(|p| self.simple_residue(p))
            .sum::<Result<Complex64>>()?;
        Ok(finite + self.residue_at_infinity())
    }
}

pub(crate) fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}
