//! Curves, forms and scenes shared by every computation route.

mod curve;
mod form;
mod scene;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub use curve::{CurveKind, CurveMap, FourierSeries, Harmonic, ParamCurve, ParamDomain};
pub use form::{c3, AmbientForm, NormalizationConstants, OneForm, SurfaceCut};
pub use scene::{constants_from_json, constants_to_json, AtiyahInput, Named, Scene};

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

/// Determinant of the 3×3 matrix with columns `a`, `b`, `c`.
pub fn det3<T>(a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Σᵢ covectorᵢ·vectorᵢ (no conjugation).
pub fn pair<T>(covector: &[T; 3], vector: &[T; 3]) -> T
where
    T: Copy + Add<Output = T> + Mul<Output = T>,
{
    covector[0] * vector[0] + covector[1] * vector[1] + covector[2] * vector[2]
}

pub fn sub3<T: Copy + Sub<Output = T>>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add3<T: Copy + Add<Output = T>>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale3<T: Copy + Mul<Output = T>>(s: T, a: &[T; 3]) -> [T; 3] {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn cross<T>(a: &[T; 3], b: &[T; 3]) -> [T; 3]
where
    T: Copy + Sub<Output = T> + Mul<Output = T>,
{
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: &Vec3) -> f64 {
    pair(a, a).sqrt()
}

/// Hermitian norm squared Σ|aᵢ|².
pub fn cnorm_sqr(a: &CVec3) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn complexify(a: &Vec3) -> CVec3 {
    a.map(|x| Complex64::new(x, 0.0))
}
