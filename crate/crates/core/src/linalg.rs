//! Small fixed-size complex matrix aliases and helpers shared by the crate.

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::C64;

pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Vec4 = Vector4<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{2πi m/n}`, exact at multiples of a quarter turn. The angle is split
/// into whole quarter turns (applied as exact rotations) plus a remainder
/// below π/2.
pub fn unit_root(m: i64, n: usize) -> C64 {
    let n = n as i64;
    let r = m.rem_euclid(n);
    let (quarter, rem) = ((4 * r) / n, (4 * r) % n);
    let theta = std::f64::consts::PI * rem as f64 / (2 * n) as f64;
    let z = C64::new(theta.cos(), theta.sin());
    match quarter {
        0 => z,
        1 => C64::new(-z.im, z.re),
        2 => -z,
        _ => C64::new(z.im, -z.re),
    }
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<R, Cc, S1, S2>(
    a: &nalgebra::Matrix<C64, R, Cc, S1>,
    b: &nalgebra::Matrix<C64, R, Cc, S2>,
) -> f64
where
    R: nalgebra::Dim,
    Cc: nalgebra::Dim,
    S1: nalgebra::storage::Storage<C64, R, Cc>,
    S2: nalgebra::storage::Storage<C64, R, Cc>,
{
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `A^n` by repeated squaring.
pub fn mat4_pow(a: &Mat4, mut n: u64) -> Mat4 {
    let mut result = Mat4::identity();
    let mut base = *a;
    while n > 0 {
        if n & 1 == 1 {
            result *= base;
        }
        base = base * base;
        n >>= 1;
    }
    result
}

/// Frobenius norm, i.e. `sqrt(<M, M>)` under the trace inner product.
pub fn frobenius(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
