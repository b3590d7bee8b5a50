//! Pauli-basis coordinates for 2×2 complex operators.
//!
//! An operator `M` is written `M = v0·σ0 + vx·σx + vy·σy + vz·σz`, with
//! `v_i = tr(σ_i† M) / 2`.

use serde::{Deserialize, Serialize};

use crate::linalg::{c, cr, Mat2, Vec4};
use crate::C64;

/// The Pauli basis `(σ0, σx, σy, σz)` in that order.
pub fn basis() -> [Mat2; 4] {
    let z = cr(0.0);
    let one = cr(1.0);
    [
        Mat2::new(one, z, z, one),
        Mat2::new(z, one, one, z),
        Mat2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
        Mat2::new(one, z, z, -one),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliVector {
    coeffs: [C64; 4],
}

impl PauliVector {
    pub const fn new(coeffs: [C64; 4]) -> Self {
        Self { coeffs }
    }

    pub fn from_real(v: [f64; 4]) -> Self {
        Self { coeffs: v.map(cr) }
    }

    /// `v_i = tr(σ_i† m) / 2`.
    pub fn decompose(m: &Mat2) -> Self {
        // Written out: σ_i are Hermitian, so σ_i† = σ_i.
        let (a, b, cc, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let i = c(0.0, 1.0);
        Self {
            coeffs: [
                (a + d) * 0.5,
                (b + cc) * 0.5,
                (b - cc) * i * 0.5,
                (a - d) * 0.5,
            ],
        }
    }

    pub fn compose(&self) -> Mat2 {
        let [v0, vx, vy, vz] = self.coeffs;
        let i = c(0.0, 1.0);
        Mat2::new(v0 + vz, vx - i * vy, vx + i * vy, v0 - vz)
    }

    /// Coordinates of the pure-state projector `|ψ⟩⟨ψ|`.
    pub fn projector(psi: [C64; 2]) -> Self {
        let m = Mat2::new(
            psi[0] * psi[0].conj(),
            psi[0] * psi[1].conj(),
            psi[1] * psi[0].conj(),
            psi[1] * psi[1].conj(),
        );
        Self::decompose(&m)
    }

    pub fn coeffs(&self) -> [C64; 4] {
        self.coeffs
    }

    /// `tr(M) = 2·v0`.
    pub fn trace(&self) -> C64 {
        self.coeffs[0] * 2.0
    }

    /// `<M, M> = tr(M† M) = 2·Σ|v_i|²`.
    pub fn norm_sqr(&self) -> f64 {
        2.0 * self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn as_vector(&self) -> Vec4 {
        Vec4::from(self.coeffs)
    }

    pub fn from_vector(v: &Vec4) -> Self {
        Self {
            coeffs: [v[0], v[1], v[2], v[3]],
        }
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

impl From<Vec4> for PauliVector {
    fn from(v: Vec4) -> Self {
        Self::from_vector(&v)
    }
}
