//! The three-operator coin-dephasing Kraus family.

use crate::error::{Result, WalkError};
use crate::linalg::{cr, max_abs_diff, Mat2};

/// `Â0 = √(1-p)·σ0`, `Â1 = (√p/2)(σ0 + σz)`, `Â2 = (√p/2)(σ0 - σz)`.
///
/// With probability `p` per step the coin is measured in its basis; the
/// induced channel is `B ↦ (1-p)·B + p·diag(B)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausFamily {
    operators: [Mat2; 3],
    rate: f64,
}

pub fn build_kraus_family(p: f64) -> Result<KrausFamily> {
    if !(0.0..=1.0).contains(&p) {
        return Err(WalkError::domain(
            "decoherence rate",
            format!("p = {p} not in [0, 1]"),
        ));
    }
    let z = cr(0.0);
    let a0 = cr((1.0 - p).sqrt());
    let sp = cr(p.sqrt());
    Ok(KrausFamily {
        operators: [
            Mat2::new(a0, z, z, a0),
            Mat2::new(sp, z, z, z),
            Mat2::new(z, z, z, sp),
        ],
        rate: p,
    })
}

impl KrausFamily {
    pub fn operators(&self) -> &[Mat2; 3] {
        &self.operators
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `Σ Â_n B Â_n†`.
    pub fn apply(&self, b: &Mat2) -> Mat2 {
        self.operators.iter().map(|a| a * b * a.adjoint()).sum()
    }

    /// Largest entrywise deviation of `Σ Â_n† Â_n` from the identity.
    pub fn unitality_defect(&self) -> f64 {
        let s: Mat2 = self.operators.iter().map(|a| a.adjoint() * a).sum();
        max_abs_diff(&s, &Mat2::identity())
    }
}
