//! Hadamard coin, plain and dressed by a momentum phase.
//!
//! Coin basis index 0 is the `j = +1` (right-moving) state `|1⟩`, index 1 is
//! `j = -1`. With `|k⟩ = N^{-1/2} Σ_x e^{2πixk/N}|x⟩`, the shift acts on
//! momentum states as `S|k, j⟩ = e^{-2πijk/N}|k, j⟩`, which gives the row
//! phases of [`hadamard_coin_momentum`].

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Result, WalkError};
use crate::linalg::{cr, unit_root, Mat2};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinMatrix {
    entries: Mat2,
    momentum: Option<usize>,
}

impl CoinMatrix {
    pub fn entries(&self) -> &Mat2 {
        &self.entries
    }

    pub fn momentum(&self) -> Option<usize> {
        self.momentum
    }

    /// Largest entrywise deviation of `C†C` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.entries.adjoint() * self.entries;
        crate::linalg::max_abs_diff(&g, &Mat2::identity())
    }
}

/// `(1/√2)·[[1, 1], [1, -1]]`.
pub fn hadamard() -> CoinMatrix {
    let h = cr(FRAC_1_SQRT_2);
    CoinMatrix {
        entries: Mat2::new(h, h, h, -h),
        momentum: None,
    }
}

/// `C_k = diag(e^{-2πik/N}, e^{2πik/N})·H`.
pub fn hadamard_coin_momentum(k: usize, n_nodes: usize) -> Result<CoinMatrix> {
    if k >= n_nodes {
        return Err(WalkError::domain(
            "momentum",
            format!("k = {k} not in 0..{n_nodes}"),
        ));
    }
    let phase = unit_root(-(k as i64), n_nodes);
    let h = FRAC_1_SQRT_2;
    let up = phase * h;
    let down = phase.conj() * h;
    Ok(CoinMatrix {
        entries: Mat2::new(up, up, down, -down),
        momentum: Some(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};

    #[test]
    fn zero_momentum_is_plain_hadamard() {
        for n in [2, 5, 64] {
            let ck = hadamard_coin_momentum(0, n).unwrap();
            assert!(max_abs_diff(ck.entries(), hadamard().entries()) < 1e-16);
        }
    }

    #[test]
    fn half_momentum_flips_sign() {
        let ck = hadamard_coin_momentum(3, 6).unwrap();
        let h = FRAC_1_SQRT_2;
        let expect = Mat2::new(cr(-h), cr(-h), cr(-h), cr(h));
        assert!(max_abs_diff(ck.entries(), &expect) < 1e-15);
    }

    #[test]
    fn quarter_momentum_first_row() {
        let ck = hadamard_coin_momentum(1, 4).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((ck.entries()[(0, 0)] - c(0.0, -h)).norm() < 1e-15);
        assert!((ck.entries()[(0, 1)] - c(0.0, -h)).norm() < 1e-15);
        assert!(ck.unitarity_defect() < 1e-13);
    }

    #[test]
    fn unitary_for_all_momenta() {
        for n in 2..=64 {
            for k in 0..n {
                assert!(hadamard_coin_momentum(k, n).unwrap().unitarity_defect() < 1e-13);
            }
        }
    }

    #[test]
    fn momentum_out_of_range() {
        assert!(matches!(
            hadamard_coin_momentum(5, 5),
            Err(WalkError::Domain { .. })
        ));
    }
}
