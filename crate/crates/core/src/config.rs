use std::fmt;

use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::linalg::{c, cr};
use crate::pauli::PauliVector;
use crate::C64;

const NORM_TOL: f64 = 1e-12;

/// Initial coin state, amplitudes in the order `(|+1⟩, |-1⟩)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoinState {
    amplitudes: [C64; 2],
}

impl CoinState {
    /// `|1⟩`, the right-moving coin state.
    pub fn up() -> Self {
        Self {
            amplitudes: [cr(1.0), cr(0.0)],
        }
    }

    /// `|-1⟩`.
    pub fn down() -> Self {
        Self {
            amplitudes: [cr(0.0), cr(1.0)],
        }
    }

    /// `(|-1⟩ + i|1⟩)/√2`, the state whose coherent Hadamard walk on the
    /// line is symmetric.
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: [c(0.0, h), cr(h)],
        }
    }

    /// Fails unless the amplitudes have unit norm within 1e-12.
    pub fn new(amplitudes: [C64; 2]) -> Result<Self> {
        let norm = (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr()).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(WalkError::domain(
                "initial coin",
                format!("norm {norm} is not 1"),
            ));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm. Returns the state and the norm it had.
    pub fn normalized(amplitudes: [C64; 2]) -> Result<(Self, f64)> {
        let norm = (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(WalkError::domain(
                "initial coin",
                "zero or non-finite amplitudes",
            ));
        }
        Ok((
            Self {
                amplitudes: amplitudes.map(|a| a / norm),
            },
            norm,
        ))
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amplitudes
    }

    /// Pauli coordinates of `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> PauliVector {
        PauliVector::projector(self.amplitudes)
    }

    /// True if this is `|1⟩` up to a global phase.
    pub fn is_up(&self) -> bool {
        self.amplitudes[1].norm() < NORM_TOL
    }
}

impl fmt::Display for CoinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.amplitudes;
        write!(f, "({}{:+}i)|+1> + ({}{:+}i)|-1>", a.re, a.im, b.re, b.im)
    }
}

/// Full parameterization of a walk: cycle length, decoherence rate and
/// initial coin. The walker always launches from node 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WalkConfig {
    n_nodes: usize,
    decoherence_rate: f64,
    initial_coin: CoinState,
}

impl WalkConfig {
    pub const LAUNCH_POSITION: usize = 0;

    pub fn new(n_nodes: usize, decoherence_rate: f64, initial_coin: CoinState) -> Result<Self> {
        if n_nodes < 2 {
            return Err(WalkError::domain(
                "cycle length",
                format!("N = {n_nodes} < 2"),
            ));
        }
        if !(0.0..=1.0).contains(&decoherence_rate) {
            return Err(WalkError::domain(
                "decoherence rate",
                format!("p = {decoherence_rate} not in [0, 1]"),
            ));
        }
        let initial_coin = CoinState::new(initial_coin.amplitudes)?;
        Ok(Self {
            n_nodes,
            decoherence_rate,
            initial_coin,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn decoherence_rate(&self) -> f64 {
        self.decoherence_rate
    }

    pub fn initial_coin(&self) -> CoinState {
        self.initial_coin
    }

    pub fn is_even(&self) -> bool {
        self.n_nodes % 2 == 0
    }

    pub fn with_rate(&self, p: f64) -> Result<Self> {
        Self::new(self.n_nodes, p, self.initial_coin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(WalkConfig::new(1, 0.5, CoinState::up()).is_err());
        assert!(WalkConfig::new(2, 0.5, CoinState::up()).is_ok());
        assert!(WalkConfig::new(5, 1.01, CoinState::up()).is_err());
        assert!(WalkConfig::new(5, -0.1, CoinState::up()).is_err());
        assert!(CoinState::new([cr(1.0), cr(1.0)]).is_err());
    }

    #[test]
    fn named_states_are_normalized_projectors() {
        for s in [CoinState::up(), CoinState::down(), CoinState::balanced()] {
            let v = s.projector();
            assert!((v.trace() - cr(1.0)).norm() < 1e-15);
            assert!(v.max_imag() < 1e-15);
        }
        assert_eq!(
            CoinState::up().projector(),
            PauliVector::from_real([0.5, 0.0, 0.0, 0.5])
        );
        // (|-1⟩ + i|1⟩)/√2 has no σz component and points along -σy in this ordering.
        let b = CoinState::balanced().projector().coeffs();
        assert!((b[2] - cr(-0.5)).norm() < 1e-15 && b[3].norm() < 1e-15);
    }

    #[test]
    fn normalization_reports_old_norm() {
        let (s, norm) = CoinState::normalized([cr(3.0), c(0.0, 4.0)]).unwrap();
        assert!((norm - 5.0).abs() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, 0.8)).norm() < 1e-15);
        assert!(CoinState::normalized([cr(0.0), cr(0.0)]).is_err());
    }
}
