//! Criterion benchmarks for `cyclewalk`; see `benches/`.

use cyclewalk::{CoinState, WalkConfig};

/// Walk on `n` nodes at rate `p`, launched with coin `|1⟩`.
pub fn config(n: usize, p: f64) -> WalkConfig {
    WalkConfig::new(n, p, CoinState::up()).expect("valid bench config")
}
