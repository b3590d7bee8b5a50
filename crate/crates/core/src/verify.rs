//! The full battery of numerical checks, run by name at two size presets.
//!
//! Every check is deterministic: sampled tuples come from a fixed-seed
//! generator, so two runs produce identical reports.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{self, default_horizon, Parity};
use crate::config::{CoinState, WalkConfig};
use crate::error::{Result, WalkError};
use crate::evolution::{
    classical_reference, position_marginal, DirectWalk, FourierWalk, PositionDistribution,
};
use crate::fourier::{superop_closed_form, superop_definitional};
use crate::kraus::build_kraus_family;
use crate::linalg::{c, frobenius, max_abs_diff, Mat2};
use crate::spectral::{self, char_poly, interpolate_char_poly};

const SEED: u64 = 0x5eed_c1c1e;

/// Problem sizes for a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sizes {
    /// Largest cycle length for the evolution-based checks.
    pub max_nodes: usize,
    /// Longest trajectory for the evolution-based checks.
    pub max_steps: usize,
    pub quick: bool,
}

impl Sizes {
    pub const DEFAULT: Sizes = Sizes {
        max_nodes: 12,
        max_steps: 200,
        quick: false,
    };
    pub const QUICK: Sizes = Sizes {
        max_nodes: 7,
        max_steps: 50,
        quick: true,
    };

    fn sample_count(&self, full: usize) -> usize {
        if self.quick {
            full / 4
        } else {
            full
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    Unitality,
    Eq10,
    CharPoly,
    Contractivity,
    Classification,
    Oracle,
    Classical,
    Limit,
    GeometricSum,
    AveragedBound,
    AveragedMixing,
}

impl CheckName {
    pub const ALL: [CheckName; 11] = [
        CheckName::Unitality,
        CheckName::Eq10,
        CheckName::CharPoly,
        CheckName::Contractivity,
        CheckName::Classification,
        CheckName::Oracle,
        CheckName::Classical,
        CheckName::Limit,
        CheckName::GeometricSum,
        CheckName::AveragedBound,
        CheckName::AveragedMixing,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Unitality => "unitality",
            CheckName::Eq10 => "eq10",
            CheckName::CharPoly => "char-poly",
            CheckName::Contractivity => "contractivity",
            CheckName::Classification => "classification",
            CheckName::Oracle => "oracle",
            CheckName::Classical => "classical",
            CheckName::Limit => "limit",
            CheckName::GeometricSum => "geometric-sum",
            CheckName::AveragedBound => "averaged-bound",
            CheckName::AveragedMixing => "averaged-mixing",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| WalkError::domain("check name", format!("unknown check '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: CheckName,
    pub passed: bool,
    /// The worst observed value; the check passes iff `measured <= tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: CheckName, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }

    fn failed(name: CheckName, err: WalkError) -> Self {
        Self {
            name,
            passed: false,
            measured: f64::INFINITY,
            tolerance: 0.0,
            detail: format!("error: {err}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub sizes: Sizes,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn from_results(sizes: Sizes, checks: Vec<CheckResult>) -> Self {
        Self {
            sizes,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs the named checks in order on the current thread.
pub fn run(names: &[CheckName], sizes: Sizes) -> VerifyReport {
    let checks = names.iter().map(|&n| run_check(n, sizes)).collect();
    VerifyReport::from_results(sizes, checks)
}

pub fn run_check(name: CheckName, sizes: Sizes) -> CheckResult {
    let outcome = match name {
        CheckName::Unitality => unitality(),
        CheckName::Eq10 => eq10(sizes),
        CheckName::CharPoly => char_poly_check(sizes),
        CheckName::Contractivity => contractivity(sizes),
        CheckName::Classification => classification(sizes),
        CheckName::Oracle => oracle(sizes),
        CheckName::Classical => classical(sizes),
        CheckName::Limit => limit(sizes),
        CheckName::GeometricSum => geometric_sum(sizes),
        CheckName::AveragedBound => averaged_bound(sizes),
        CheckName::AveragedMixing => averaged_mixing(sizes),
    };
    outcome.unwrap_or_else(|e| CheckResult::failed(name, e))
}

fn up(n: usize, p: f64) -> Result<WalkConfig> {
    WalkConfig::new(n, p, CoinState::up())
}

/// Random `(N, k, k', p)` with `2 ≤ N ≤ 32`.
fn random_tuples(count: usize, seed: u64) -> Vec<(usize, usize, usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=32);
            (
                n,
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0.0..=1.0),
            )
        })
        .collect()
}

fn unitality() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for i in 0..=100 {
        worst = worst.max(build_kraus_family(i as f64 / 100.0)?.unitality_defect());
    }
    Ok(CheckResult::new(
        CheckName::Unitality,
        worst,
        1e-14,
        "p = 0.00..1.00, 101 rates",
    ))
}

fn eq10(sizes: Sizes) -> Result<CheckResult> {
    let tuples = random_tuples(sizes.sample_count(200), SEED);
    let mut worst = 0.0f64;
    let mut worst_at = None;
    for &(n, k, kp, p) in &tuples {
        let config = up(n, p)?;
        let d = max_abs_diff(
            superop_definitional(k, kp, &config)?.matrix(),
            superop_closed_form(k, kp, &config)?.matrix(),
        );
        if d > worst || worst_at.is_none() {
            worst = d;
            worst_at = Some((n, k, kp, p));
        }
    }
    Ok(CheckResult::new(
        CheckName::Eq10,
        worst,
        1e-12,
        format!(
            "{} random tuples, worst at (N,k,k',p) = {worst_at:?}",
            tuples.len()
        ),
    ))
}

fn char_poly_check(sizes: Sizes) -> Result<CheckResult> {
    let tuples = random_tuples(sizes.sample_count(200), SEED);
    let mut worst = 0.0f64;
    for &(n, k, kp, p) in &tuples {
        let l = superop_definitional(k, kp, &up(n, p)?)?;
        let interp = interpolate_char_poly(l.matrix());
        for (a, b) in interp.iter().zip(char_poly(&l).coefficients()) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(CheckResult::new(
        CheckName::CharPoly,
        worst,
        1e-10,
        format!(
            "{} tuples, det(λI-L) sampled at 5th roots of unity",
            tuples.len()
        ),
    ))
}

fn contractivity(sizes: Sizes) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let tuples = random_tuples(sizes.sample_count(200), SEED + 2);
    let mut worst_identity = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for &(n, k, kp, p) in &tuples {
        let l = superop_definitional(k, kp, &up(n, p)?)?;
        let b = Mat2::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let sb = l.apply_operator(&b);
        let lhs = frobenius(&sb).powi(2);
        let rhs = (1.0 - p).powi(2) * frobenius(&b).powi(2)
            + (2.0 * p - p * p) * (b[(0, 0)].norm_sqr() + b[(1, 1)].norm_sqr());
        worst_identity = worst_identity.max((lhs - rhs).abs());
        worst_excess = worst_excess.max(frobenius(&sb) - frobenius(&b));
    }
    let measured = worst_identity.max(worst_excess);
    Ok(CheckResult::new(
        CheckName::Contractivity,
        measured,
        1e-12,
        format!(
            "dephasing identity residual {worst_identity:e}, worst ‖LB‖-‖B‖ = {worst_excess:e}"
        ),
    ))
}

fn classification(sizes: Sizes) -> Result<CheckResult> {
    let max_n = if sizes.quick { 8 } else { 16 };
    let mut violations = Vec::new();
    let mut pairs = 0usize;
    for n in 3..=max_n {
        for p in [0.1, 0.3, 0.5, 0.9] {
            let config = up(n, p)?;
            for k in 0..n {
                for kp in 0..n {
                    pairs += 1;
                    let l = superop_definitional(k, kp, &config)?;
                    let r = spectral::eigenvalues(&l)?;
                    for what in spectral::classification_violations(&r) {
                        violations.push(format!("N={n} p={p} ({k},{kp}): {what}"));
                    }
                }
            }
        }
    }
    let detail = match violations.first() {
        None => format!("{pairs} pairs, N = 3..={max_n}"),
        Some(first) => format!("{} violations; first: {first}", violations.len()),
    };
    Ok(CheckResult::new(
        CheckName::Classification,
        violations.len() as f64,
        0.0,
        detail,
    ))
}

fn coins() -> [CoinState; 2] {
    [CoinState::up(), CoinState::balanced()]
}

fn oracle(sizes: Sizes) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for n in 3..=sizes.max_nodes {
        for p in [0.0, 0.1, 0.5, 1.0] {
            for coin in coins() {
                let config = WalkConfig::new(n, p, coin)?;
                let mut direct = DirectWalk::new(&config)?;
                let mut fourier = FourierWalk::new(&config);
                for t in 0..=sizes.max_steps {
                    let d =
                        position_marginal(direct.state(), t).max_abs_diff(&fourier.distribution()?);
                    if d > worst {
                        worst = d;
                        worst_at = format!("N={n} p={p} t={t}");
                    }
                    direct.step();
                    fourier.step();
                }
            }
        }
    }
    Ok(CheckResult::new(
        CheckName::Oracle,
        worst,
        1e-10,
        format!(
            "N ≤ {}, t ≤ {}; worst at {worst_at}",
            sizes.max_nodes, sizes.max_steps
        ),
    ))
}

fn classical(sizes: Sizes) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for n in 2..=sizes.max_nodes {
        let mut direct = DirectWalk::new(&up(n, 1.0)?)?;
        for t in 0..=sizes.max_steps {
            let d = position_marginal(direct.state(), t).max_abs_diff(&classical_reference(n, t));
            worst = worst.max(d);
            direct.step();
        }
    }
    Ok(CheckResult::new(
        CheckName::Classical,
        worst,
        1e-12,
        format!("p = 1, N ≤ {}, t ≤ {}", sizes.max_nodes, sizes.max_steps),
    ))
}

/// Steps after which the slowest non-persistent block has decayed below
/// `tol/N²`: `ceil(ln(tol/N²) / ln ρ)`.
pub fn settling_time(config: &WalkConfig, tol: f64) -> Result<usize> {
    let gap = spectral::spectral_gap(config)?;
    if gap.degenerate {
        return Err(WalkError::Unsupported(
            "no settling time without decoherence".into(),
        ));
    }
    if gap.radius <= 0.0 {
        return Ok(1);
    }
    let n2 = (config.n_nodes() * config.n_nodes()) as f64;
    Ok(((tol / n2).ln() / gap.radius.ln()).ceil().max(1.0) as usize)
}

/// Largest deviation of `P(·, t)` from the limit of matching parity.
pub fn deviation_from_limit(
    config: &WalkConfig,
    dist: &PositionDistribution,
    t: usize,
) -> Result<f64> {
    let limit = analysis::limiting_distribution(config, Parity::of(t))
        .ok_or_else(|| WalkError::Unsupported("no limit at p = 0".into()))?;
    Ok(dist.max_abs_diff(&limit.target()))
}

fn limit(sizes: Sizes) -> Result<CheckResult> {
    let (odd, even): (Vec<usize>, Vec<usize>) = if sizes.quick {
        (vec![3, 5, 7], vec![4, 6])
    } else {
        (vec![3, 5, 7, 9, 11], vec![4, 6, 8])
    };
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for n in odd.into_iter().chain(even) {
        for p in [0.1, 0.5, 0.9] {
            for coin in coins() {
                let config = WalkConfig::new(n, p, coin)?;
                let t_star = settling_time(&config, 1e-6)?;
                let mut walk = FourierWalk::new(&config);
                for _ in 0..t_star {
                    walk.step();
                }
                // Both parities of t for even N.
                for _ in 0..2 {
                    let d = deviation_from_limit(&config, &walk.distribution()?, walk.t())?;
                    if d > worst {
                        worst = d;
                        worst_at = format!("N={n} p={p} t={}", walk.t());
                    }
                    walk.step();
                }
            }
        }
    }
    Ok(CheckResult::new(
        CheckName::Limit,
        worst,
        1e-6,
        format!("deviation from limit at T* and T*+1; worst at {worst_at}"),
    ))
}

fn geometric_sum(sizes: Sizes) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut worst = 0.0f64;
    let count = sizes.sample_count(50);
    for _ in 0..count {
        let n = rng.gen_range(3..=16);
        let k = rng.gen_range(0..n);
        let kp = (k + rng.gen_range(1..n)) % n;
        let l = superop_definitional(k, kp, &up(n, rng.gen_range(0.1..=1.0))?)?;
        for tau in [1, 10, 1000] {
            worst = worst.max(analysis::verify_geometric_sum(&l, tau)?);
        }
    }
    Ok(CheckResult::new(
        CheckName::GeometricSum,
        worst,
        1e-10,
        format!("{count} random off-diagonal pairs, τ ∈ {{1, 10, 1000}}"),
    ))
}

fn averaged_bound(sizes: Sizes) -> Result<CheckResult> {
    let (max_n, taus): (usize, &[usize]) = if sizes.quick {
        (7, &[100, 1000])
    } else {
        (17, &[100, 1000, 10_000])
    };
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_ratio_miss = 0.0f64;
    let mut detail = String::new();
    for n in (3..=max_n).step_by(2) {
        for p in [0.2, 0.5] {
            let rows = analysis::averaged_bound_check(&up(n, p)?, taus)?;
            for r in &rows {
                let excess = r.max_deviation - r.bound;
                if excess > worst_excess {
                    worst_excess = excess;
                    detail = format!(
                        "tightest N={n} p={p} τ={}: {:e} vs B={:e}",
                        r.tau, r.max_deviation, r.bound
                    );
                }
            }
            let [.., a, b] = rows.as_slice() else {
                unreachable!()
            };
            let ratio = b.scaled_tv / a.scaled_tv;
            worst_ratio_miss = worst_ratio_miss.max((0.5 - ratio).max(ratio - 2.0).max(0.0));
        }
    }
    // Pass iff deviation ≤ B + 1e-9 everywhere and every TV·τ ratio lies in [0.5, 2].
    let measured = if worst_ratio_miss > 0.0 {
        f64::INFINITY
    } else {
        worst_excess
    };
    Ok(CheckResult::new(
        CheckName::AveragedBound,
        measured,
        1e-9,
        format!("{detail}; worst TV·τ ratio miss {worst_ratio_miss}"),
    ))
}

fn averaged_mixing(sizes: Sizes) -> Result<CheckResult> {
    let ns: &[usize] = if sizes.quick { &[4, 5] } else { &[4, 5, 8, 9] };
    let eps = 1e-2;
    let mut unsettled = Vec::new();
    let mut slowest = 0usize;
    for &n in ns {
        for p in [0.2, 0.6] {
            let report = analysis::mixing_time_averaged(&up(n, p)?, eps, default_horizon(n, eps))?;
            match report.mixing_time {
                Some(m) if report.converged => slowest = slowest.max(m),
                _ => unsettled.push(format!("N={n} p={p}")),
            }
        }
    }
    Ok(CheckResult::new(
        CheckName::AveragedMixing,
        unsettled.len() as f64,
        0.0,
        format!("ε = {eps}; slowest averaged mixing time {slowest}; unsettled {unsettled:?}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in CheckName::ALL {
            assert_eq!(n.as_str().parse::<CheckName>().unwrap(), n);
        }
        assert!("eq11".parse::<CheckName>().is_err());
    }

    #[test]
    fn cheap_checks_pass() {
        let report = run(
            &[
                CheckName::Unitality,
                CheckName::Eq10,
                CheckName::CharPoly,
                CheckName::Contractivity,
            ],
            Sizes::QUICK,
        );
        assert!(report.passed, "{report:#?}");
    }

    #[test]
    fn settling_time_grows_as_decoherence_weakens() {
        let slow = settling_time(&up(7, 0.1).unwrap(), 1e-6).unwrap();
        let fast = settling_time(&up(7, 0.9).unwrap(), 1e-6).unwrap();
        assert!(slow > fast);
        assert!(settling_time(&up(7, 0.0).unwrap(), 1e-6).is_err());
    }
}
