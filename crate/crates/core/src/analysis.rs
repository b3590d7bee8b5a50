//! Limiting distributions, total variation, time averages, mixing-time scans
//! and the `O(N/τ)` deviation bound for odd cycles.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::WalkConfig;
use crate::error::{Result, WalkError};
use crate::evolution::{DistributionKind, FourierWalk, PositionDistribution};
use crate::fourier::SuperOp;
use crate::linalg::{cr, mat4_pow, Mat4, Vec4};
use crate::C64;

/// Upper cap on default mixing-scan horizons.
pub const MAX_DEFAULT_HORIZON: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(t: usize) -> Self {
        if t % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn matches(self, x: usize) -> bool {
        Parity::of(x) == self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    /// Odd N: `1/N` everywhere.
    UniformAll,
    /// Even N: `2/N` on nodes whose parity matches `t`, zero elsewhere.
    ParityAlternating,
    /// Any N, time-averaged: `1/N` everywhere.
    TimeAveragedUniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitSpec {
    pub kind: LimitKind,
    pub n_nodes: usize,
    pub value_on_support: f64,
    /// Parity of the supporting nodes; set only for [`LimitKind::ParityAlternating`].
    pub support_parity: Option<Parity>,
}

impl LimitSpec {
    pub fn time_averaged(n_nodes: usize) -> Self {
        Self {
            kind: LimitKind::TimeAveragedUniform,
            n_nodes,
            value_on_support: 1.0 / n_nodes as f64,
            support_parity: None,
        }
    }

    pub fn target(&self) -> PositionDistribution {
        let probs = (0..self.n_nodes)
            .map(|x| match self.support_parity {
                Some(parity) if !parity.matches(x) => 0.0,
                _ => self.value_on_support,
            })
            .collect();
        PositionDistribution::new(probs, DistributionKind::Instantaneous { t: 0 })
    }
}

/// The large-`t` limit of `P(·, t)` for `t` of the given parity. `None` when
/// `p = 0`, where no limit exists in general.
pub fn limiting_distribution(config: &WalkConfig, t_parity: Parity) -> Option<LimitSpec> {
    if config.decoherence_rate() == 0.0 {
        return None;
    }
    let n = config.n_nodes();
    Some(if config.is_even() {
        LimitSpec {
            kind: LimitKind::ParityAlternating,
            n_nodes: n,
            value_on_support: 2.0 / n as f64,
            support_parity: Some(t_parity),
        }
    } else {
        LimitSpec {
            kind: LimitKind::UniformAll,
            n_nodes: n,
            value_on_support: 1.0 / n as f64,
            support_parity: None,
        }
    })
}

/// `Σ_x |p(x) - q(x)|`, without the conventional factor ½.
pub fn total_variation(p: &PositionDistribution, q: &PositionDistribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(WalkError::domain(
            "distribution length",
            format!("{} vs {}", p.len(), q.len()),
        ));
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Running Cesàro average of the instantaneous distributions of a
/// [`FourierWalk`].
#[derive(Clone, Debug)]
pub struct TimeAverager {
    walk: FourierWalk,
    sum: Vec<f64>,
    tau: usize,
}

impl TimeAverager {
    pub fn new(config: &WalkConfig) -> Self {
        Self {
            walk: FourierWalk::new(config),
            sum: vec![0.0; config.n_nodes()],
            tau: 0,
        }
    }

    /// Folds in `P(·, τ)` and advances; afterwards [`Self::average`] is
    /// `P̄(·, τ+1)`. Also returns `P(·, τ)`.
    pub fn advance(&mut self) -> Result<PositionDistribution> {
        let current = self.walk.distribution()?;
        for (s, p) in self.sum.iter_mut().zip(current.probs()) {
            *s += p;
        }
        self.walk.step();
        self.tau += 1;
        Ok(current)
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn average(&self) -> PositionDistribution {
        let scale = 1.0 / self.tau.max(1) as f64;
        PositionDistribution::new(
            self.sum.iter().map(|s| s * scale).collect(),
            DistributionKind::TimeAveraged { tau: self.tau },
        )
    }
}

/// `P̄(x, τ) = (1/τ) Σ_{t<τ} P(x, t)`.
pub fn time_averaged(config: &WalkConfig, tau: usize) -> Result<PositionDistribution> {
    if tau == 0 {
        return Err(WalkError::domain(
            "averaging window",
            "tau must be at least 1",
        ));
    }
    let mut avg = TimeAverager::new(config);
    for _ in 0..tau {
        avg.advance()?;
    }
    Ok(avg.average())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingTarget {
    /// `P̄(·, τ)` against the uniform distribution.
    Averaged,
    /// `P(·, t)` against the limit of matching parity.
    Instantaneous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundPoint {
    pub tau: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    pub epsilon: f64,
    pub horizon: usize,
    pub converged: bool,
    pub mixing_time: Option<usize>,
    /// `B(τ, N)` at the reported mixing time (or the horizon if not converged);
    /// present for odd N, `p > 0`, initial coin `|1⟩`, averaged target.
    pub bound: Option<BoundPoint>,
    pub target: MixingTarget,
    pub tv_trace: Vec<(usize, f64)>,
}

/// `ceil(20·N²/ε)`, capped at 10⁶.
pub fn default_horizon(n_nodes: usize, epsilon: f64) -> usize {
    let h = (20.0 * (n_nodes * n_nodes) as f64 / epsilon).ceil();
    if h.is_finite() && h < MAX_DEFAULT_HORIZON as f64 {
        (h as usize).max(1)
    } else {
        MAX_DEFAULT_HORIZON
    }
}

/// Smallest `τ` with `TV(t) < ε` for all `τ < t ≤ horizon`, provided the
/// condition holds at the horizon itself. The scan starts at `τ = 1`.
fn first_settled(trace: &[(usize, f64)], epsilon: f64) -> (bool, Option<usize>) {
    let Some(&(_, last)) = trace.last() else {
        return (false, None);
    };
    if last >= epsilon {
        return (false, None);
    }
    let last_bad = trace
        .iter()
        .rev()
        .find(|(_, tv)| *tv >= epsilon)
        .map(|(t, _)| *t);
    (true, Some(last_bad.unwrap_or(1).max(1)))
}

fn check_scan_args(epsilon: f64, horizon: usize) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(WalkError::domain(
            "epsilon",
            format!("{epsilon} is not positive"),
        ));
    }
    if horizon == 0 {
        return Err(WalkError::domain("horizon", "must be at least 1"));
    }
    Ok(())
}

/// True when the averaged deviation bound applies: odd N, `p > 0`, coin `|1⟩`.
pub fn bound_applies(config: &WalkConfig) -> bool {
    !config.is_even() && config.decoherence_rate() > 0.0 && config.initial_coin().is_up()
}

/// Scans `τ = 1..=horizon` for `TV(P̄(·, τ), uniform) < ε`.
pub fn mixing_time_averaged(
    config: &WalkConfig,
    epsilon: f64,
    horizon: usize,
) -> Result<MixingReport> {
    check_scan_args(epsilon, horizon)?;
    let uniform = PositionDistribution::uniform(config.n_nodes());
    let mut avg = TimeAverager::new(config);
    let mut tv_trace = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        avg.advance()?;
        tv_trace.push((avg.tau(), total_variation(&avg.average(), &uniform)?));
    }
    let (converged, mixing_time) = first_settled(&tv_trace, epsilon);
    let bound = if bound_applies(config) {
        let tau = mixing_time.unwrap_or(horizon);
        let value = averaged_deviation_bound(tau, config.n_nodes(), config.decoherence_rate())?;
        Some(BoundPoint {
            tau,
            value: value.exact,
        })
    } else {
        None
    };
    Ok(MixingReport {
        epsilon,
        horizon,
        converged,
        mixing_time,
        bound,
        target: MixingTarget::Averaged,
        tv_trace,
    })
}

/// Scans `t = 1..=horizon` for `TV(P(·, t), P_∞) < ε`, where `P_∞` is uniform
/// for odd N and the parity-resolved limit for even N. Defined for `p = 0`
/// as well, where convergence generally fails.
pub fn mixing_time_instantaneous(
    config: &WalkConfig,
    epsilon: f64,
    horizon: usize,
) -> Result<MixingReport> {
    check_scan_args(epsilon, horizon)?;
    let n = config.n_nodes();
    let target_for = |t: usize| {
        let parity = Parity::of(t);
        if config.is_even() {
            LimitSpec {
                kind: LimitKind::ParityAlternating,
                n_nodes: n,
                value_on_support: 2.0 / n as f64,
                support_parity: Some(parity),
            }
            .target()
        } else {
            PositionDistribution::uniform(n)
        }
    };
    let (even_target, odd_target) = (target_for(0), target_for(1));
    let mut walk = FourierWalk::new(config);
    let mut tv_trace = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        walk.step();
        let target = if t % 2 == 0 {
            &even_target
        } else {
            &odd_target
        };
        tv_trace.push((t, total_variation(&walk.distribution()?, target)?));
    }
    let (converged, mixing_time) = first_settled(&tv_trace, epsilon);
    Ok(MixingReport {
        epsilon,
        horizon,
        converged,
        mixing_time,
        bound: None,
        target: MixingTarget::Instantaneous,
        tv_trace,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundEstimate {
    /// `B(τ,N) = 8/(p²τN²) Σ_{j=1}^{N-1} j / (1 - cos(2πj/N))`.
    pub exact: f64,
    /// The integral approximation `4/(τp²π²)·[-x cot x + ln sin x]` over `[π/N, (N-1)π/N]`.
    pub riemann: f64,
}

/// Upper bound on `max_x |P̄(x,τ) - 1/N|` (neglecting the decaying `L^τ`
/// part) for odd N and initial coin `|1⟩`.
pub fn averaged_deviation_bound(tau: usize, n_nodes: usize, p: f64) -> Result<BoundEstimate> {
    if n_nodes % 2 == 0 {
        return Err(WalkError::Unsupported(format!(
            "deviation bound requires odd N, got N = {n_nodes}"
        )));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(WalkError::domain(
            "decoherence rate",
            format!("bound needs 0 < p ≤ 1, got {p}"),
        ));
    }
    if tau == 0 || n_nodes < 3 {
        return Err(WalkError::domain(
            "bound arguments",
            format!("tau = {tau}, N = {n_nodes}"),
        ));
    }
    let n = n_nodes as f64;
    let tau = tau as f64;
    let sum: f64 = (1..n_nodes)
        .map(|j| {
            let j = j as f64;
            j / (1.0 - (2.0 * PI * j / n).cos())
        })
        .sum();
    let exact = 8.0 / (p * p * tau * n * n) * sum;
    let antiderivative = |x: f64| -x / x.tan() + x.sin().ln();
    let riemann = 4.0 / (tau * p * p * PI * PI)
        * (antiderivative((n - 1.0) * PI / n) - antiderivative(PI / n));
    Ok(BoundEstimate { exact, riemann })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub tau: usize,
    /// `max_x |P̄(x,τ) - 1/N|`
    pub max_deviation: f64,
    pub bound: f64,
    /// `TV(P̄(·,τ), uniform)·τ`
    pub scaled_tv: f64,
}

/// Measures `P̄(·, τ)` at each (ascending) `τ` in `taus` and sets it against
/// `B(τ,N)`. Refuses configurations outside the bound's hypotheses.
pub fn averaged_bound_check(config: &WalkConfig, taus: &[usize]) -> Result<Vec<BoundCheck>> {
    if !config.initial_coin().is_up() {
        return Err(WalkError::Unsupported(
            "deviation bound requires initial coin |1>".into(),
        ));
    }
    if taus.windows(2).any(|w| w[0] >= w[1]) || taus.first() == Some(&0) {
        return Err(WalkError::domain(
            "tau list",
            "must be positive and strictly increasing",
        ));
    }
    let n = config.n_nodes();
    let p = config.decoherence_rate();
    let uniform = PositionDistribution::uniform(n);
    let mut avg = TimeAverager::new(config);
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let bound = averaged_deviation_bound(tau, n, p)?.exact;
        while avg.tau() < tau {
            avg.advance()?;
        }
        let mean = avg.average();
        out.push(BoundCheck {
            tau,
            max_deviation: mean.max_abs_diff(&uniform),
            bound,
            scaled_tv: total_variation(&mean, &uniform)? * tau as f64,
        });
    }
    Ok(out)
}

/// `a·(I - L)⁻¹·b` with `a = 2[1,0,0,0]` and `b` the launch projector, by
/// solving the 4×4 system.
pub fn resolvent_trace(superop: &SuperOp, initial: &Vec4) -> Result<C64> {
    let resolvent = (Mat4::identity() - superop.matrix())
        .try_inverse()
        .ok_or_else(|| {
            WalkError::Precondition(format!(
                "I - L is singular for (k, k') = ({}, {})",
                superop.k(),
                superop.k_prime()
            ))
        })?;
    Ok((resolvent * initial)[0] * 2.0)
}

/// Closed form of [`resolvent_trace`] for the launch coin `|1⟩`:
/// `[1 - q²e^{-iθ} + q c⁺(1 - e^{-iθ})] / [(1 - c⁻)(1 + 2q c⁺ + q²)]`
/// with `q = 1 - p`, `θ = 2π(k' - k)/N`.
pub fn resolvent_trace_closed_form(superop: &SuperOp) -> C64 {
    let q = 1.0 - superop.rate();
    let cp = superop.c_plus;
    let e = C64::new(superop.c_minus, -superop.s_minus);
    let num = cr(1.0) - e * (q * q) + (cr(1.0) - e) * (q * cp);
    num / ((1.0 - superop.c_minus) * (1.0 + 2.0 * q * cp + q * q))
}

/// Largest entrywise deviation between `Σ_{t<τ} L^t` accumulated term by
/// term and `(I - L)⁻¹(I - L^τ)` with `L^τ` by repeated squaring.
pub fn verify_geometric_sum(superop: &SuperOp, tau: usize) -> Result<f64> {
    if superop.is_diagonal() {
        return Err(WalkError::Precondition(
            "geometric-sum identity needs k ≠ k' (1 is an eigenvalue on the diagonal)".into(),
        ));
    }
    if tau == 0 {
        return Err(WalkError::domain("tau", "must be at least 1"));
    }
    let l = superop.matrix();
    let mut power = Mat4::identity();
    let mut explicit = Mat4::zeros();
    for _ in 0..tau {
        explicit += power;
        power *= l;
    }
    let inverse = (Mat4::identity() - l)
        .try_inverse()
        .ok_or_else(|| WalkError::Numerical("I - L not invertible off the diagonal".into()))?;
    let closed = inverse * (Mat4::identity() - mat4_pow(l, tau as u64));
    Ok(crate::linalg::max_abs_diff(&explicit, &closed))
}
