//! Characteristic polynomial, eigenvalues and the classification of the
//! momentum-pair superoperators.
//!
//! Eigenvalues come from two independent routes: a dense complex Schur
//! decomposition of the 4×4 matrix, and the roots of the closed-form quartic
//! found by Aberth–Ehrlich iteration. The routes are compared as multisets.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::WalkConfig;
use crate::error::{Result, WalkError};
use crate::fourier::{superop, Construction, SuperOp};
use crate::linalg::{cr, Mat4};
use crate::C64;

/// `||λ| - 1|` below this counts as unit modulus.
pub const UNIT_MODULUS_TOL: f64 = 1e-9;
/// Distance to `±1` below which a unit-modulus eigenvalue is identified with it.
pub const REAL_UNIT_TOL: f64 = 1e-8;
/// Largest admissible `|f(λ)|` at a computed eigenvalue.
pub const RESIDUAL_TOL: f64 = 1e-8;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// Monic quartic `λ⁴ + a3 λ³ + a2 λ² + a1 λ + a0`, stored highest power first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quartic {
    coefficients: [f64; 5],
}

impl Quartic {
    pub fn monic(a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Self {
            coefficients: [1.0, a3, a2, a1, a0],
        }
    }

    /// `(a4, a3, a2, a1, a0)` with `a4 = 1`.
    pub fn coefficients(&self) -> [f64; 5] {
        self.coefficients
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coefficients
            .iter()
            .fold(cr(0.0), |acc, &a| acc * z + a)
    }

    pub fn derivative(&self, z: C64) -> C64 {
        let [a4, a3, a2, a1, _] = self.coefficients;
        ((z * (4.0 * a4) + 3.0 * a3) * z + 2.0 * a2) * z + a1
    }

    /// Roots by simultaneous Aberth–Ehrlich iteration.
    pub fn roots(&self) -> [C64; 4] {
        let a = self.coefficients;
        // Cauchy bound on root moduli.
        let bound = 1.0 + a[1..].iter().map(|x| x.abs()).fold(0.0, f64::max);
        // Start on a circle with an irrational-ish offset so that no start point
        // sits on a symmetry axis of a real polynomial.
        let mut z: [C64; 4] =
            std::array::from_fn(|i| C64::from_polar(0.5 * bound, 2.0 * PI * i as f64 / 4.0 + 0.4));
        for _ in 0..500 {
            let mut largest_step = 0.0f64;
            for i in 0..4 {
                let f = self.eval(z[i]);
                if f.norm() == 0.0 {
                    continue;
                }
                let ratio = f / self.derivative(z[i]);
                let repulsion: C64 = (0..4)
                    .filter(|&j| j != i)
                    .map(|j| (z[i] - z[j]).inv())
                    .sum();
                let step = ratio / (cr(1.0) - ratio * repulsion);
                if step.is_finite() {
                    z[i] -= step;
                    largest_step = largest_step.max(step.norm());
                }
            }
            if largest_step < 1e-16 * (1.0 + bound) {
                break;
            }
        }
        z
    }
}

/// `f(λ) = det(λI - L)` from the closed-form expression in `p` and `cos 2π(k' ± k)/N`.
pub fn char_poly(superop: &SuperOp) -> Quartic {
    let q = 1.0 - superop.rate();
    let (cp, cm) = (superop.c_plus, superop.c_minus);
    Quartic::monic(q * cp - cm, -2.0 * q * cp * cm, q * (cp - q * cm), q * q)
}

/// Coefficients of `det(λI - M)` (highest power first) recovered by sampling
/// the determinant at the fifth roots of unity and inverting the DFT.
pub fn interpolate_char_poly(matrix: &Mat4) -> [C64; 5] {
    let nodes: [C64; 5] = std::array::from_fn(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / 5.0));
    let values = nodes.map(|z| (Mat4::identity() * z - matrix).determinant());
    let mut ascending = [cr(0.0); 5];
    for (m, coeff) in ascending.iter_mut().enumerate() {
        *coeff = nodes
            .iter()
            .zip(values.iter())
            .map(|(z, v)| v * z.powi(-(m as i32)))
            .sum::<C64>()
            / 5.0;
    }
    ascending.reverse();
    ascending
}

/// The position of a momentum pair in the classification of its spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairClass {
    /// `k = k'`
    DiagonalPair,
    /// `|k - k'| = N/2`
    AntipodalPair,
    Generic,
}

impl PairClass {
    pub fn of(k: usize, k_prime: usize, n: usize) -> Self {
        if k == k_prime {
            PairClass::DiagonalPair
        } else if 2 * k.abs_diff(k_prime) == n {
            PairClass::AntipodalPair
        } else {
            PairClass::Generic
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PairClass::DiagonalPair => "diagonal-pair",
            PairClass::AntipodalPair => "antipodal-pair",
            PairClass::Generic => "generic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub k: usize,
    pub k_prime: usize,
    pub eigenvalues: [C64; 4],
    pub spectral_radius: f64,
    pub has_unit_eigenvalue: bool,
    pub has_minus_one: bool,
    pub classification: PairClass,
    /// `|f'(-1)|` from the closed-form quartic; nonzero means -1, if present, is simple.
    pub minus_one_derivative: f64,
    /// True at `p = 0` or `p = 1`, where the classification is not asserted.
    pub endpoint_rate: bool,
    /// Largest `|f(λ_i)|` over the computed eigenvalues.
    pub residual: f64,
}

impl SpectrumReport {
    /// Eigenvalues on the unit circle within [`UNIT_MODULUS_TOL`].
    pub fn unit_modulus(&self) -> impl Iterator<Item = C64> + '_ {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|l| (l.norm() - 1.0).abs() < UNIT_MODULUS_TOL)
    }
}

/// Ways in which a spectrum contradicts the classification expected for
/// `0 < p < 1`: radius at most 1, unit-modulus eigenvalues real, 1 exactly on
/// diagonal pairs, -1 exactly (and simply) on antipodal pairs.
pub fn classification_violations(report: &SpectrumReport) -> Vec<&'static str> {
    let mut out = Vec::new();
    if report.spectral_radius > 1.0 + 1e-10 {
        out.push("spectral radius exceeds 1");
    }
    if report
        .unit_modulus()
        .any(|l| (l - cr(1.0)).norm() > REAL_UNIT_TOL && (l + cr(1.0)).norm() > REAL_UNIT_TOL)
    {
        out.push("non-real unit-modulus eigenvalue");
    }
    if report.has_unit_eigenvalue != (report.classification == PairClass::DiagonalPair) {
        out.push("eigenvalue 1 present iff k = k' fails");
    }
    if report.has_minus_one != (report.classification == PairClass::AntipodalPair) {
        out.push("eigenvalue -1 present iff |k - k'| = N/2 fails");
    }
    if report.has_minus_one && report.minus_one_derivative <= 1e-10 {
        out.push("eigenvalue -1 is not simple");
    }
    out
}

/// Eigenvalues of the 4×4 matrix by complex Schur decomposition.
pub fn matrix_eigenvalues(matrix: &Mat4) -> Result<[C64; 4]> {
    let schur =
        matrix
            .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
            .ok_or_else(|| WalkError::NoConvergence {
                matrix: Box::new(*matrix),
            })?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| WalkError::NoConvergence {
            matrix: Box::new(*matrix),
        })?;
    Ok([ev[0], ev[1], ev[2], ev[3]])
}

pub fn eigenvalues(superop: &SuperOp) -> Result<SpectrumReport> {
    let eigenvalues = matrix_eigenvalues(superop.matrix())?;
    let poly = char_poly(superop);
    let residual = eigenvalues
        .iter()
        .map(|&l| poly.eval(l).norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOL {
        return Err(WalkError::Numerical(format!(
            "eigenvalues of L_({},{}) leave |f(λ)| = {residual:e}",
            superop.k(),
            superop.k_prime()
        )));
    }
    let on_circle_near = |target: f64| {
        eigenvalues.iter().any(|l| {
            (l.norm() - 1.0).abs() < UNIT_MODULUS_TOL && (l - cr(target)).norm() < REAL_UNIT_TOL
        })
    };
    let p = superop.rate();
    Ok(SpectrumReport {
        k: superop.k(),
        k_prime: superop.k_prime(),
        eigenvalues,
        spectral_radius: eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max),
        has_unit_eigenvalue: on_circle_near(1.0),
        has_minus_one: on_circle_near(-1.0),
        classification: PairClass::of(superop.k(), superop.k_prime(), superop.n_nodes()),
        minus_one_derivative: poly.derivative(cr(-1.0)).norm(),
        endpoint_rate: p == 0.0 || p == 1.0,
        residual,
    })
}

/// Greedy minimal-distance matching of two 4-element multisets; returns the
/// largest matched distance.
pub fn multiset_distance(a: &[C64; 4], b: &[C64; 4]) -> f64 {
    let mut used = [false; 4];
    let mut pairs: Vec<(f64, usize, usize)> = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| ((a[i] - b[j]).norm(), i, j))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut matched_a = [false; 4];
    let mut worst = 0.0f64;
    for (d, i, j) in pairs {
        if !matched_a[i] && !used[j] {
            matched_a[i] = true;
            used[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// `1 - ρ` where `ρ` is the largest spectral radius among the pairs that
/// lose their memory: `k ≠ k'` and, for even N, `|k - k'| ≠ N/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralGap {
    pub value: f64,
    pub radius: f64,
    /// The pair attaining `radius`; `None` if no pair is eligible (N = 2).
    pub slowest_pair: Option<(usize, usize)>,
    /// Set at `p = 0`, where unit-modulus eigenvalues persist on every pair.
    pub degenerate: bool,
}

pub fn spectral_gap(config: &WalkConfig) -> Result<SpectralGap> {
    spectral_gap_with(config, Construction::Definitional)
}

pub fn spectral_gap_with(config: &WalkConfig, construction: Construction) -> Result<SpectralGap> {
    if config.decoherence_rate() == 0.0 {
        return Ok(SpectralGap {
            value: 0.0,
            radius: 1.0,
            slowest_pair: None,
            degenerate: true,
        });
    }
    let n = config.n_nodes();
    let mut radius = 0.0f64;
    let mut slowest_pair = None;
    for k in 0..n {
        for kp in 0..n {
            if PairClass::of(k, kp, n) != PairClass::Generic {
                continue;
            }
            let l = superop(k, kp, config, construction)?;
            let r = matrix_eigenvalues(l.matrix())?
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if slowest_pair.is_none() || r > radius {
                radius = r;
                slowest_pair = Some((k, kp));
            }
        }
    }
    Ok(SpectralGap {
        value: 1.0 - radius,
        radius,
        slowest_pair,
        degenerate: false,
    })
}
