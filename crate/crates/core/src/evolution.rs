//! Walk evolution by two independent routes plus the classical `p = 1` chain.
//!
//! The direct route keeps the full `2N × 2N` density matrix in position-major
//! order (index `2x + a`, coin index `a` as in [`crate::coin`]) and applies
//! `ρ ↦ Σ_n U(I⊗Â_n) ρ (I⊗Â_n†)U†` with `U = S(I⊗H)` as dense products.
//! The Fourier route evolves one Pauli vector per momentum pair and
//! recombines them as `P(x,t) = N⁻² Σ_{k,k'} e^{2πix(k-k')/N} T_{kk'}(t)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::coin::hadamard;
use crate::config::WalkConfig;
use crate::error::{Result, WalkError};
use crate::fourier::{all_superops, Construction};
use crate::kraus::build_kraus_family;
use crate::linalg::{cr, unit_root, Mat2, Mat4, Vec4};
use crate::C64;

const HERMITIAN_TOL: f64 = 1e-11;
const TRACE_TOL: f64 = 1e-11;
const PSD_TOL: f64 = 1e-9;
/// Imaginary residue above this in the Fourier sum means a construction bug.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Step direction of coin index `a`: index 0 is `j = +1`, index 1 is `j = -1`.
fn step_of(a: usize) -> isize {
    if a == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    n_nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityDiagnostics {
    pub hermitian_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl DensityOperator {
    /// `|0⟩⟨0| ⊗ |ψ0⟩⟨ψ0|`.
    pub fn initial(config: &WalkConfig) -> Self {
        let n = config.n_nodes();
        let [a, b] = config.initial_coin().amplitudes();
        let mut matrix = DMatrix::zeros(2 * n, 2 * n);
        let at = 2 * WalkConfig::LAUNCH_POSITION;
        for (i, u) in [a, b].iter().enumerate() {
            for (j, v) in [a, b].iter().enumerate() {
                matrix[(at + i, at + j)] = u * v.conj();
            }
        }
        Self { matrix, n_nodes: n }
    }

    /// `I / 2N`.
    pub fn maximally_mixed(n_nodes: usize) -> Self {
        let dim = 2 * n_nodes;
        Self {
            matrix: DMatrix::identity(dim, dim) * cr(1.0 / dim as f64),
            n_nodes,
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// The 2×2 coin block between positions `x` and `y`.
    pub fn block(&self, x: usize, y: usize) -> Mat2 {
        let v = self.matrix.fixed_view::<2, 2>(2 * x, 2 * y);
        Mat2::from(v)
    }

    pub fn diagnostics(&self) -> DensityDiagnostics {
        let adj = self.matrix.adjoint();
        let hermitian_defect = self
            .matrix
            .iter()
            .zip(adj.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let trace_defect = (self.matrix.trace() - cr(1.0)).norm();
        let hermitian = (&self.matrix + &adj) * cr(0.5);
        let min_eigenvalue = hermitian.symmetric_eigenvalues().min();
        DensityDiagnostics {
            hermitian_defect,
            trace_defect,
            min_eigenvalue,
        }
    }

    /// Hermitian and unit trace within 1e-11, smallest eigenvalue ≥ -1e-9.
    pub fn validate(&self) -> Result<DensityDiagnostics> {
        let d = self.diagnostics();
        if d.hermitian_defect > HERMITIAN_TOL
            || d.trace_defect > TRACE_TOL
            || d.min_eigenvalue < -PSD_TOL
        {
            return Err(WalkError::Numerical(format!(
                "invalid density operator: {d:?}"
            )));
        }
        Ok(d)
    }
}

/// Dense density-matrix stepper.
#[derive(Clone, Debug)]
pub struct DirectWalk {
    lifted_kraus: Vec<DMatrix<C64>>,
    state: DensityOperator,
    t: usize,
}

impl DirectWalk {
    pub fn new(config: &WalkConfig) -> Result<Self> {
        let n = config.n_nodes();
        let h = *hadamard().entries();
        let mut shift_coin = DMatrix::<C64>::zeros(2 * n, 2 * n);
        for x in 0..n {
            for a in 0..2 {
                let target = (x as isize + step_of(a)).rem_euclid(n as isize) as usize;
                for b in 0..2 {
                    shift_coin[(2 * target + a, 2 * x + b)] = h[(a, b)];
                }
            }
        }
        let kraus = build_kraus_family(config.decoherence_rate())?;
        let id = DMatrix::<C64>::identity(n, n);
        let lifted_kraus = kraus
            .operators()
            .iter()
            .filter(|a| a.iter().any(|z| z.norm() > 0.0))
            .map(|a| {
                let a = DMatrix::from_column_slice(2, 2, a.as_slice());
                &shift_coin * id.kronecker(&a)
            })
            .collect();
        Ok(Self {
            lifted_kraus,
            state: DensityOperator::initial(config),
            t: 0,
        })
    }

    pub fn step(&mut self) {
        let rho = &self.state.matrix;
        let mut next = DMatrix::zeros(rho.nrows(), rho.ncols());
        for k in &self.lifted_kraus {
            next += k * rho * k.adjoint();
        }
        self.state.matrix = next;
        self.t += 1;
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn t(&self) -> usize {
        self.t
    }
}

pub fn evolve_direct(config: &WalkConfig, t: usize) -> Result<DensityOperator> {
    let mut walk = DirectWalk::new(config)?;
    for _ in 0..t {
        walk.step();
    }
    Ok(walk.state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionKind {
    Instantaneous {
        t: usize,
    },
    /// Average over `t = 0..tau`.
    TimeAveraged {
        tau: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositionDistribution {
    probs: Vec<f64>,
    kind: DistributionKind,
}

impl PositionDistribution {
    pub fn new(probs: Vec<f64>, kind: DistributionKind) -> Self {
        Self { probs, kind }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
            kind: DistributionKind::Instantaneous { t: 0 },
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self {
            probs,
            kind: DistributionKind::Instantaneous { t: 0 },
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `|Σ_x P(x) - 1|`.
    pub fn normalization_defect(&self) -> f64 {
        (self.probs.iter().sum::<f64>() - 1.0).abs()
    }

    /// Entries ≥ -1e-12 and total mass 1 within 1e-10.
    pub fn validate(&self) -> Result<()> {
        let min = self.probs.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-12 || self.normalization_defect() > 1e-10 {
            return Err(WalkError::Numerical(format!(
                "invalid distribution: min entry {min:e}, normalization defect {:e}",
                self.normalization_defect()
            )));
        }
        Ok(())
    }

    /// The distribution of the same walk launched from `node` instead of 0.
    pub fn launched_from(&self, node: usize) -> Self {
        let n = self.probs.len();
        let mut probs = vec![0.0; n];
        for (x, &v) in self.probs.iter().enumerate() {
            probs[(x + node) % n] = v;
        }
        Self {
            probs,
            kind: self.kind,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `P(x) = tr` of the coin block at node `x`.
pub fn position_marginal(rho: &DensityOperator, t: usize) -> PositionDistribution {
    let probs = (0..rho.n_nodes)
        .map(|x| rho.block(x, x).trace().re)
        .collect();
    PositionDistribution::new(probs, DistributionKind::Instantaneous { t })
}

/// Momentum-space stepper: one Pauli vector per pair `(k, k')`.
#[derive(Clone, Debug)]
pub struct FourierWalk {
    n_nodes: usize,
    operators: Vec<Mat4>,
    vectors: Vec<Vec4>,
    /// `e^{2πi m/N}` for `m = 0..N`.
    roots: Vec<C64>,
    t: usize,
}

impl FourierWalk {
    pub fn new(config: &WalkConfig) -> Self {
        Self::with_construction(config, Construction::Definitional)
    }

    pub fn with_construction(config: &WalkConfig, construction: Construction) -> Self {
        let n = config.n_nodes();
        let operators: Vec<Mat4> = all_superops(config, construction)
            .iter()
            .map(|l| *l.matrix())
            .collect();
        let start = config.initial_coin().projector().as_vector();
        let roots = (0..n).map(|m| unit_root(m as i64, n)).collect();
        Self {
            n_nodes: n,
            vectors: vec![start; operators.len()],
            operators,
            roots,
            t: 0,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn step(&mut self) {
        for (v, l) in self.vectors.iter_mut().zip(&self.operators) {
            *v = l * *v;
        }
        self.t += 1;
    }

    /// `T_{kk'}(t)` for the pair at row-major index `k·N + k'`.
    pub fn trace_term(&self, k: usize, k_prime: usize) -> C64 {
        self.vectors[k * self.n_nodes + k_prime][0] * 2.0
    }

    /// Sums of `T_{kk'}(t)` grouped by `d = (k - k') mod N`.
    fn difference_sums(&self) -> Vec<C64> {
        let n = self.n_nodes;
        let mut sums = vec![cr(0.0); n];
        for k in 0..n {
            for kp in 0..n {
                sums[(k + n - kp) % n] += self.trace_term(k, kp);
            }
        }
        sums
    }

    /// The current `P(·, t)`, with the imaginary residue of the Fourier sum.
    pub fn distribution_with_residue(&self) -> (PositionDistribution, f64) {
        let n = self.n_nodes;
        let sums = self.difference_sums();
        let scale = 1.0 / (n * n) as f64;
        let mut residue = 0.0f64;
        let probs = (0..n)
            .map(|x| {
                let z: C64 = sums
                    .iter()
                    .enumerate()
                    .map(|(d, s)| self.roots[(x * d) % n] * s)
                    .sum();
                residue = residue.max((z.im * scale).abs());
                z.re * scale
            })
            .collect();
        (
            PositionDistribution::new(probs, DistributionKind::Instantaneous { t: self.t }),
            residue,
        )
    }

    pub fn distribution(&self) -> Result<PositionDistribution> {
        let (dist, residue) = self.distribution_with_residue();
        if residue > IMAG_RESIDUE_TOL {
            return Err(WalkError::Numerical(format!(
                "Fourier sum left imaginary residue {residue:e} at t = {}",
                self.t
            )));
        }
        Ok(dist)
    }
}

pub fn distribution_fourier(config: &WalkConfig, t: usize) -> Result<PositionDistribution> {
    let mut walk = FourierWalk::new(config);
    for _ in 0..t {
        walk.step();
    }
    walk.distribution()
}

/// `t` steps of the chain moving ±1 with probability ½ each, from node 0.
pub fn classical_reference(n_nodes: usize, t: usize) -> PositionDistribution {
    let mut probs = vec![0.0; n_nodes];
    probs[0] = 1.0;
    for _ in 0..t {
        let mut next = vec![0.0; n_nodes];
        for (x, &v) in probs.iter().enumerate() {
            next[(x + 1) % n_nodes] += 0.5 * v;
            next[(x + n_nodes - 1) % n_nodes] += 0.5 * v;
        }
        probs = next;
    }
    PositionDistribution::new(probs, DistributionKind::Instantaneous { t })
}
