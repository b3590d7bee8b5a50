//! Momentum-space superoperators `L_{k,k'}: B ↦ Σ_n C_k Â_n B Â_n† C_{k'}†`
//! in Pauli coordinates, and the trace terms `T_{kk'}(t) = tr(L^t |ψ0⟩⟨ψ0|)`.

use crate::coin::hadamard_coin_momentum;
use crate::config::WalkConfig;
use crate::error::{Result, WalkError};
use crate::kraus::{build_kraus_family, KrausFamily};
use crate::linalg::{c, cr, unit_root, Mat2, Mat4};
use crate::pauli::{self, PauliVector};
use crate::C64;

/// Which of the two constructions of `L_{k,k'}` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    /// Column `j` is the Pauli decomposition of `Σ_n C_k Â_n σ_j Â_n† C_{k'}†`.
    Definitional,
    /// The closed-form matrix in terms of `cos`/`sin` of `2π(k' ± k)/N`.
    ClosedForm,
}

/// A 4×4 superoperator on Pauli coordinates tagged with its momenta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperOp {
    matrix: Mat4,
    k: usize,
    k_prime: usize,
    n_nodes: usize,
    rate: f64,
    /// `cos 2π(k'+k)/N`
    pub c_plus: f64,
    /// `sin 2π(k'+k)/N`
    pub s_plus: f64,
    /// `cos 2π(k'-k)/N`
    pub c_minus: f64,
    /// `sin 2π(k'-k)/N`
    pub s_minus: f64,
}

impl SuperOp {
    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn k_prime(&self) -> usize {
        self.k_prime
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn apply(&self, v: &PauliVector) -> PauliVector {
        (self.matrix * v.as_vector()).into()
    }

    /// The same map evaluated on a 2×2 operator directly through the coins
    /// and Kraus operators, bypassing the 4×4 matrix.
    pub fn apply_operator(&self, b: &Mat2) -> Mat2 {
        let ck = hadamard_coin_momentum(self.k, self.n_nodes).expect("validated momentum");
        let ckp = hadamard_coin_momentum(self.k_prime, self.n_nodes).expect("validated momentum");
        let kraus = build_kraus_family(self.rate).expect("validated rate");
        sandwich_channel(ck.entries(), &ckp.entries().adjoint(), &kraus, b)
    }

    /// `k == k'`: the block carrying the conserved total probability.
    pub fn is_diagonal(&self) -> bool {
        self.k == self.k_prime
    }

    /// `|k - k'| == N/2`: the blocks that keep eigenvalue -1 for even N.
    pub fn is_antipodal(&self) -> bool {
        2 * self.k.abs_diff(self.k_prime) == self.n_nodes
    }
}

/// `B ↦ Σ_n U1 Â_n B Â_n† U2` for arbitrary 2×2 `U1`, `U2`.
pub fn sandwich_channel(u1: &Mat2, u2: &Mat2, kraus: &KrausFamily, b: &Mat2) -> Mat2 {
    u1 * kraus.apply(b) * u2
}

fn check_pair(k: usize, k_prime: usize, n: usize) -> Result<()> {
    if k >= n || k_prime >= n {
        return Err(WalkError::domain(
            "momentum pair",
            format!("(k, k') = ({k}, {k_prime}) not in 0..{n}"),
        ));
    }
    Ok(())
}

fn trig(k: usize, k_prime: usize, n: usize) -> [f64; 4] {
    let (k, kp) = (k as i64, k_prime as i64);
    // Exact at quarter turns, so e.g. k' - k = N/2 gives exactly cos π = -1.
    let (plus, minus) = (unit_root(k + kp, n), unit_root(kp - k, n));
    [plus.re, plus.im, minus.re, minus.im]
}

fn tagged(matrix: Mat4, k: usize, k_prime: usize, config: &WalkConfig) -> SuperOp {
    let [c_plus, s_plus, c_minus, s_minus] = trig(k, k_prime, config.n_nodes());
    SuperOp {
        matrix,
        k,
        k_prime,
        n_nodes: config.n_nodes(),
        rate: config.decoherence_rate(),
        c_plus,
        s_plus,
        c_minus,
        s_minus,
    }
}

pub fn superop_definitional(k: usize, k_prime: usize, config: &WalkConfig) -> Result<SuperOp> {
    let n = config.n_nodes();
    check_pair(k, k_prime, n)?;
    let ck = hadamard_coin_momentum(k, n)?;
    let ckp_dag = hadamard_coin_momentum(k_prime, n)?.entries().adjoint();
    let kraus = build_kraus_family(config.decoherence_rate())?;
    let mut matrix = Mat4::zeros();
    for (j, sigma) in pauli::basis().iter().enumerate() {
        let image = sandwich_channel(ck.entries(), &ckp_dag, &kraus, sigma);
        let col = PauliVector::decompose(&image).as_vector();
        matrix.set_column(j, &col);
    }
    Ok(tagged(matrix, k, k_prime, config))
}

pub fn superop_closed_form(k: usize, k_prime: usize, config: &WalkConfig) -> Result<SuperOp> {
    check_pair(k, k_prime, config.n_nodes())?;
    let [cp, sp, cm, sm] = trig(k, k_prime, config.n_nodes());
    let q = 1.0 - config.decoherence_rate();
    let z = cr(0.0);
    #[rustfmt::skip]
    let matrix = Mat4::new(
        cr(cm),       c(0.0, q * sm), z,            z,
        z,            z,              cr(q * sp),   cr(cp),
        z,            z,              cr(-q * cp),  cr(sp),
        c(0.0, sm),   cr(q * cm),     z,            z,
    );
    Ok(tagged(matrix, k, k_prime, config))
}

pub fn superop(
    k: usize,
    k_prime: usize,
    config: &WalkConfig,
    construction: Construction,
) -> Result<SuperOp> {
    match construction {
        Construction::Definitional => superop_definitional(k, k_prime, config),
        Construction::ClosedForm => superop_closed_form(k, k_prime, config),
    }
}

/// All `N²` superoperators in row-major `(k, k')` order.
pub fn all_superops(config: &WalkConfig, construction: Construction) -> Vec<SuperOp> {
    let n = config.n_nodes();
    (0..n)
        .flat_map(|k| (0..n).map(move |kp| (k, kp)))
        .map(|(k, kp)| superop(k, kp, config, construction).expect("indices in range"))
        .collect()
}

/// `T_{kk'}(t) = 2·[1,0,0,0]·L^t·α` for the projector coordinates `α`, by `t`
/// repeated matrix-vector products.
pub fn trace_term(superop: &SuperOp, initial: &PauliVector, t: usize) -> Result<C64> {
    let alpha1 = initial.coeffs()[0];
    if (alpha1 - cr(0.5)).norm() > 1e-10 {
        return Err(WalkError::Precondition(format!(
            "initial operator has α1 = {alpha1}, expected 1/2 for a pure-state projector"
        )));
    }
    let mut v = initial.as_vector();
    for _ in 0..t {
        v = superop.matrix * v;
    }
    Ok(v[0] * 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CoinState;
    use crate::linalg::{frobenius, max_abs_diff};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(n: usize, p: f64) -> WalkConfig {
        WalkConfig::new(n, p, CoinState::up()).unwrap()
    }

    fn rand_mat2(rng: &mut impl Rng) -> Mat2 {
        Mat2::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn closed_form_at_zero_momenta() {
        let p = 0.3;
        let l = superop_closed_form(0, 0, &cfg(5, p)).unwrap();
        #[rustfmt::skip]
        let expect = Mat4::from_row_slice(&[
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, p - 1.0, 0.0,
            0.0, 1.0 - p, 0.0, 0.0,
        ].map(cr));
        assert!(max_abs_diff(l.matrix(), &expect) < 1e-15);
    }

    #[test]
    fn full_rate_kills_coherent_entries() {
        let l = superop_closed_form(2, 5, &cfg(7, 1.0)).unwrap();
        let m = l.matrix();
        for (r, col) in [(0, 1), (1, 2), (2, 2), (3, 1)] {
            assert_eq!(m[(r, col)].norm(), 0.0);
        }
    }

    #[test]
    fn trig_pairs_on_unit_circle() {
        for n in 2..20 {
            for k in 0..n {
                for kp in 0..n {
                    let l = superop_closed_form(k, kp, &cfg(n, 0.5)).unwrap();
                    assert!((l.c_plus.powi(2) + l.s_plus.powi(2) - 1.0).abs() < 1e-14);
                    assert!((l.c_minus.powi(2) + l.s_minus.powi(2) - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn constructions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=32);
            let (k, kp) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let config = cfg(n, rng.gen_range(0.0..=1.0));
            let a = superop_definitional(k, kp, &config).unwrap();
            let b = superop_closed_form(k, kp, &config).unwrap();
            let dev = max_abs_diff(a.matrix(), b.matrix());
            assert!(dev < 1e-12, "N={n} k={k} k'={kp}: deviation {dev}");
        }
    }

    #[test]
    fn matrix_action_matches_kraus_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let l = superop_definitional(2, 5, &cfg(9, 0.35)).unwrap();
        for _ in 0..20 {
            let b = rand_mat2(&mut rng);
            let via_matrix = l.apply(&PauliVector::decompose(&b)).compose();
            assert!(max_abs_diff(&via_matrix, &l.apply_operator(&b)) < 1e-12);
        }
    }

    #[test]
    fn coherent_diagonal_block_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let l = superop_definitional(3, 3, &cfg(8, 0.0)).unwrap();
        for _ in 0..20 {
            let v = PauliVector::decompose(&rand_mat2(&mut rng));
            assert!((l.apply(&v).norm_sqr() - v.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_and_dephasing_identity() {
        // <SB,SB> = (1-p)²<B,B> + (2p-p²)(|b11|²+|b22|²) for any unitaries U1, U2.
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let n = rng.gen_range(2..=16);
            let (k, kp) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let p: f64 = rng.gen_range(0.0..=1.0);
            let l = superop_definitional(k, kp, &cfg(n, p)).unwrap();
            let b = rand_mat2(&mut rng);
            let sb = l.apply_operator(&b);
            let lhs = frobenius(&sb).powi(2);
            let rhs = (1.0 - p).powi(2) * frobenius(&b).powi(2)
                + (2.0 * p - p * p) * (b[(0, 0)].norm_sqr() + b[(1, 1)].norm_sqr());
            assert!((lhs - rhs).abs() < 1e-12);
            assert!(frobenius(&sb) <= frobenius(&b) + 1e-12);
        }
    }

    #[test]
    fn equality_in_contraction_only_without_decoherence() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for p in [0.0, 0.05, 0.5, 1.0] {
            let l = superop_definitional(1, 4, &cfg(7, p)).unwrap();
            let all_equal = (0..20).all(|_| {
                let b = rand_mat2(&mut rng);
                (frobenius(&l.apply_operator(&b)) - frobenius(&b)).abs() < 1e-12
            });
            assert_eq!(all_equal, p == 0.0, "p = {p}");
        }
    }

    #[test]
    fn trace_term_basics() {
        let config = cfg(7, 0.5);
        let psi = CoinState::balanced().projector();
        for (k, kp) in [(0, 0), (2, 5), (3, 3)] {
            let l = superop_definitional(k, kp, &config).unwrap();
            assert!((trace_term(&l, &psi, 0).unwrap() - cr(1.0)).norm() < 1e-15);
        }
        let diag = superop_definitional(4, 4, &config).unwrap();
        for t in [1, 10, 500] {
            assert!((trace_term(&diag, &psi, t).unwrap() - cr(1.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn trace_term_matches_direct_coin_iteration() {
        // Iterate the 2×2 operator itself: B ← Σ C_k Â B Â† C_{k'}†.
        let config = cfg(6, 0.4);
        let psi = CoinState::balanced();
        let proj = psi.projector();
        for (k, kp) in [(1, 1), (1, 3), (0, 5)] {
            let l = superop_definitional(k, kp, &config).unwrap();
            let mut b = proj.compose();
            for t in 0..40 {
                let via_matrix = trace_term(&l, &proj, t).unwrap();
                assert!((via_matrix - b.trace()).norm() < 1e-12);
                b = l.apply_operator(&b);
            }
        }
    }

    #[test]
    fn generic_trace_terms_decay() {
        let config = cfg(7, 0.5);
        let psi = CoinState::up().projector();
        let mut worst_200 = 0.0f64;
        for l in all_superops(&config, Construction::Definitional) {
            if l.is_diagonal() {
                continue;
            }
            worst_200 = worst_200.max(trace_term(&l, &psi, 200).unwrap().norm());
            assert!(trace_term(&l, &psi, 600).unwrap().norm() < 1e-8);
        }
        // The slowest pair has spectral radius ≈ 0.9687, so t = 200 is not enough
        // for 1e-8 yet.
        assert!(worst_200 < 2e-3);
    }

    #[test]
    fn trace_term_rejects_non_projector() {
        let l = superop_definitional(0, 1, &cfg(3, 0.5)).unwrap();
        let not_projector = PauliVector::from_real([1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            trace_term(&l, &not_projector, 3),
            Err(WalkError::Precondition(_))
        ));
    }

    #[test]
    fn pair_out_of_range() {
        assert!(superop_definitional(3, 0, &cfg(3, 0.5)).is_err());
        assert!(superop_closed_form(0, 7, &cfg(3, 0.5)).is_err());
    }
}
