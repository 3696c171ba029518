//! Seeded random operators and states for property checks.
//!
//! States are Wishart-style: `G G†` for a complex Gaussian `G`, normalized
//! and rescaled to the requested trace. POVM elements are `A†A` divided by
//! its largest eigenvalue and then by a uniform factor, so both interior
//! points and the boundary `‖E‖ = 1` of the constraint set are covered.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linops::{c, eig_hermitian, CMatrix, HermitianOperator, SubnormalizedState, C64};

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    HermitianOperator::from_matrix_unchecked(gaussian_matrix(rng, dim, dim))
}

/// PSD operator of the given rank (rank ≤ dim), unnormalized.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> HermitianOperator {
    let g = gaussian_matrix(rng, dim, rank);
    HermitianOperator::from_factor(&g)
}

/// Full-rank Wishart state with the given trace.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize, trace: f64) -> SubnormalizedState {
    random_state_of_rank(rng, dim, dim, trace)
}

pub fn random_state_of_rank<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
    trace: f64,
) -> SubnormalizedState {
    let w = random_psd(rng, dim, rank);
    let t = w.trace();
    SubnormalizedState::new(w.scale(trace / t)).expect("Wishart state is valid")
}

/// Subnormalized state with trace uniform in (0, 1].
pub fn random_subnormalized<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> SubnormalizedState {
    let t: f64 = 1.0 - rng.random::<f64>();
    let rank = rng.random_range(1..=dim);
    random_state_of_rank(rng, dim, rank, t)
}

/// `0 ≤ E ≤ 1`; with probability ½ the spectral norm is exactly one.
pub fn random_povm_element<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let rank = rng.random_range(1..=dim);
    let a = random_psd(rng, dim, rank);
    let top = eig_hermitian(&a).eigenvalues[0];
    let shrink = if rng.random::<bool>() {
        1.0
    } else {
        1.0 - rng.random::<f64>()
    };
    a.scale(shrink / top)
}

/// Orthogonal projector of the given rank onto a Haar-like random subspace.
pub fn random_projector<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> HermitianOperator {
    if rank == 0 {
        return HermitianOperator::zeros(dim);
    }
    let g = gaussian_matrix(rng, dim, rank);
    let q = g.qr().q();
    HermitianOperator::from_factor(&q)
}

/// `rank` random orthonormal columns in dimension `dim`.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> CMatrix {
    if rank == 0 {
        return CMatrix::zeros(dim, 0);
    }
    gaussian_matrix(rng, dim, rank).qr().q()
}

/// Factor `W` with `Tr[W W†] = 1`.
pub fn random_state_factor<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> CMatrix {
    let g = gaussian_matrix(rng, dim, rank);
    let n = g.norm();
    g / c(n, 0.0)
}

/// Normalized random amplitude vector.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> nalgebra::DVector<C64> {
    let g = gaussian_matrix(rng, dim, 1).column(0).into_owned();
    let n = g.norm();
    g / c(n, 0.0)
}
