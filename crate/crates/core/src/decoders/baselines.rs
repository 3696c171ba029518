//! Sequential and pretty-good-measurement decoders over a whole code (or a
//! contiguous block of it), plus the Hayashi–Nagaoka operator check.

use std::ops::Range;

use super::code::CodeInstance;
use crate::linops::{pinv_sqrt, range_factor, CMatrix, HermitianOperator};

/// Factors `G_ℓ = Q₁⋯Q_{ℓ−1} V_ℓ` with `E_ℓ = G_ℓ G_ℓ†`, where the ordering
/// runs over `range` only.
pub fn sequential_factors(code: &CodeInstance, range: Range<usize>) -> Vec<CMatrix> {
    let start = range.start;
    range
        .map(|l| {
            let mut x = code.isometry(l).clone();
            for i in (start..l).rev() {
                let v = code.isometry(i);
                let overlap = v.adjoint() * &x;
                x -= v * overlap;
            }
            x
        })
        .collect()
}

/// Sequential decoding elements `E_ℓ` and the no-detection element
/// `E₀ = 1 − Σ E_ℓ`.
pub fn sequential_elements(code: &CodeInstance) -> (Vec<HermitianOperator>, HermitianOperator) {
    let elements: Vec<HermitianOperator> = sequential_factors(code, 0..code.len())
        .iter()
        .map(HermitianOperator::from_factor)
        .collect();
    let sum = elements
        .iter()
        .fold(HermitianOperator::zeros(code.dim()), |acc, e| acc.add(e));
    let e0 = HermitianOperator::identity(code.dim()).sub(&sum);
    (elements, e0)
}

/// Range factor of `S = Σ_{ℓ∈range} P_ℓ` with eigenvalues below
/// `cutoff · λ_max(S)` discarded. Returns the support basis `B`, the kept
/// eigenvalues of `S`, and `M = S^{−1/2}|_B · B† · [V_ℓ…]` (rows of `M` are
/// orthonormal).
pub(crate) fn pgm_factor(code: &CodeInstance, range: Range<usize>, cutoff: f64) -> (CMatrix, Vec<f64>, CMatrix) {
    let v = code.stacked_isometries(range);
    let rf = range_factor(&v, cutoff.sqrt());
    let eigs = rf.singular_values.iter().map(|s| s * s).collect();
    (rf.basis, eigs, rf.right_adjoint)
}

/// Full pretty good measurement `Λ_ℓ = S^{−1/2} P_ℓ S^{−1/2}`, inverse on the
/// support of `S`.
pub fn pgm_full(code: &CodeInstance, cutoff: f64) -> Vec<HermitianOperator> {
    let (basis, _, m) = pgm_factor(code, 0..code.len(), cutoff);
    let mut at = 0;
    (0..code.len())
        .map(|l| {
            let r = code.isometry(l).ncols();
            let g = &basis * m.columns(at, r);
            at += r;
            HermitianOperator::from_factor(&g)
        })
        .collect()
}

/// Dense pretty good measurement built directly from projectors.
pub fn pgm_from_projectors(projectors: &[HermitianOperator], cutoff: f64) -> Vec<HermitianOperator> {
    let dim = projectors[0].dim();
    let s = projectors
        .iter()
        .fold(HermitianOperator::zeros(dim), |acc, p| acc.add(p));
    let s_inv = pinv_sqrt(&s, cutoff);
    projectors.iter().map(|p| p.conjugate_by(s_inv.matrix())).collect()
}

/// `Tr[E_ℓ ρ_ℓ]` for the sequential decoder over the whole code.
pub fn full_sequential_success(code: &CodeInstance) -> Vec<f64> {
    sequential_factors(code, 0..code.len())
        .iter()
        .enumerate()
        .map(|(l, g)| (g.adjoint() * code.factor(l)).norm_squared())
        .collect()
}

/// `Tr[Λ_ℓ ρ_ℓ]` for the full pretty good measurement.
pub fn full_pgm_success(code: &CodeInstance, cutoff: f64) -> Vec<f64> {
    let (basis, _, m) = pgm_factor(code, 0..code.len(), cutoff);
    let mut at = 0;
    (0..code.len())
        .map(|l| {
            let r = code.isometry(l).ncols();
            let proj = basis.adjoint() * code.factor(l);
            let p = (m.columns(at, r).adjoint() * proj).norm_squared();
            at += r;
            p
        })
        .collect()
}

/// `λ_min[2Q_ℓ + 4 Σ_{ℓ'≠ℓ} P_ℓ' − (1 − Λ_ℓ)]`.
pub fn hayashi_nagaoka_check(lambdas: &[HermitianOperator], projectors: &[HermitianOperator], l: usize) -> f64 {
    let dim = projectors[l].dim();
    let id = HermitianOperator::identity(dim);
    let mut rhs = id.sub(&projectors[l]).scale(2.0);
    for (i, p) in projectors.iter().enumerate() {
        if i != l {
            rhs = rhs.add(&p.scale(4.0));
        }
    }
    rhs.sub(&id.sub(&lambdas[l])).min_eigenvalue()
}
