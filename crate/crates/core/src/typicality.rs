//! Typical sets, typical projectors of the average state and conditionally
//! typical projectors of codewords.
//!
//! Sequences are enumerated exhaustively in lexicographic order (first
//! position most significant). The lexicographic index of a sequence over the
//! eigenbasis of a `d`-level state is also the row of the corresponding
//! product basis vector, which keeps the classical and operator pictures
//! aligned.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::ensembles::{checked_dim, codeword_factor, frozen_spectrum, sample_codeword, CodewordString, SourceEnsemble};
use crate::error::{Error, Result};
use crate::linops::{
    apply_product_operator, c, eig_matrix, shannon_entropy, CMatrix, HermitianOperator, Spectrum,
    SubnormalizedState, C64,
};

/// Floating slack on the closed condition `|H̄ − H| ≤ δ`.
pub const BOUNDARY_SLACK: f64 = 1e-12;
/// Default cap on the number of enumerated sequences (2^24).
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Resource caps shared by every exponential-size construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub dim_cap: usize,
    pub enumeration_cap: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            dim_cap: crate::linops::DEFAULT_DIM_CAP,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// Membership test `|H̄ − H| ≤ δ`, boundary included.
#[inline]
pub fn within_delta(sample_entropy: f64, entropy: f64, delta: f64) -> bool {
    (sample_entropy - entropy).abs() <= delta + BOUNDARY_SLACK
}

/// `H̄ = −(1/n) Σ log2 q_{x_i}`.
pub fn sample_entropy(q: &[f64], seq: &[usize]) -> Result<f64> {
    let mut acc = 0.0;
    for &x in seq {
        let p = q[x];
        if p <= 0.0 {
            return Err(Error::ZeroProbSymbol { symbol: x });
        }
        acc -= p.log2();
    }
    Ok(acc / seq.len() as f64)
}

fn enumeration_count(sizes: impl IntoIterator<Item = usize>, cap: u64) -> Result<u64> {
    let mut count: u128 = 1;
    for s in sizes {
        count = count.saturating_mul(s as u128);
    }
    if count > cap as u128 {
        return Err(Error::EnumerationCapExceeded { count, cap });
    }
    Ok(count as u64)
}

fn decode_index(mut idx: u64, radix: usize, n: usize, out: &mut [usize]) {
    for pos in (0..n).rev() {
        out[pos] = (idx % radix as u64) as usize;
        idx /= radix as u64;
    }
}

/// Exhaustively enumerated δ-typical set of i.i.d. sequences.
#[derive(Debug, Clone)]
pub struct TypicalSet {
    pub n: usize,
    pub delta: f64,
    pub distribution: Vec<f64>,
    pub entropy: f64,
    /// Lexicographic indices of the members, ascending.
    members: Vec<u64>,
}

impl TypicalSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_indices(&self) -> &[u64] {
        &self.members
    }

    pub fn members(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let d = self.distribution.len();
        self.members.iter().map(move |&idx| {
            let mut seq = vec![0; self.n];
            decode_index(idx, d, self.n, &mut seq);
            seq
        })
    }

    /// `q_x⃗ = Π q_{x_i}`.
    pub fn sequence_probability(&self, seq: &[usize]) -> f64 {
        seq.iter().map(|&x| self.distribution[x]).product()
    }

    /// `Pr(x⃗ ∈ T)`.
    pub fn probability_mass(&self) -> f64 {
        self.members().map(|s| self.sequence_probability(&s)).sum()
    }

    pub fn contains(&self, seq: &[usize]) -> bool {
        let d = self.distribution.len() as u64;
        let idx = seq.iter().fold(0u64, |acc, &x| acc * d + x as u64);
        self.members.binary_search(&idx).is_ok()
    }
}

/// `T_δⁿ = {x⃗ : |H̄(x⃗) − H(X)| ≤ δ}`; sequences through zero-probability
/// symbols are excluded.
pub fn typical_set(q: &[f64], n: usize, delta: f64, enumeration_cap: u64) -> Result<TypicalSet> {
    let d = q.len();
    let count = enumeration_count(std::iter::repeat(d).take(n), enumeration_cap)?;
    let entropy = shannon_entropy(q);
    let info: Vec<f64> = q
        .iter()
        .map(|&p| if p > 0.0 { -p.log2() } else { f64::INFINITY })
        .collect();
    let mut seq = vec![0usize; n];
    let mut members = Vec::new();
    for idx in 0..count {
        decode_index(idx, d, n, &mut seq);
        let total: f64 = seq.iter().map(|&x| info[x]).sum();
        if total.is_finite() && within_delta(total / n as f64, entropy, delta) {
            members.push(idx);
        }
    }
    Ok(TypicalSet {
        n,
        delta,
        distribution: q.to_vec(),
        entropy,
        members,
    })
}

/// Projector `Σ_{x⃗∈T} |e_x⃗⟩⟨e_x⃗|` stored through its isometry factor.
#[derive(Debug, Clone)]
pub struct TypicalProjector {
    pub n: usize,
    pub delta: f64,
    /// Per-position local eigenbases the selected sequences index into.
    pub bases: Vec<CMatrix>,
    /// Per-position local eigenvalues.
    pub local_eigenvalues: Vec<Vec<f64>>,
    pub selected: Vec<Vec<usize>>,
    isometry: CMatrix,
}

impl TypicalProjector {
    fn build(
        bases: Vec<CMatrix>,
        local_eigenvalues: Vec<Vec<f64>>,
        selected: Vec<Vec<usize>>,
        delta: f64,
    ) -> Self {
        let n = bases.len();
        let dim: usize = bases.iter().map(|b| b.nrows()).product();
        let mut isometry = CMatrix::zeros(dim, selected.len());
        for (col, seq) in selected.iter().enumerate() {
            let mut v = DVector::from_element(1, c(1.0, 0.0));
            for (pos, &y) in seq.iter().enumerate() {
                v = v.kronecker(&bases[pos].column(y));
            }
            isometry.set_column(col, &v);
        }
        Self {
            n,
            delta,
            bases,
            local_eigenvalues,
            selected,
            isometry,
        }
    }

    pub fn rank(&self) -> usize {
        self.selected.len()
    }

    pub fn dim(&self) -> usize {
        self.isometry.nrows()
    }

    /// Orthonormal columns spanning the projector's range.
    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    pub fn dense(&self) -> HermitianOperator {
        HermitianOperator::from_factor(&self.isometry)
    }

    /// Eigenvalue of the underlying product state for each selected sequence.
    pub fn selected_weights(&self) -> Vec<f64> {
        self.selected
            .iter()
            .map(|seq| {
                seq.iter()
                    .enumerate()
                    .map(|(pos, &y)| self.local_eigenvalues[pos][y])
                    .product()
            })
            .collect()
    }

    /// `Tr[P ρ]` for `ρ = W W†`.
    pub fn expectation_on_factor(&self, w: &CMatrix) -> f64 {
        (self.isometry.adjoint() * w).norm_squared()
    }
}

/// Typical projector of `ρ^{⊗n}` in the frozen eigenbasis of `ρ`.
pub fn typical_projector(rho: &SubnormalizedState, n: usize, delta: f64, limits: &Limits) -> Result<TypicalProjector> {
    typical_projector_from_spectrum(&frozen_spectrum(rho.operator()), n, delta, limits)
}

pub fn typical_projector_from_spectrum(
    spec: &Spectrum,
    n: usize,
    delta: f64,
    limits: &Limits,
) -> Result<TypicalProjector> {
    checked_dim(spec.dim(), n, limits.dim_cap)?;
    let set = typical_set(&spec.eigenvalues, n, delta, limits.enumeration_cap)?;
    let selected: Vec<Vec<usize>> = set.members().collect();
    Ok(TypicalProjector::build(
        vec![spec.eigenvectors.clone(); n],
        vec![spec.eigenvalues.clone(); n],
        selected,
        delta,
    ))
}

/// Conditionally typical projector `P_j⃗` of a codeword: product eigenvectors
/// `|e^j⃗_y⃗⟩` with `|H̄(y⃗|j⃗) − H(Y|J)| ≤ δ`. Sequences through zero
/// eigenvalues are never enumerated.
pub fn conditional_projector(
    e: &SourceEnsemble,
    w: &CodewordString,
    delta: f64,
    limits: &Limits,
) -> Result<TypicalProjector> {
    let n = w.len();
    checked_dim(e.local_dim(), n, limits.dim_cap)?;
    let h_cond = e.conditional_entropy();
    let supports: Vec<Vec<usize>> = w
        .symbols()
        .iter()
        .map(|&j| {
            let ev = &e.symbols()[j].spectrum.eigenvalues;
            (0..ev.len()).filter(|&y| ev[y] > 0.0).collect()
        })
        .collect();
    let count = enumeration_count(supports.iter().map(|s| s.len()), limits.enumeration_cap)?;
    let mut selected = Vec::new();
    let mut digits = vec![0usize; n];
    for mut idx in 0..count {
        for pos in (0..n).rev() {
            let r = supports[pos].len() as u64;
            digits[pos] = (idx % r) as usize;
            idx /= r;
        }
        let seq: Vec<usize> = (0..n).map(|pos| supports[pos][digits[pos]]).collect();
        let info: f64 = seq
            .iter()
            .zip(w.symbols())
            .map(|(&y, &j)| -e.symbols()[j].spectrum.eigenvalues[y].log2())
            .sum();
        if within_delta(info / n as f64, h_cond, delta) {
            selected.push(seq);
        }
    }
    let bases = w
        .symbols()
        .iter()
        .map(|&j| e.symbols()[j].spectrum.eigenvectors.clone())
        .collect();
    let eigs = w
        .symbols()
        .iter()
        .map(|&j| e.symbols()[j].spectrum.eigenvalues.clone())
        .collect();
    Ok(TypicalProjector::build(bases, eigs, selected, delta))
}

/// Empirical counterparts of the typical-subspace properties.
#[derive(Debug, Clone, Serialize)]
pub struct TypicalityReport {
    pub n: usize,
    pub delta: f64,
    pub average_entropy: f64,
    pub conditional_entropy: f64,
    /// `Tr[P ρ^{⊗n}]` evaluated with the full product operator.
    pub trace_p_rho: f64,
    /// `Pr(x⃗ ∈ T_δⁿ)` from the classical enumeration.
    pub classical_mass: f64,
    /// `1 − Tr[P ρ^{⊗n}]`, the measured ε₁.
    pub epsilon1: f64,
    pub rank: usize,
    /// `2^{n[S+δ]}`.
    pub rank_bound: f64,
    /// Smallest and largest `q_x⃗` over typical sequences.
    pub min_typical_weight: f64,
    pub max_typical_weight: f64,
    /// `2^{−n[S+δ]}` and `2^{−n[S−δ]}`.
    pub weight_lower_bound: f64,
    pub weight_upper_bound: f64,
    /// Extreme nonzero eigenvalues of `P ρ^{⊗n} P`, when `rank ≤ 512`.
    pub sandwich_eigen_extremes: Option<(f64, f64)>,
    pub samples: usize,
    /// Sample mean of `Tr[P_j⃗ ρ_j⃗]`.
    pub mean_conditional_trace: f64,
    /// `1 − mean_conditional_trace`, the measured ε₂.
    pub epsilon2: f64,
    pub mean_conditional_rank: f64,
    /// `2^{n[Σ p_j S(ρ_j) + δ]}`.
    pub conditional_rank_bound: f64,
    /// Extremes of `λ^j⃗_y⃗` over all sampled words and their typical `y⃗`.
    pub min_conditional_weight: f64,
    pub max_conditional_weight: f64,
    pub conditional_lower_bound: f64,
    pub conditional_upper_bound: f64,
    /// Largest `|Tr[P_j⃗ ρ_j⃗] − Pr(y⃗ ∈ T^j⃗)|` over sampled words.
    pub conditional_identity_gap: f64,
}

impl TypicalityReport {
    /// Whether the exact count and per-sequence sandwich inequalities hold,
    /// with relative slack `rel_tol` on the weight comparisons.
    pub fn bounds_hold(&self, rel_tol: f64) -> bool {
        let avg_ok = self.rank == 0
            || (self.min_typical_weight >= self.weight_lower_bound * (1.0 - rel_tol)
                && self.max_typical_weight <= self.weight_upper_bound * (1.0 + rel_tol));
        let cond_ok = self.min_conditional_weight.is_infinite()
            || (self.min_conditional_weight >= self.conditional_lower_bound * (1.0 - rel_tol)
                && self.max_conditional_weight <= self.conditional_upper_bound * (1.0 + rel_tol));
        (self.rank as f64) <= self.rank_bound && avg_ok && cond_ok
    }
}

const SANDWICH_EIG_MAX_RANK: usize = 512;

pub fn typicality_report<R: Rng + ?Sized>(
    e: &SourceEnsemble,
    n: usize,
    delta: f64,
    samples: usize,
    rng: &mut R,
    limits: &Limits,
) -> Result<TypicalityReport> {
    let spec = e.average_spectrum();
    let s = shannon_entropy(&spec.eigenvalues);
    let proj = typical_projector_from_spectrum(spec, n, delta, limits)?;
    let set = typical_set(&spec.eigenvalues, n, delta, limits.enumeration_cap)?;
    let classical_mass = set.probability_mass();

    let avg = e.average_state();
    let factors: Vec<&CMatrix> = std::iter::repeat(avg.matrix()).take(n).collect();
    let rho_v = apply_product_operator(&factors, proj.isometry());
    let compressed = proj.isometry().adjoint() * &rho_v;
    let trace_p_rho = compressed.trace().re;
    let sandwich_eigen_extremes = (proj.rank() > 0 && proj.rank() <= SANDWICH_EIG_MAX_RANK).then(|| {
        let ev = eig_matrix(&compressed).eigenvalues;
        (*ev.last().unwrap(), ev[0])
    });
    let weights = proj.selected_weights();
    let (min_w, max_w) = extremes(&weights);

    let h_cond = e.conditional_entropy();
    let mut sum_trace = 0.0;
    let mut sum_rank = 0.0;
    let mut min_c = f64::INFINITY;
    let mut max_c = f64::NEG_INFINITY;
    let mut gap: f64 = 0.0;
    for _ in 0..samples {
        let w = sample_codeword(e, n, rng);
        let pj = conditional_projector(e, &w, delta, limits)?;
        let factor = codeword_factor(e, &w, limits.dim_cap)?;
        let tr = pj.expectation_on_factor(&factor);
        let cw = pj.selected_weights();
        let mass: f64 = cw.iter().sum();
        gap = gap.max((tr - mass).abs());
        sum_trace += tr;
        sum_rank += pj.rank() as f64;
        let (lo, hi) = extremes(&cw);
        min_c = min_c.min(lo);
        max_c = max_c.max(hi);
    }
    let ns = samples.max(1) as f64;
    let nf = n as f64;
    Ok(TypicalityReport {
        n,
        delta,
        average_entropy: s,
        conditional_entropy: h_cond,
        trace_p_rho,
        classical_mass,
        epsilon1: 1.0 - trace_p_rho,
        rank: proj.rank(),
        rank_bound: (nf * (s + delta)).exp2(),
        min_typical_weight: min_w,
        max_typical_weight: max_w,
        weight_lower_bound: (-nf * (s + delta)).exp2(),
        weight_upper_bound: (-nf * (s - delta)).exp2(),
        sandwich_eigen_extremes,
        samples,
        mean_conditional_trace: sum_trace / ns,
        epsilon2: 1.0 - sum_trace / ns,
        mean_conditional_rank: sum_rank / ns,
        conditional_rank_bound: (nf * (h_cond + delta)).exp2(),
        min_conditional_weight: min_c,
        max_conditional_weight: max_c,
        conditional_lower_bound: (-nf * (h_cond + delta)).exp2(),
        conditional_upper_bound: (-nf * (h_cond - delta)).exp2(),
        conditional_identity_gap: gap,
    })
}

fn extremes(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Unit vector helper used by tests and the book.
pub fn basis_vector(dim: usize, i: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[i] = c(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::codeword_state;
    use crate::linops::{max_entry, HermitianOperator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn limits() -> Limits {
        Limits::default()
    }

    fn diag_state(v: &[f64]) -> SubnormalizedState {
        SubnormalizedState::new(HermitianOperator::from_real_diagonal(v)).unwrap()
    }

    #[test]
    fn sample_entropy_values() {
        assert_eq!(sample_entropy(&[0.5, 0.5], &[0, 1, 1, 0, 1]).unwrap(), 1.0);
        let q = [0.9, 0.1];
        assert!((sample_entropy(&q, &[0; 7]).unwrap() - 0.15200).abs() < 5e-6);
        assert!((sample_entropy(&q, &[1; 7]).unwrap() - 3.32193).abs() < 5e-6);
        assert!(matches!(
            sample_entropy(&[1.0, 0.0], &[0, 1]),
            Err(Error::ZeroProbSymbol { symbol: 1 })
        ));
    }

    #[test]
    fn typical_set_edge_cases() {
        for delta in [0.0, 0.05, 1.0] {
            assert_eq!(typical_set(&[0.5, 0.5], 4, delta, 1 << 20).unwrap().len(), 16);
        }
        let pm = typical_set(&[1.0, 0.0], 5, 0.1, 1 << 20).unwrap();
        assert_eq!(pm.members().collect::<Vec<_>>(), vec![vec![0; 5]]);
        assert!(matches!(
            typical_set(&[0.5, 0.5], 30, 0.1, 1 << 20),
            Err(Error::EnumerationCapExceeded { .. })
        ));
    }

    #[test]
    fn typical_set_matches_brute_force() {
        // independent oracle: loop over bit patterns directly
        let q = [0.9, 0.1];
        let h = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
        let mut count = 0;
        for bits in 0u32..1024 {
            let ones = bits.count_ones() as f64;
            let hbar = (-(10.0 - ones) * 0.9f64.log2() - ones * 0.1f64.log2()) / 10.0;
            if (hbar - h).abs() <= 0.2 + BOUNDARY_SLACK {
                count += 1;
            }
        }
        let set = typical_set(&q, 10, 0.2, 1 << 20).unwrap();
        assert_eq!(set.len(), count);
        assert_eq!(count, 10);
        assert!(set.contains(&[0, 0, 0, 1, 0, 0, 0, 0, 0, 0]));
        assert!(!set.contains(&[0; 10]));
    }

    #[test]
    fn typical_projector_cases() {
        let mm = typical_projector(&diag_state(&[0.5, 0.5]), 3, 0.0, &limits()).unwrap();
        assert!(mm.dense().max_entry_diff(&HermitianOperator::identity(8)) < 1e-14);

        let pure = typical_projector(&diag_state(&[0.0, 1.0]), 4, 0.0, &limits()).unwrap();
        assert_eq!(pure.rank(), 1);
        let mut e1 = DVector::zeros(16);
        e1[15] = c(1.0, 0.0);
        assert!(pure.dense().max_entry_diff(&HermitianOperator::projector_onto(&e1)) < 1e-14);

        let p = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let proj = typical_projector(&diag_state(&[p, 1.0 - p]), 8, 0.3, &limits()).unwrap();
        let set = typical_set(&[p, 1.0 - p], 8, 0.3, 1 << 20).unwrap();
        assert!((proj.dense().trace() - set.len() as f64).abs() < 1e-10);
        let d = proj.dense();
        assert!(max_entry(&(d.matrix() * d.matrix() - d.matrix())) < 1e-10);
    }

    #[test]
    fn conditional_projector_pure_symbols() {
        let e = SourceEnsemble::zero_plus();
        let w = CodewordString(vec![0, 1, 1]);
        let pj = conditional_projector(&e, &w, 0.1, &limits()).unwrap();
        assert_eq!(pj.rank(), 1);
        let st = codeword_state(&e, &w, 4096).unwrap();
        assert!(pj.dense().max_entry_diff(st.operator()) < 1e-12);
    }

    #[test]
    fn conditional_projector_rank_one_iff_entropy_within_delta() {
        // two pure symbols: H(Y|J) = 0, so the zero-entropy sequence is always typical
        let e = SourceEnsemble::zero_plus();
        assert!(e.conditional_entropy().abs() <= 0.0 + 1e-15);
        let w = CodewordString(vec![1, 0]);
        assert_eq!(conditional_projector(&e, &w, 0.0, &limits()).unwrap().rank(), 1);

        // one mixed symbol: H(Y|J) = ½ h(0.2) ≈ 0.3610 bits, pure words have H̄ = 0
        let mixed = diag_state(&[0.8, 0.2]);
        let pure = diag_state(&[1.0, 0.0]);
        let e = SourceEnsemble::new(2, vec![(0.5, mixed), (0.5, pure)]).unwrap();
        let h = 0.5 * -(0.8f64 * 0.8f64.log2() + 0.2 * 0.2f64.log2());
        assert!((e.conditional_entropy() - h).abs() < 1e-12);
        let w = CodewordString(vec![1, 1, 1]);
        assert_eq!(conditional_projector(&e, &w, h + 1e-6, &limits()).unwrap().rank(), 1);
        assert_eq!(conditional_projector(&e, &w, h - 1e-6, &limits()).unwrap().rank(), 0);
    }

    #[test]
    fn conditional_projector_single_symbol_matches_average() {
        let rho = diag_state(&[0.7, 0.3]);
        let e = SourceEnsemble::new(2, vec![(1.0, rho.clone())]).unwrap();
        let w = CodewordString(vec![0; 6]);
        let pj = conditional_projector(&e, &w, 0.2, &limits()).unwrap();
        let p = typical_projector(&rho, 6, 0.2, &limits()).unwrap();
        assert!(pj.dense().max_entry_diff(&p.dense()) < 1e-12);
    }

    #[test]
    fn conditional_rank_matches_enumeration() {
        let mixed = diag_state(&[0.8, 0.2]);
        let other = SubnormalizedState::from_matrix(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.5, 0.0)],
        ))
        .unwrap();
        let e = SourceEnsemble::new(2, vec![(0.4, mixed), (0.6, other)]).unwrap();
        let w = CodewordString(vec![0, 1, 1, 0, 1]);
        let pj = conditional_projector(&e, &w, 0.25, &limits()).unwrap();
        // independent count over all 2^5 eigen-index sequences
        let h = e.conditional_entropy();
        let mut count = 0;
        for bits in 0u32..32 {
            let mut info = 0.0;
            for pos in 0..5 {
                let y = ((bits >> (4 - pos)) & 1) as usize;
                info -= e.symbols()[w.0[pos]].spectrum.eigenvalues[y].log2();
            }
            if (info / 5.0 - h).abs() <= 0.25 + BOUNDARY_SLACK {
                count += 1;
            }
        }
        assert_eq!(pj.rank(), count);
        assert!((pj.dense().trace() - count as f64).abs() < 1e-10);
    }

    #[test]
    fn report_on_maximally_mixed_is_exact() {
        let mm = diag_state(&[0.5, 0.5]);
        let e = SourceEnsemble::new(2, vec![(1.0, mm)]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let r = typicality_report(&e, 5, 0.1, 4, &mut rng, &limits()).unwrap();
        assert!((r.trace_p_rho - 1.0).abs() < 1e-12);
        assert_eq!(r.rank, 32);
        assert!(r.bounds_hold(1e-9));
    }

    #[test]
    fn dim_cap_enforced() {
        let e = SourceEnsemble::zero_plus();
        let tight = Limits {
            dim_cap: 16,
            enumeration_cap: 1 << 20,
        };
        assert!(matches!(
            conditional_projector(&e, &CodewordString(vec![0; 5]), 0.1, &tight),
            Err(Error::DimCapExceeded { .. })
        ));
    }
}
