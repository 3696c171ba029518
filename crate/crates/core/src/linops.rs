//! Dense Hermitian operator algebra.
//!
//! Operators live in `DMatrix<Complex64>`. [`HermitianOperator`] and
//! [`SubnormalizedState`] are validated wrappers used at API boundaries;
//! the raw [`CMatrix`] type is used for intermediate, possibly
//! non-Hermitian products (for example the path products of a decoder).
//!
//! Tensor products follow the row-major convention: the first factor is the
//! most significant index, so `(A ⊗ B)[(i,k),(j,l)] = A[i][j]·B[k][l]` with
//! composite index `i·dim(B) + k`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Relative asymmetry tolerated by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute slack for PSD and trace checks on states.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues below `-NOT_PSD_TOL·λmax` make a square root fail.
pub const NOT_PSD_TOL: f64 = 1e-8;
/// Default support cutoff for [`pinv_sqrt`], relative to the largest eigenvalue.
pub const DEFAULT_PINV_CUTOFF: f64 = 1e-9;
/// Default cap on Hilbert-space dimension (2^12).
pub const DEFAULT_DIM_CAP: usize = 4096;
/// Eigenvalues below this fraction of the scale are taken as exact zeros
/// before a square root; rounding noise of order 1e−16 would otherwise turn
/// into 1e−8 entries.
pub const SQRT_SNAP: f64 = 1e-13;

/// `√x` with `x ≤ SQRT_SNAP·scale` mapped to zero.
#[inline]
pub fn snapped_sqrt(x: f64, scale: f64) -> f64 {
    if x <= SQRT_SNAP * scale {
        0.0
    } else {
        x.sqrt()
    }
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of a matrix.
pub fn max_entry(m: &CMatrix) -> f64 {
    max_abs(m)
}

/// `max |A[i][j] − conj(A[j][i])|`.
pub fn asymmetry(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity (relative to the largest entry) and stores the
    /// exactly symmetrized matrix.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimMismatch {
                left: mat.nrows(),
                right: mat.ncols(),
            });
        }
        let asym = asymmetry(&mat);
        if asym > HERMITIAN_TOL * max_abs(&mat).max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidOperator { asymmetry: asym });
        }
        Ok(Self::from_matrix_unchecked(mat))
    }

    /// Symmetrizes `(M + M†)/2` without checking.
    pub fn from_matrix_unchecked(mat: CMatrix) -> Self {
        let sym = (&mat + mat.adjoint()) * c(0.5, 0.0);
        Self { mat: sym }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x, 0.0)));
        Self {
            mat: CMatrix::from_diagonal(&d),
        }
    }

    /// `|ψ⟩⟨ψ|` for an (unnormalized) amplitude vector.
    pub fn projector_onto(psi: &DVector<C64>) -> Self {
        Self::from_matrix_unchecked(psi * psi.adjoint())
    }

    /// `V V†` for a block of columns.
    pub fn from_factor(v: &CMatrix) -> Self {
        Self::from_matrix_unchecked(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `Tr[self · other]`.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        // Tr[AB] = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij) for Hermitian B.
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            mat: &self.mat - &other.mat,
        }
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        Self {
            mat: &self.mat * c(s, 0.0),
        }
    }

    /// `X · self · X†`.
    pub fn conjugate_by(&self, x: &CMatrix) -> HermitianOperator {
        Self::from_matrix_unchecked(x * &self.mat * x.adjoint())
    }

    pub fn max_entry(&self) -> f64 {
        max_abs(&self.mat)
    }

    pub fn max_entry_diff(&self, other: &HermitianOperator) -> f64 {
        max_abs(&(&self.mat - &other.mat))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eig_hermitian(self).eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        eig_hermitian(self).eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Positive operator with trace at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct SubnormalizedState {
    op: HermitianOperator,
}

impl SubnormalizedState {
    /// Accepts PSD operators with `0 ≤ Tr ≤ 1 + 1e-10`. The zero state is
    /// allowed; it arises as the output of a null measurement branch.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !(-STATE_TOL..=1.0 + STATE_TOL).contains(&tr) {
            return Err(Error::NotNormalized { trace: tr });
        }
        let min = op.min_eigenvalue();
        if min < -STATE_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self { op })
    }

    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(mat)?)
    }

    pub(crate) fn from_operator_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { trace: 0.0 });
        }
        Self::new(HermitianOperator::projector_onto(&(psi / c(norm, 0.0))))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }
}

/// Eigen-decomposition `A = V diag(λ) V†`, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_function(|x| x)
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let w = c(f(lam), 0.0);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= w;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    /// Columns of `V` whose eigenvalue satisfies `keep`.
    pub fn columns_where(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let idx: Vec<usize> = (0..self.dim())
            .filter(|&j| keep(self.eigenvalues[j]))
            .collect();
        self.eigenvectors.select_columns(idx.iter())
    }
}

/// Hermitian eigensolver on a raw matrix; the input is symmetrized first.
pub fn eig_matrix(m: &CMatrix) -> Spectrum {
    let n = m.nrows();
    if n == 0 {
        return Spectrum {
            eigenvalues: vec![],
            eigenvectors: CMatrix::zeros(0, 0),
        };
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = eig.eigenvectors.select_columns(order.iter());
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

pub fn eig_hermitian(a: &HermitianOperator) -> Spectrum {
    eig_matrix(a.matrix())
}

/// Validating entry point for raw matrices.
pub fn eig_hermitian_checked(m: &CMatrix) -> Result<Spectrum> {
    Ok(eig_hermitian(&HermitianOperator::new(m.clone())?))
}

fn clip_psd(spec: &Spectrum) -> Result<Vec<f64>> {
    let lmax = spec.spectral_radius();
    let mut out = Vec::with_capacity(spec.dim());
    for &l in &spec.eigenvalues {
        if l < -NOT_PSD_TOL * lmax {
            return Err(Error::NotPsd { min_eigenvalue: l });
        }
        out.push(if l <= SQRT_SNAP * lmax { 0.0 } else { l });
    }
    Ok(out)
}

/// Principal square root of a PSD operator; tiny negative eigenvalues are
/// clipped to zero.
pub fn matrix_sqrt_psd(a: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = eig_hermitian(a);
    let clipped = clip_psd(&spec)?;
    let s = Spectrum {
        eigenvalues: clipped,
        eigenvectors: spec.eigenvectors,
    };
    Ok(HermitianOperator::from_matrix_unchecked(
        s.apply_function(f64::sqrt),
    ))
}

/// Inverse square root restricted to the support of `a`. Eigenvalues at or
/// below `cutoff·λmax` are treated as zero; an all-zero input yields the
/// zero operator.
pub fn pinv_sqrt(a: &HermitianOperator, cutoff: f64) -> HermitianOperator {
    let spec = eig_hermitian(a);
    let lmax = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if lmax <= 0.0 {
        return HermitianOperator::zeros(a.dim());
    }
    let thr = cutoff * lmax;
    HermitianOperator::from_matrix_unchecked(
        spec.apply_function(|l| if l > thr { l.powf(-0.5) } else { 0.0 }),
    )
}

/// Projector onto the eigenspace of `a` with eigenvalues above `cutoff·λmax`.
pub fn support_projector(a: &HermitianOperator, cutoff: f64) -> HermitianOperator {
    let spec = eig_hermitian(a);
    let lmax = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if lmax <= 0.0 {
        return HermitianOperator::zeros(a.dim());
    }
    let thr = cutoff * lmax;
    HermitianOperator::from_matrix_unchecked(
        spec.apply_function(|l| if l > thr { 1.0 } else { 0.0 }),
    )
}

/// `Σ|λ_i|`.
pub fn trace_norm(h: &HermitianOperator) -> f64 {
    eig_hermitian(h).eigenvalues.iter().map(|l| l.abs()).sum()
}

/// Projectors onto the strictly positive and strictly negative eigenspaces.
/// Their difference attains the maximum of `Tr[Λ h]` over `−1 ≤ Λ ≤ 1`.
pub fn sign_projectors(h: &HermitianOperator) -> (HermitianOperator, HermitianOperator) {
    let spec = eig_hermitian(h);
    let pos = HermitianOperator::from_matrix_unchecked(
        spec.apply_function(|l| if l > 0.0 { 1.0 } else { 0.0 }),
    );
    let neg = HermitianOperator::from_matrix_unchecked(
        spec.apply_function(|l| if l < 0.0 { 1.0 } else { 0.0 }),
    );
    (pos, neg)
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &SubnormalizedState, sigma: &SubnormalizedState) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    Ok(0.5 * trace_norm(&rho.operator().sub(sigma.operator())))
}

/// Shannon entropy in bits of a probability list; zero entries contribute 0.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &SubnormalizedState) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { trace: tr });
    }
    let spec = eig_hermitian(rho.operator());
    let clipped = clip_psd(&spec)?;
    Ok(shannon_entropy(&clipped))
}

/// Raw Kronecker product.
pub fn kron_matrix(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `A ⊗ B`, refusing results whose dimension exceeds `dim_cap`.
pub fn kron(a: &HermitianOperator, b: &HermitianOperator, dim_cap: usize) -> Result<HermitianOperator> {
    let dim = a.dim() * b.dim();
    if dim > dim_cap {
        return Err(Error::DimCapExceeded { dim, cap: dim_cap });
    }
    Ok(HermitianOperator {
        mat: kron_matrix(a.matrix(), b.matrix()),
    })
}

/// Applies `A₁ ⊗ … ⊗ A_n` to every column of `x` factor by factor, without
/// forming the full product.
pub fn apply_product_operator(factors: &[&CMatrix], x: &CMatrix) -> CMatrix {
    let dims: Vec<usize> = factors.iter().map(|f| f.nrows()).collect();
    let total: usize = dims.iter().product();
    assert_eq!(total, x.nrows(), "product operator dimension mismatch");
    let mut cur = x.clone();
    let mut next = CMatrix::zeros(x.nrows(), x.ncols());
    for (k, a) in factors.iter().enumerate() {
        let d = dims[k];
        let right: usize = dims[k + 1..].iter().product();
        let left = total / (d * right);
        next.fill(c(0.0, 0.0));
        for col in 0..x.ncols() {
            for l in 0..left {
                for r in 0..right {
                    for i in 0..d {
                        let mut acc = c(0.0, 0.0);
                        for j in 0..d {
                            acc += a[(i, j)] * cur[((l * d + j) * right + r, col)];
                        }
                        next[((l * d + i) * right + r, col)] = acc;
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `√E ρ √E` for `0 ≤ E ≤ 1`.
pub fn sandwich(e: &HermitianOperator, rho: &SubnormalizedState) -> Result<SubnormalizedState> {
    if e.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            left: e.dim(),
            right: rho.dim(),
        });
    }
    let report = unit_interval_report(e);
    if !report.within {
        return Err(Error::InvalidPovmElement {
            min: report.min_eigenvalue,
            max: report.max_eigenvalue,
        });
    }
    let root = matrix_sqrt_psd(e)?;
    Ok(SubnormalizedState::from_operator_unchecked(
        rho.operator().conjugate_by(root.matrix()),
    ))
}

/// Extreme eigenvalues of an operator and whether it lies in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalReport {
    pub within: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl IntervalReport {
    pub fn from_extremes(min_eigenvalue: f64, max_eigenvalue: f64) -> Self {
        Self {
            within: min_eigenvalue >= -STATE_TOL && max_eigenvalue <= 1.0 + STATE_TOL,
            min_eigenvalue,
            max_eigenvalue,
        }
    }

    /// Amount by which the spectrum leaves `[0, 1]`; zero when inside.
    pub fn violation(&self) -> f64 {
        (self.max_eigenvalue - 1.0).max(-self.min_eigenvalue).max(0.0)
    }

    pub fn excess_above(&self) -> f64 {
        self.max_eigenvalue - 1.0
    }
}

pub fn unit_interval_report(e: &HermitianOperator) -> IntervalReport {
    let spec = eig_hermitian(e);
    let max = spec.eigenvalues.first().copied().unwrap_or(0.0);
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    IntervalReport::from_extremes(min, max)
}

/// Thin SVD summary of a column block `V = U Σ W†`, restricted to singular
/// values above `rel_cutoff·σmax`.
#[derive(Debug, Clone)]
pub struct RangeFactor {
    /// Orthonormal basis of the retained column space (`rows × r`).
    pub basis: CMatrix,
    pub singular_values: Vec<f64>,
    /// `W†` restricted to the retained singular vectors (`r × cols`).
    pub right_adjoint: CMatrix,
}

impl RangeFactor {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }
}

pub fn range_factor(v: &CMatrix, rel_cutoff: f64) -> RangeFactor {
    let (rows, cols) = v.shape();
    if rows == 0 || cols == 0 {
        return RangeFactor {
            basis: CMatrix::zeros(rows, 0),
            singular_values: vec![],
            right_adjoint: CMatrix::zeros(0, cols),
        };
    }
    let svd = v.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let vt = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &x| a.max(x));
    let mut keep: Vec<usize> = (0..sv.len())
        .filter(|&i| smax > 0.0 && sv[i] > rel_cutoff * smax)
        .collect();
    keep.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    RangeFactor {
        basis: u.select_columns(keep.iter()),
        singular_values: keep.iter().map(|&i| sv[i]).collect(),
        right_adjoint: vt.select_rows(keep.iter()),
    }
}

/// `‖V†V − I‖_max` for a column block.
pub fn orthonormality_defect(v: &CMatrix) -> f64 {
    let g = v.adjoint() * v;
    max_abs(&(g - CMatrix::identity(v.ncols(), v.ncols())))
}
