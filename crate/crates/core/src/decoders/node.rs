use serde::Serialize;

use crate::linops::{c, eig_matrix, max_entry, snapped_sqrt, CMatrix, HermitianOperator, IntervalReport};

/// One outcome of a node measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Zero,
    One,
    Null,
}

impl Outcome {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Outcome::Zero
        } else {
            Outcome::One
        }
    }

    fn slot(self) -> usize {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
            Outcome::Null => 2,
        }
    }
}

/// Element `a·1 + U C U†` where the columns of `U` (owned by the node) are
/// orthonormal. Its square root is kept in the same form.
#[derive(Debug, Clone)]
pub struct StructuredElement {
    pub scalar: f64,
    pub core: CMatrix,
    sqrt_scalar: f64,
    sqrt_core: CMatrix,
    interval: IntervalReport,
}

impl StructuredElement {
    /// `full_rank` says whether the node basis spans the whole space, in
    /// which case `a` is not itself an eigenvalue.
    pub fn new(scalar: f64, core: CMatrix, full_rank: bool) -> Self {
        let r = core.nrows();
        let shifted = &core + CMatrix::identity(r, r) * c(scalar, 0.0);
        let spec = eig_matrix(&shifted);
        let mut lo = if full_rank { f64::INFINITY } else { scalar };
        let mut hi = if full_rank { f64::NEG_INFINITY } else { scalar };
        for &x in &spec.eigenvalues {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if !lo.is_finite() {
            // zero-dimensional space
            lo = 0.0;
            hi = 0.0;
        }
        let sqrt_scalar = snapped_sqrt(scalar, 1.0);
        let sqrt_core = spec.apply_function(|x| snapped_sqrt(x, 1.0)) - CMatrix::identity(r, r) * c(sqrt_scalar, 0.0);
        Self {
            scalar,
            core,
            sqrt_scalar,
            sqrt_core,
            interval: IntervalReport::from_extremes(lo, hi),
        }
    }

    pub fn interval(&self) -> IntervalReport {
        self.interval
    }

    pub fn to_dense(&self, basis: &CMatrix) -> HermitianOperator {
        let d = basis.nrows();
        let m = CMatrix::identity(d, d) * c(self.scalar, 0.0) + basis * &self.core * basis.adjoint();
        HermitianOperator::from_matrix_unchecked(m)
    }

    pub fn sqrt_dense(&self, basis: &CMatrix) -> CMatrix {
        let d = basis.nrows();
        CMatrix::identity(d, d) * c(self.sqrt_scalar, 0.0) + basis * &self.sqrt_core * basis.adjoint()
    }

    /// `√N · X`.
    pub fn apply_sqrt(&self, basis: &CMatrix, x: &CMatrix) -> CMatrix {
        let proj = basis.adjoint() * x;
        x * c(self.sqrt_scalar, 0.0) + basis * (&self.sqrt_core * proj)
    }

    /// `Tr[N W W†]`.
    pub fn expectation_on_factor(&self, basis: &CMatrix, w: &CMatrix) -> f64 {
        let proj = basis.adjoint() * w;
        self.scalar * w.norm_squared() + (proj.adjoint() * &self.core * proj).trace().re
    }
}

/// Three-outcome measurement at one node of the bisection tree.
#[derive(Debug, Clone)]
pub struct NodePovm {
    /// Bits `k₁…k_{u−1}` already fixed when this node is reached.
    pub prefix: Vec<u8>,
    pub basis: CMatrix,
    elements: [StructuredElement; 3],
    /// `λ_min(S) − 1` over the whole space and over the support of `S`,
    /// where `S` is the parent-set sum of projectors (PGM nodes only).
    pub sum_operator_margin: Option<(f64, f64)>,
}

impl NodePovm {
    pub fn new(prefix: Vec<u8>, basis: CMatrix, zero: (f64, CMatrix), one: (f64, CMatrix), null: (f64, CMatrix)) -> Self {
        let full = basis.ncols() >= basis.nrows();
        Self {
            prefix,
            elements: [
                StructuredElement::new(zero.0, zero.1, full),
                StructuredElement::new(one.0, one.1, full),
                StructuredElement::new(null.0, null.1, full),
            ],
            basis,
            sum_operator_margin: None,
        }
    }

    /// Node built from dense elements; the basis is the full standard basis.
    pub fn from_dense(prefix: Vec<u8>, n0: &HermitianOperator, n1: &HermitianOperator, null: &HermitianOperator) -> Self {
        let d = n0.dim();
        Self::new(
            prefix,
            CMatrix::identity(d, d),
            (0.0, n0.matrix().clone()),
            (0.0, n1.matrix().clone()),
            (0.0, null.matrix().clone()),
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn element(&self, k: Outcome) -> &StructuredElement {
        &self.elements[k.slot()]
    }

    pub fn dense(&self, k: Outcome) -> HermitianOperator {
        self.element(k).to_dense(&self.basis)
    }

    /// Upper bound on `‖N0 + N1 + Nnull − 1‖_max` evaluated in the node basis.
    pub fn completeness_defect(&self) -> f64 {
        let a: f64 = self.elements.iter().map(|e| e.scalar).sum();
        let core = &self.elements[0].core + &self.elements[1].core + &self.elements[2].core;
        (a - 1.0).abs() + core.norm()
    }

    /// `‖N0 + N1 + Nnull − 1‖_max` from the dense elements.
    pub fn dense_completeness_defect(&self) -> f64 {
        let d = self.dim();
        let sum = self.dense(Outcome::Zero).add(&self.dense(Outcome::One)).add(&self.dense(Outcome::Null));
        max_entry(&(sum.into_matrix() - CMatrix::identity(d, d)))
    }

    /// Largest distance of any element's spectrum from `[0, 1]`.
    pub fn interval_violation(&self) -> f64 {
        self.elements.iter().map(|e| e.interval.violation()).fold(0.0, f64::max)
    }

    pub fn intervals(&self) -> [IntervalReport; 3] {
        [self.elements[0].interval, self.elements[1].interval, self.elements[2].interval]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_povm_element, random_projector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn structured_sqrt_matches_dense() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let p = random_projector(&mut rng, 6, 3);
        let basis = crate::linops::range_factor(p.matrix(), 1e-9).basis;
        let e = random_povm_element(&mut rng, 3);
        let el = StructuredElement::new(0.2, e.matrix() * c(0.5, 0.0), false);
        let dense = el.to_dense(&basis);
        let sq = el.sqrt_dense(&basis);
        assert!(max_entry(&(&sq * &sq - dense.matrix())) < 1e-12);
        let x = CMatrix::identity(6, 6);
        assert!(max_entry(&(el.apply_sqrt(&basis, &x) - sq)) < 1e-12);
        assert!((el.interval().min_eigenvalue - dense.min_eigenvalue()).abs() < 1e-12);
        assert!((el.interval().max_eigenvalue - dense.max_eigenvalue()).abs() < 1e-12);
    }

    #[test]
    fn complement_node_is_complete() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let p = random_projector(&mut rng, 5, 2);
        let basis = crate::linops::range_factor(p.matrix(), 1e-9).basis;
        let r = basis.ncols();
        let node = NodePovm::new(
            vec![],
            basis,
            (0.0, CMatrix::identity(r, r)),
            (1.0, -CMatrix::identity(r, r)),
            (0.0, CMatrix::zeros(r, r)),
        );
        assert!(node.completeness_defect() < 1e-14);
        assert!(node.dense_completeness_defect() < 1e-14);
        assert!(node.dense(Outcome::Zero).max_entry_diff(&p) < 1e-12);
        assert!(node.interval_violation() < 1e-12);
    }
}
