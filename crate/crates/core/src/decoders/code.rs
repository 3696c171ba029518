use std::ops::Range;

use crate::ensembles::{codeword_factor, Codebook, SourceEnsemble};
use crate::error::{Error, Result};
use crate::linops::{CMatrix, HermitianOperator, SubnormalizedState};
use crate::typicality::{conditional_projector, Limits};

/// Everything a decoder needs to know about a code: the range of each
/// codeword's conditionally typical projector and a factor `W` of each
/// codeword state `ρ = W W†`.
#[derive(Debug, Clone)]
pub struct CodeInstance {
    dim: usize,
    label_bits: usize,
    isometries: Vec<CMatrix>,
    factors: Vec<CMatrix>,
}

impl CodeInstance {
    pub fn from_codebook(e: &SourceEnsemble, cb: &Codebook, delta: f64, limits: &Limits) -> Result<Self> {
        let mut isometries = Vec::with_capacity(cb.len());
        let mut factors = Vec::with_capacity(cb.len());
        for w in cb.words() {
            isometries.push(conditional_projector(e, w, delta, limits)?.isometry().clone());
            factors.push(codeword_factor(e, w, limits.dim_cap)?);
        }
        Self::from_parts(isometries, factors)
    }

    /// Code from explicit projector ranges (orthonormal columns) and state
    /// factors. The number of words must be a power of two.
    pub fn from_parts(isometries: Vec<CMatrix>, factors: Vec<CMatrix>) -> Result<Self> {
        let n = isometries.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidCodeSize(n));
        }
        if factors.len() != n {
            return Err(Error::DimMismatch {
                left: n,
                right: factors.len(),
            });
        }
        let dim = isometries[0].nrows();
        for m in isometries.iter().chain(&factors) {
            if m.nrows() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: m.nrows(),
                });
            }
        }
        Ok(Self {
            dim,
            label_bits: n.trailing_zeros() as usize,
            isometries,
            factors,
        })
    }

    pub fn len(&self) -> usize {
        self.isometries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.isometries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label_bits(&self) -> usize {
        self.label_bits
    }

    pub fn isometry(&self, l: usize) -> &CMatrix {
        &self.isometries[l]
    }

    pub fn factor(&self, l: usize) -> &CMatrix {
        &self.factors[l]
    }

    pub fn projector(&self, l: usize) -> HermitianOperator {
        HermitianOperator::from_factor(&self.isometries[l])
    }

    pub fn state(&self, l: usize) -> SubnormalizedState {
        SubnormalizedState::from_operator_unchecked(HermitianOperator::from_factor(&self.factors[l]))
    }

    pub fn label(&self, l: usize) -> Vec<u8> {
        crate::ensembles::label_bits_of(l, self.label_bits)
    }

    /// Indices whose label starts with `prefix` (a contiguous block).
    pub fn subset(&self, prefix: &[u8]) -> Range<usize> {
        let v = prefix.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let shift = self.label_bits - prefix.len();
        (v << shift)..((v + 1) << shift)
    }

    /// Columns of the projector ranges of `range`, side by side.
    pub fn stacked_isometries(&self, range: Range<usize>) -> CMatrix {
        hcat(self.dim, range.map(|l| &self.isometries[l]))
    }
}

pub(crate) fn hcat<'a>(rows: usize, blocks: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    let blocks: Vec<&CMatrix> = blocks.into_iter().collect();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}
