//! Output ensembles, random codes and the bisection set hierarchy.

use std::path::Path;

use log::warn;
use nalgebra::DVector;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{
    c, eig_hermitian, shannon_entropy, CMatrix, HermitianOperator, Spectrum, SubnormalizedState,
    C64,
};

/// Eigenvalues below this magnitude are stored as exact zeros; sequences
/// through them carry probability zero.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

const PROB_SUM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-8;
const AMPLITUDE_NORM_WARN: f64 = 1e-8;

/// One letter of the alphabet: prior, output state and its frozen eigenbasis.
#[derive(Debug, Clone)]
pub struct Symbol {
    pub prob: f64,
    pub state: SubnormalizedState,
    pub spectrum: Spectrum,
}

/// `{p_j, ρ_j}` on a `local_dim`-dimensional carrier.
#[derive(Debug, Clone)]
pub struct SourceEnsemble {
    local_dim: usize,
    symbols: Vec<Symbol>,
    average_spectrum: Spectrum,
}

/// Eigen-decomposition with near-zero eigenvalues snapped to zero.
pub(crate) fn frozen_spectrum(op: &HermitianOperator) -> Spectrum {
    let mut s = eig_hermitian(op);
    for l in s.eigenvalues.iter_mut() {
        if l.abs() < ZERO_EIGENVALUE {
            *l = 0.0;
        }
    }
    s
}

impl SourceEnsemble {
    pub fn new(local_dim: usize, symbols: Vec<(f64, SubnormalizedState)>) -> Result<Self> {
        if local_dim == 0 {
            return Err(Error::InvalidEnsemble("local dimension must be positive".into()));
        }
        if symbols.is_empty() {
            return Err(Error::InvalidEnsemble("ensemble has no symbols".into()));
        }
        let total: f64 = symbols.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut out = Vec::with_capacity(symbols.len());
        for (j, (prob, state)) in symbols.into_iter().enumerate() {
            if !(prob >= 0.0) {
                return Err(Error::InvalidEnsemble(format!(
                    "symbol {j} has negative probability {prob}"
                )));
            }
            if state.dim() != local_dim {
                return Err(Error::DimMismatch {
                    left: state.dim(),
                    right: local_dim,
                });
            }
            if (state.trace() - 1.0).abs() > TRACE_TOL {
                return Err(Error::NotNormalized {
                    trace: state.trace(),
                });
            }
            let spectrum = frozen_spectrum(state.operator());
            out.push(Symbol {
                prob,
                state,
                spectrum,
            });
        }
        let mut avg = HermitianOperator::zeros(local_dim);
        for s in &out {
            avg = avg.add(&s.state.operator().scale(s.prob));
        }
        let average_spectrum = frozen_spectrum(&avg);
        Ok(Self {
            local_dim,
            symbols: out,
            average_spectrum,
        })
    }

    /// Ensemble of pure states given as amplitude vectors; each vector is
    /// normalized, with a warning if it was off by more than 1e-8.
    pub fn from_pure(symbols: Vec<(f64, DVector<C64>)>) -> Result<Self> {
        let dim = symbols
            .first()
            .map(|(_, v)| v.len())
            .ok_or_else(|| Error::InvalidEnsemble("ensemble has no symbols".into()))?;
        let states = symbols
            .into_iter()
            .map(|(p, v)| {
                let norm = v.norm();
                if (norm - 1.0).abs() > AMPLITUDE_NORM_WARN {
                    warn!("normalizing amplitude vector with norm {norm}");
                }
                Ok((p, SubnormalizedState::pure(&v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, states)
    }

    /// `{½: |0⟩, ½: |+⟩}`, the qubit ensemble used throughout the examples.
    pub fn zero_plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_pure(vec![
            (0.5, DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])),
            (0.5, DVector::from_vec(vec![c(h, 0.0), c(h, 0.0)])),
        ])
        .expect("valid ensemble")
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.symbols.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.symbols.iter().map(|s| s.prob).collect()
    }

    /// `Σ p_j ρ_j`.
    pub fn average_state(&self) -> SubnormalizedState {
        let mut avg = HermitianOperator::zeros(self.local_dim);
        for s in &self.symbols {
            avg = avg.add(&s.state.operator().scale(s.prob));
        }
        SubnormalizedState::from_operator_unchecked(avg)
    }

    pub fn average_spectrum(&self) -> &Spectrum {
        &self.average_spectrum
    }

    /// `S(ρ̄)` in bits.
    pub fn average_entropy(&self) -> f64 {
        shannon_entropy(&self.average_spectrum.eigenvalues)
    }

    pub fn symbol_entropies(&self) -> Vec<f64> {
        self.symbols
            .iter()
            .map(|s| shannon_entropy(&s.spectrum.eigenvalues))
            .collect()
    }

    /// `H(Y|J) = Σ p_j S(ρ_j)`.
    pub fn conditional_entropy(&self) -> f64 {
        self.symbols
            .iter()
            .zip(self.symbol_entropies())
            .map(|(s, h)| s.prob * h)
            .sum()
    }

    /// Holevo information `S(Σ p_j ρ_j) − Σ p_j S(ρ_j)` in bits.
    pub fn holevo_chi(&self) -> f64 {
        (self.average_entropy() - self.conditional_entropy()).max(0.0)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: EnsembleFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.into_ensemble()
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Serializes every symbol as a full density matrix.
    pub fn to_file_format(&self) -> EnsembleFile {
        EnsembleFile {
            local_dim: self.local_dim,
            symbols: self
                .symbols
                .iter()
                .map(|s| SymbolEntry {
                    prob: s.prob,
                    state: StateEntry::Mixed {
                        matrix: (0..self.local_dim)
                            .map(|i| {
                                (0..self.local_dim)
                                    .map(|j| {
                                        let z = s.state.matrix()[(i, j)];
                                        [z.re, z.im]
                                    })
                                    .collect()
                            })
                            .collect(),
                    },
                })
                .collect(),
        }
    }
}

/// On-disk ensemble document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub local_dim: usize,
    pub symbols: Vec<SymbolEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolEntry {
    pub prob: f64,
    pub state: StateEntry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateEntry {
    Pure { amplitudes: Vec<[f64; 2]> },
    Mixed { matrix: Vec<Vec<[f64; 2]>> },
}

impl EnsembleFile {
    pub fn into_ensemble(self) -> Result<SourceEnsemble> {
        let d = self.local_dim;
        let mut symbols = Vec::with_capacity(self.symbols.len());
        for (j, entry) in self.symbols.into_iter().enumerate() {
            let state = match entry.state {
                StateEntry::Pure { amplitudes } => {
                    if amplitudes.len() != d {
                        return Err(Error::InvalidEnsemble(format!(
                            "symbol {j}: {} amplitudes for local_dim {d}",
                            amplitudes.len()
                        )));
                    }
                    let v = DVector::from_iterator(d, amplitudes.iter().map(|a| c(a[0], a[1])));
                    let norm = v.norm();
                    if (norm - 1.0).abs() > AMPLITUDE_NORM_WARN {
                        warn!("symbol {j}: normalizing amplitude vector with norm {norm}");
                    }
                    SubnormalizedState::pure(&v)?
                }
                StateEntry::Mixed { matrix } => {
                    if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                        return Err(Error::InvalidEnsemble(format!(
                            "symbol {j}: matrix is not {d}x{d}"
                        )));
                    }
                    let m = CMatrix::from_fn(d, d, |r, col| c(matrix[r][col][0], matrix[r][col][1]));
                    SubnormalizedState::from_matrix(m)?
                }
            };
            symbols.push((entry.prob, state));
        }
        SourceEnsemble::new(d, symbols)
    }
}

/// Length-n string of alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodewordString(pub Vec<usize>);

impl CodewordString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    /// `p_j⃗ = Π p_{j_i}`.
    pub fn probability(&self, e: &SourceEnsemble) -> f64 {
        self.0.iter().map(|&j| e.symbols[j].prob).product()
    }
}

/// Draws each symbol i.i.d. from the ensemble prior.
pub fn sample_codeword<R: Rng + ?Sized>(e: &SourceEnsemble, n: usize, rng: &mut R) -> CodewordString {
    let dist = WeightedIndex::new(e.probabilities()).expect("valid ensemble prior");
    CodewordString((0..n).map(|_| dist.sample(rng)).collect())
}

/// Dimension `d^n`, or `DimCapExceeded`.
pub fn checked_dim(local_dim: usize, n: usize, cap: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim
            .checked_mul(local_dim)
            .filter(|&d| d <= cap)
            .ok_or(Error::DimCapExceeded {
                dim: local_dim.saturating_pow(n as u32),
                cap,
            })?;
    }
    Ok(dim)
}

/// `ρ_{j₁} ⊗ … ⊗ ρ_{jₙ}` as a dense operator.
pub fn codeword_state(e: &SourceEnsemble, w: &CodewordString, dim_cap: usize) -> Result<SubnormalizedState> {
    checked_dim(e.local_dim, w.len(), dim_cap)?;
    let mut acc = CMatrix::identity(1, 1);
    for &j in w.symbols() {
        acc = acc.kronecker(e.symbols[j].state.matrix());
    }
    Ok(SubnormalizedState::from_operator_unchecked(
        HermitianOperator::from_matrix_unchecked(acc),
    ))
}

/// Factor `W` with `ρ_j⃗ = W W†`, built from the per-symbol spectra: one
/// column `√λ_y⃗ |e_y⃗⟩` per product eigenvector with nonzero weight.
pub fn codeword_factor(e: &SourceEnsemble, w: &CodewordString, dim_cap: usize) -> Result<CMatrix> {
    checked_dim(e.local_dim, w.len(), dim_cap)?;
    let mut acc = CMatrix::from_element(1, 1, c(1.0, 0.0));
    for &j in w.symbols() {
        let spec = &e.symbols[j].spectrum;
        let keep: Vec<usize> = (0..spec.dim()).filter(|&y| spec.eigenvalues[y] > 0.0).collect();
        let mut local = spec.eigenvectors.select_columns(keep.iter());
        for (col, &y) in keep.iter().enumerate() {
            let s = c(spec.eigenvalues[y].sqrt(), 0.0);
            for z in local.column_mut(col).iter_mut() {
                *z *= s;
            }
        }
        acc = acc.kronecker(&local);
    }
    Ok(acc)
}

/// `N = 2^{u_F}` codewords with the big-endian labeling of their 0-based
/// index: codeword `ℓ` carries the `u_F` bits of `ℓ`, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    n: usize,
    words: Vec<CodewordString>,
    label_bits: usize,
}

impl Codebook {
    /// Repeated codewords are allowed and decoded as distinct messages.
    pub fn new(words: Vec<CodewordString>) -> Result<Self> {
        let count = words.len();
        if count == 0 || !count.is_power_of_two() {
            return Err(Error::InvalidCodeSize(count));
        }
        let n = words[0].len();
        if n == 0 || words.iter().any(|w| w.len() != n) {
            return Err(Error::InvalidInstance(
                "codewords must share a positive length".into(),
            ));
        }
        Ok(Self {
            n,
            words,
            label_bits: count.trailing_zeros() as usize,
        })
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// `u_F = log2 N`.
    pub fn label_bits(&self) -> usize {
        self.label_bits
    }

    /// `u_F / n`.
    pub fn rate(&self) -> f64 {
        self.label_bits as f64 / self.n as f64
    }

    pub fn words(&self) -> &[CodewordString] {
        &self.words
    }

    pub fn word(&self, index: usize) -> &CodewordString {
        &self.words[index]
    }

    pub fn label(&self, index: usize) -> Vec<u8> {
        label_bits_of(index, self.label_bits)
    }

    pub fn index_of_label(&self, label: &[u8]) -> usize {
        label.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// Codewords whose label starts with `prefix`, ascending.
    pub fn bisection_subset(&self, prefix: &[u8]) -> Vec<usize> {
        assert!(prefix.len() <= self.label_bits, "prefix longer than label");
        (0..self.len())
            .filter(|&l| self.label(l).starts_with(prefix))
            .collect()
    }
}

pub fn label_bits_of(index: usize, bits: usize) -> Vec<u8> {
    (0..bits).rev().map(|b| ((index >> b) & 1) as u8).collect()
}

/// `N` independent codewords of length `n`.
pub fn sample_codebook<R: Rng + ?Sized>(
    e: &SourceEnsemble,
    n: usize,
    count: usize,
    rng: &mut R,
) -> Result<Codebook> {
    if count < 2 || !count.is_power_of_two() {
        return Err(Error::InvalidCodeSize(count));
    }
    let words = (0..count).map(|_| sample_codeword(e, n, rng)).collect();
    Codebook::new(words)
}
