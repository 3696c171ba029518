//! Bisection decoders: a depth-`log₂ N` cascade of three-outcome
//! measurements, each fixing one label bit, with node elements built by
//! orthogonal span projections, by pretty good measurements, or from the
//! sequential decoder's elements. Also the full-code baselines and an
//! independent cascade simulator used as a cross-check.

mod baselines;
mod code;
mod node;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baselines::{
    full_pgm_success, full_sequential_success, hayashi_nagaoka_check, pgm_from_projectors, pgm_full,
    sequential_elements, sequential_factors,
};
pub use code::CodeInstance;
pub use node::{NodePovm, Outcome, StructuredElement};

use crate::ensembles::label_bits_of;
use crate::error::Error;
use crate::linops::{eig_hermitian, range_factor, snapped_sqrt, CMatrix, HermitianOperator, SubnormalizedState, DEFAULT_PINV_CUTOFF};
use code::hcat;

/// Rule used to build the node measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Orthogonal,
    Pgm,
    Sequential,
}

/// Whether Method-3 nodes sum globally ordered sequential elements or
/// recompute them with the ordering restricted to the node's parent set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequentialScope {
    #[default]
    Global,
    PerNode,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecoderOptions {
    /// Relative singular-value cutoff for span bases.
    pub span_cutoff: f64,
    /// Relative eigenvalue cutoff defining the support of PGM sum operators.
    pub pgm_cutoff: f64,
    pub sequential_scope: SequentialScope,
}

impl Default for DecoderOptions {
    fn default() -> Self {
        Self {
            span_cutoff: 1e-9,
            pgm_cutoff: DEFAULT_PINV_CUTOFF,
            sequential_scope: SequentialScope::Global,
        }
    }
}

/// Any decoder the experiment harness can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Orthogonal,
    Pgm,
    Sequential,
    FullSequential,
    FullPgm,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] = [
        DecoderKind::Orthogonal,
        DecoderKind::Pgm,
        DecoderKind::Sequential,
        DecoderKind::FullSequential,
        DecoderKind::FullPgm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Orthogonal => "orthogonal",
            DecoderKind::Pgm => "pgm",
            DecoderKind::Sequential => "sequential",
            DecoderKind::FullSequential => "full-sequential",
            DecoderKind::FullPgm => "full-pgm",
        }
    }

    pub fn bisection_method(self) -> Option<Method> {
        match self {
            DecoderKind::Orthogonal => Some(Method::Orthogonal),
            DecoderKind::Pgm => Some(Method::Pgm),
            DecoderKind::Sequential => Some(Method::Sequential),
            _ => None,
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.trim().to_ascii_lowercase();
        let key = key.strip_suffix("-baseline").unwrap_or(&key);
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

fn prefix_value(prefix: &[u8]) -> usize {
    prefix.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

fn with_bit(prefix: &[u8], bit: u8) -> Vec<u8> {
    let mut p = prefix.to_vec();
    p.push(bit);
    p
}

/// Method 1: `N0` projects onto the span of the 0-branch typical subspaces,
/// `N1 = 1 − N0`, `Nnull = 0`.
pub fn node_povm_orthogonal(code: &CodeInstance, prefix: &[u8], span_cutoff: f64) -> NodePovm {
    let v0 = code.stacked_isometries(code.subset(&with_bit(prefix, 0)));
    let basis = range_factor(&v0, span_cutoff).basis;
    let r = basis.ncols();
    NodePovm::new(
        prefix.to_vec(),
        basis,
        (0.0, CMatrix::identity(r, r)),
        (1.0, -CMatrix::identity(r, r)),
        (0.0, CMatrix::zeros(r, r)),
    )
}

/// Method 2: `N_k = S^{−1/2} S_k S^{−1/2}` with `S` the parent-set sum of
/// projectors, and `Nnull = 1 − Π_supp(S)`.
pub fn node_povm_pgm(code: &CodeInstance, prefix: &[u8], cutoff: f64) -> NodePovm {
    let parent = code.subset(prefix);
    let zero_cols: usize = code
        .subset(&with_bit(prefix, 0))
        .map(|l| code.isometry(l).ncols())
        .sum();
    let (basis, eigs, m) = baselines::pgm_factor(code, parent, cutoff);
    let r = basis.ncols();
    let m0 = m.columns(0, zero_cols);
    let m1 = m.columns(zero_cols, m.ncols() - zero_cols);
    let mut node = NodePovm::new(
        prefix.to_vec(),
        basis,
        (0.0, &m0 * m0.adjoint()),
        (0.0, &m1 * m1.adjoint()),
        (1.0, -CMatrix::identity(r, r)),
    );
    let support_min = eigs.last().copied().unwrap_or(0.0);
    let full_min = if r < code.dim() { 0.0 } else { support_min };
    node.sum_operator_margin = Some((full_min - 1.0, support_min - 1.0));
    node
}

/// Method 3: `N_k = Σ_{ℓ in branch k} E_ℓ`, `Nnull = 1 − N0 − N1`. `factors`
/// holds `G_ℓ` (with `E_ℓ = G_ℓ G_ℓ†`) for the parent set, in order.
fn node_povm_sequential_from(prefix: &[u8], factors: &[CMatrix], span_cutoff: f64) -> NodePovm {
    let dim = factors[0].nrows();
    let half = factors.len() / 2;
    let g0 = hcat(dim, &factors[..half]);
    let g1 = hcat(dim, &factors[half..]);
    let basis = range_factor(&hcat(dim, [&g0, &g1]), span_cutoff).basis;
    let b0 = basis.adjoint() * g0;
    let b1 = basis.adjoint() * g1;
    let c0 = &b0 * b0.adjoint();
    let c1 = &b1 * b1.adjoint();
    let null = -(&c0 + &c1);
    NodePovm::new(prefix.to_vec(), basis, (0.0, c0), (0.0, c1), (1.0, null))
}

pub fn node_povm_sequential(code: &CodeInstance, prefix: &[u8], scope: SequentialScope, span_cutoff: f64) -> NodePovm {
    let parent = code.subset(prefix);
    let factors = match scope {
        SequentialScope::Global => {
            let all = sequential_factors(code, 0..parent.end);
            all[parent].to_vec()
        }
        SequentialScope::PerNode => sequential_factors(code, parent),
    };
    node_povm_sequential_from(prefix, &factors, span_cutoff)
}

/// Complete binary tree of node measurements, stored heap-ordered: the node
/// reached after prefix `p` sits at `2^|p| − 1 + value(p)`.
#[derive(Debug, Clone)]
pub struct BisectionDecoder {
    pub method: Option<Method>,
    depth: usize,
    dim: usize,
    nodes: Vec<NodePovm>,
}

impl BisectionDecoder {
    pub fn build(code: &CodeInstance, method: Method, opts: &DecoderOptions) -> Self {
        let depth = code.label_bits();
        let global = (method == Method::Sequential && opts.sequential_scope == SequentialScope::Global)
            .then(|| sequential_factors(code, 0..code.len()));
        let mut nodes = Vec::with_capacity((1 << depth) - 1);
        for level in 0..depth {
            for v in 0..(1usize << level) {
                let prefix = label_bits_of(v, level);
                let node = match method {
                    Method::Orthogonal => node_povm_orthogonal(code, &prefix, opts.span_cutoff),
                    Method::Pgm => node_povm_pgm(code, &prefix, opts.pgm_cutoff),
                    Method::Sequential => match &global {
                        Some(g) => node_povm_sequential_from(&prefix, &g[code.subset(&prefix)], opts.span_cutoff),
                        None => node_povm_sequential(code, &prefix, SequentialScope::PerNode, opts.span_cutoff),
                    },
                };
                nodes.push(node);
            }
        }
        Self {
            method: Some(method),
            depth,
            dim: code.dim(),
            nodes,
        }
    }

    /// Decoder from explicit nodes in heap order; `nodes.len() + 1` must be a
    /// power of two.
    pub fn from_nodes(dim: usize, nodes: Vec<NodePovm>) -> crate::Result<Self> {
        let count = nodes.len() + 1;
        if !count.is_power_of_two() {
            return Err(Error::InvalidCodeSize(count));
        }
        if let Some(bad) = nodes.iter().find(|n| n.dim() != dim) {
            return Err(Error::DimMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        Ok(Self {
            method: None,
            depth: count.trailing_zeros() as usize,
            dim,
            nodes,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[NodePovm] {
        &self.nodes
    }

    pub fn node(&self, prefix: &[u8]) -> &NodePovm {
        &self.nodes[(1usize << prefix.len()) - 1 + prefix_value(prefix)]
    }

    /// Dense `F_k⃗ = M†M` with `M = √N^(u_F)⋯√N^(1)` along the path `k⃗`.
    pub fn bisection_operator(&self, k: &[u8]) -> HermitianOperator {
        assert_eq!(k.len(), self.depth, "label length must equal the decoder depth");
        let mut m = CMatrix::identity(self.dim, self.dim);
        for u in 0..self.depth {
            let node = self.node(&k[..u]);
            m = node.element(Outcome::from_bit(k[u])).sqrt_dense(&node.basis) * m;
        }
        HermitianOperator::from_factor(&m.adjoint())
    }

    /// `Tr[F_k⃗ W W†]`, evaluated as successive rectangular updates of `W`.
    pub fn leaf_probability_on_factor(&self, w: &CMatrix, k: &[u8]) -> f64 {
        let mut x = w.clone();
        for u in 0..self.depth {
            let node = self.node(&k[..u]);
            x = node.element(Outcome::from_bit(k[u])).apply_sqrt(&node.basis, &x);
        }
        x.norm_squared()
    }

    /// `p_succ(ℓ) = Tr[F_{k⃗(ℓ)} ρ_ℓ]`.
    pub fn success_probability(&self, code: &CodeInstance, l: usize) -> f64 {
        self.leaf_probability_on_factor(code.factor(l), &code.label(l))
    }

    pub fn success_probabilities(&self, code: &CodeInstance) -> Vec<f64> {
        (0..code.len()).map(|l| self.success_probability(code, l)).collect()
    }

    pub fn error_probability(&self, code: &CodeInstance) -> f64 {
        error_from_success(&self.success_probabilities(code))
    }

    /// Propagates `ρ` through the tree with dense operators: each node maps a
    /// branch state to `√N_k ρ √N_k` and banks `Tr[Nnull ρ]` as null
    /// probability. The square roots come from a fresh dense eigensolve of
    /// each element, independent of the cached structured roots.
    pub fn simulate_cascade(&self, rho: &SubnormalizedState) -> CascadeOutcome {
        let mut leaves = vec![0.0; 1 << self.depth];
        let mut null = 0.0;
        let mut stack = vec![(Vec::<u8>::new(), rho.matrix().clone())];
        while let Some((prefix, state)) = stack.pop() {
            if prefix.len() == self.depth {
                leaves[prefix_value(&prefix)] = state.trace().re;
                continue;
            }
            let node = self.node(&prefix);
            null += node.dense(Outcome::Null).matrix().component_mul(&state.transpose()).sum().re;
            for bit in [0u8, 1] {
                let root = dense_sqrt(&node.dense(Outcome::from_bit(bit)));
                let next = &root * &state * &root;
                stack.push((with_bit(&prefix, bit), next));
            }
        }
        CascadeOutcome { leaves, null }
    }
}

fn dense_sqrt(a: &HermitianOperator) -> CMatrix {
    eig_hermitian(a).apply_function(|x| snapped_sqrt(x, 1.0))
}

/// `1 − mean(p)`, clipped to `[0, 1]`.
pub fn error_from_success(p: &[f64]) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    (1.0 - p.iter().sum::<f64>() / p.len() as f64).clamp(0.0, 1.0)
}

/// Branch probabilities of a full cascade run.
#[derive(Debug, Clone, Serialize)]
pub struct CascadeOutcome {
    /// Indexed by the big-endian value of the leaf label.
    pub leaves: Vec<f64>,
    pub null: f64,
}

impl CascadeOutcome {
    pub fn leaf(&self, k: &[u8]) -> f64 {
        self.leaves[prefix_value(k)]
    }

    pub fn total(&self) -> f64 {
        self.leaves.iter().sum::<f64>() + self.null
    }
}

/// `min over 0-branch ℓ of λ_min(N0 − P_ℓ)` and `λ_min(Σ_{0-branch} P_ℓ − N0)`
/// for a Method-1 node.
pub fn orthogonal_node_margins(code: &CodeInstance, node: &NodePovm) -> (f64, f64) {
    let n0 = node.dense(Outcome::Zero);
    let branch = code.subset(&with_bit(&node.prefix, 0));
    let mut above = f64::INFINITY;
    let mut sum = HermitianOperator::zeros(code.dim());
    for l in branch {
        let p = code.projector(l);
        above = above.min(n0.sub(&p).min_eigenvalue());
        sum = sum.add(&p);
    }
    (above, sum.sub(&n0).min_eigenvalue())
}

/// Success probabilities of any decoder kind.
pub fn success_probabilities(code: &CodeInstance, kind: DecoderKind, opts: &DecoderOptions) -> Vec<f64> {
    match kind.bisection_method() {
        Some(m) => BisectionDecoder::build(code, m, opts).success_probabilities(code),
        None if kind == DecoderKind::FullSequential => full_sequential_success(code),
        None => full_pgm_success(code, opts.pgm_cutoff),
    }
}

#[cfg(test)]
mod tests;
