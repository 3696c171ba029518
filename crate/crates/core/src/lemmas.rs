//! Numerical checks of the operator inequalities the decoding analysis rests
//! on, on single instances and on seeded random families.
//!
//! Every report carries a margin whose sign convention makes `margin ≥ 0`
//! mean "inequality holds"; a report passes when `margin ≥ −1e−9`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::decoders::{hayashi_nagaoka_check, pgm_from_projectors};
use crate::error::{Error, Result};
use crate::linops::{
    eig_hermitian, sign_projectors, support_projector, trace_norm, unit_interval_report, HermitianOperator,
    SubnormalizedState,
};
use crate::random::{random_hermitian, random_povm_element, random_projector, random_subnormalized};

pub const PASS_TOL: f64 = 1e-9;
/// Allowed slack on `0 ≤ E ≤ 1` when validating inputs.
pub const POVM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    /// `Tr[Eρ] ≥ Tr[Eσ] − 2D(ρ,σ)`.
    CloseStates,
    /// `⟨D(√Eρ√E, ρ)⟩ ≤ √ε` when `⟨Tr[Eρ]⟩ ≥ 1 − ε`.
    GentleOperator,
    /// `‖ω‖₁ = max_{−1≤Λ≤1} Tr[Λω]`.
    TraceNormForm,
    /// `D(EρE, EσE) ≤ D(ρ,σ)`.
    Contractivity,
    /// `Tr[P_k⋯P₁ρP₁⋯P_k] ≥ Tr ρ − 2√(Σ Tr[ρQ_i])`.
    Sen,
    /// `1 − Λ_ℓ ≤ 2Q_ℓ + 4 Σ_{ℓ'≠ℓ} P_ℓ'`.
    HayashiNagaoka,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::CloseStates,
        LemmaId::GentleOperator,
        LemmaId::TraceNormForm,
        LemmaId::Contractivity,
        LemmaId::Sen,
        LemmaId::HayashiNagaoka,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::CloseStates => "close-states",
            LemmaId::GentleOperator => "gentle-operator",
            LemmaId::TraceNormForm => "trace-norm-form",
            LemmaId::Contractivity => "contractivity",
            LemmaId::Sen => "sen",
            LemmaId::HayashiNagaoka => "hayashi-nagaoka",
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let by_number = match key.as_str() {
            "1" => Some(LemmaId::CloseStates),
            "2" => Some(LemmaId::GentleOperator),
            "3" => Some(LemmaId::TraceNormForm),
            "4" => Some(LemmaId::Contractivity),
            "5" => Some(LemmaId::Sen),
            "hn" => Some(LemmaId::HayashiNagaoka),
            _ => None,
        };
        by_number
            .or_else(|| LemmaId::ALL.into_iter().find(|l| l.name() == key))
            .ok_or_else(|| Error::Config(format!("unknown lemma '{s}'")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// For the trace-norm form: `|‖ω‖₁ − Tr[(Π₊ − Π₋)ω]|`.
    pub equality_gap: Option<f64>,
    pub pass: bool,
}

impl LemmaReport {
    fn new(lemma: LemmaId, instance: String, lhs: f64, rhs: f64, margin: f64) -> Self {
        Self {
            lemma,
            instance,
            lhs,
            rhs,
            margin,
            equality_gap: None,
            pass: margin >= -PASS_TOL,
        }
    }
}

fn check_povm(e: &HermitianOperator) -> Result<()> {
    let r = unit_interval_report(e);
    if r.violation() > POVM_TOL {
        return Err(Error::InvalidPovmElement {
            min: r.min_eigenvalue,
            max: r.max_eigenvalue,
        });
    }
    Ok(())
}

fn distance(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    0.5 * trace_norm(&a.sub(b))
}

fn describe(dim: usize) -> String {
    format!("dim={dim}")
}

pub fn check_lemma1(rho: &SubnormalizedState, sigma: &SubnormalizedState, e: &HermitianOperator) -> Result<LemmaReport> {
    check_povm(e)?;
    let lhs = e.trace_product(rho.operator());
    let rhs = e.trace_product(sigma.operator()) - 2.0 * distance(rho.operator(), sigma.operator());
    Ok(LemmaReport::new(LemmaId::CloseStates, describe(e.dim()), lhs, rhs, lhs - rhs))
}

/// Weighted family of `(E, ρ)` pairs; weights must be non-negative and sum
/// to one.
pub fn check_lemma2(instances: &[(HermitianOperator, SubnormalizedState)], weights: &[f64]) -> Result<LemmaReport> {
    if instances.is_empty() || instances.len() != weights.len() {
        return Err(Error::InvalidInstance("weights must match a non-empty family".into()));
    }
    if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInstance("weights must form a probability vector".into()));
    }
    let mut mean_tr = 0.0;
    let mut mean_d = 0.0;
    for ((e, rho), &w) in instances.iter().zip(weights) {
        check_povm(e)?;
        let root = eig_hermitian(e).apply_function(|x| x.max(0.0).sqrt());
        let post = rho.operator().conjugate_by(&root);
        mean_tr += w * e.trace_product(rho.operator());
        mean_d += w * distance(&post, rho.operator());
    }
    let eps = 1.0 - mean_tr;
    if eps > 1.0 + 1e-12 {
        return Err(Error::InvalidInstance(format!("epsilon {eps} exceeds 1")));
    }
    let rhs = eps.max(0.0).sqrt();
    Ok(LemmaReport::new(
        LemmaId::GentleOperator,
        format!("{} family={}", describe(instances[0].0.dim()), instances.len()),
        mean_d,
        rhs,
        rhs - mean_d,
    ))
}

/// Random `Λ` with spectrum clipped into `[−1, 1]`.
pub fn random_feasible_lambda<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let h = random_hermitian(rng, dim);
    let spec = eig_hermitian(&h);
    let scale: f64 = rng.random_range(0.2..2.0);
    HermitianOperator::from_matrix_unchecked(spec.apply_function(|x| (x * scale).clamp(-1.0, 1.0)))
}

/// Compares `‖ω‖₁` with `Tr[Λω]` over the explicit maximizer `Π₊ − Π₋`
/// and `trials` random feasible `Λ`.
pub fn check_lemma3<R: Rng + ?Sized>(omega: &HermitianOperator, trials: usize, rng: &mut R) -> LemmaReport {
    let norm = trace_norm(omega);
    let (plus, minus) = sign_projectors(omega);
    let attained = plus.sub(&minus).trace_product(omega);
    let best = (0..trials)
        .map(|_| random_feasible_lambda(rng, omega.dim()).trace_product(omega))
        .fold(attained, f64::max);
    let mut r = LemmaReport::new(
        LemmaId::TraceNormForm,
        format!("{} trials={trials}", describe(omega.dim())),
        norm,
        best,
        norm - best,
    );
    r.equality_gap = Some((norm - attained).abs());
    r
}

pub fn check_lemma4(rho: &SubnormalizedState, sigma: &SubnormalizedState, e: &HermitianOperator) -> Result<LemmaReport> {
    check_povm(e)?;
    let lhs = distance(&rho.operator().conjugate_by(e.matrix()), &sigma.operator().conjugate_by(e.matrix()));
    let rhs = distance(rho.operator(), sigma.operator());
    Ok(LemmaReport::new(LemmaId::Contractivity, describe(e.dim()), lhs, rhs, rhs - lhs))
}

pub fn check_sen(rho: &SubnormalizedState, projectors: &[HermitianOperator]) -> Result<LemmaReport> {
    for p in projectors {
        let sq = p.matrix() * p.matrix();
        if crate::linops::max_entry(&(sq - p.matrix())) > 1e-9 {
            return Err(Error::InvalidInstance("Sen check needs orthogonal projectors".into()));
        }
    }
    let dim = rho.dim();
    let mut state = rho.operator().clone();
    let mut complement = 0.0;
    let id = HermitianOperator::identity(dim);
    for p in projectors {
        state = state.conjugate_by(p.matrix());
        complement += id.sub(p).trace_product(rho.operator());
    }
    let lhs = state.trace();
    let rhs = rho.trace() - 2.0 * complement.max(0.0).sqrt();
    Ok(LemmaReport::new(
        LemmaId::Sen,
        format!("{} k={}", describe(dim), projectors.len()),
        lhs,
        rhs,
        lhs - rhs,
    ))
}

/// Hayashi–Nagaoka margin for codeword `l` of the PGM built from `projectors`.
pub fn check_hayashi_nagaoka(projectors: &[HermitianOperator], l: usize, cutoff: f64) -> LemmaReport {
    let lambdas = pgm_from_projectors(projectors, cutoff);
    let m = hayashi_nagaoka_check(&lambdas, projectors, l);
    LemmaReport::new(
        LemmaId::HayashiNagaoka,
        format!("{} sets={} index={l}", describe(projectors[0].dim()), projectors.len()),
        m,
        0.0,
        m,
    )
}

fn random_dim<R: Rng + ?Sized>(rng: &mut R) -> usize {
    rng.random_range(2..=6)
}

/// Random `(E, ρ)` pair; half of the draws put `E` close to the support
/// projector of a near-normalized `ρ`, so small `ε` is exercised too.
fn random_gentle_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> (HermitianOperator, SubnormalizedState) {
    if rng.random::<bool>() {
        let rank = rng.random_range(1..=dim);
        let trace = rng.random_range(0.9..=1.0);
        let rho = crate::random::random_state_of_rank(rng, dim, rank, trace);
        let eta: f64 = rng.random_range(0.0..0.2);
        let supp = support_projector(rho.operator(), 1e-9);
        let e = supp.scale(1.0 - eta).add(&random_povm_element(rng, dim).scale(eta));
        (e, rho)
    } else {
        (random_povm_element(rng, dim), random_subnormalized(rng, dim))
    }
}

/// One random instance of `lemma`.
pub fn random_instance<R: Rng + ?Sized>(lemma: LemmaId, rng: &mut R) -> Result<LemmaReport> {
    let dim = random_dim(rng);
    match lemma {
        LemmaId::CloseStates => {
            let rho = random_subnormalized(rng, dim);
            let sigma = random_subnormalized(rng, dim);
            check_lemma1(&rho, &sigma, &random_povm_element(rng, dim))
        }
        LemmaId::GentleOperator => {
            let k = rng.random_range(1..=4);
            let family: Vec<_> = (0..k).map(|_| random_gentle_pair(rng, dim)).collect();
            let raw: Vec<f64> = (0..k).map(|_| 1.0 - rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            check_lemma2(&family, &weights)
        }
        LemmaId::TraceNormForm => {
            let omega = if rng.random::<bool>() {
                random_hermitian(rng, dim)
            } else {
                let a = random_subnormalized(rng, dim);
                let b = random_subnormalized(rng, dim);
                a.operator().sub(b.operator())
            };
            Ok(check_lemma3(&omega, 100, rng))
        }
        LemmaId::Contractivity => {
            let rho = random_subnormalized(rng, dim);
            let sigma = random_subnormalized(rng, dim);
            check_lemma4(&rho, &sigma, &random_povm_element(rng, dim))
        }
        LemmaId::Sen => {
            let rho = random_subnormalized(rng, dim);
            let k = rng.random_range(2..=4);
            let ps: Vec<_> = (0..k)
                .map(|_| {
                    let r = rng.random_range(1..=dim);
                    random_projector(rng, dim, r)
                })
                .collect();
            check_sen(&rho, &ps)
        }
        LemmaId::HayashiNagaoka => {
            let dim = rng.random_range(3..=8);
            let k = rng.random_range(2..=5);
            let ps: Vec<_> = (0..k)
                .map(|_| {
                    let r = rng.random_range(1..dim);
                    random_projector(rng, dim, r)
                })
                .collect();
            let l = rng.random_range(0..k);
            Ok(check_hayashi_nagaoka(&ps, l, crate::linops::DEFAULT_PINV_CUTOFF))
        }
    }
}

/// `count` seeded random instances of `lemma`; each lemma draws from its own
/// ChaCha20 stream of `seed`.
pub fn run_random(lemma: LemmaId, count: usize, seed: u64) -> Result<Vec<LemmaReport>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(lemma.stream());
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut r = random_instance(lemma, &mut rng)?;
        r.instance = format!("#{i} {}", r.instance);
        out.push(r);
    }
    Ok(out)
}
