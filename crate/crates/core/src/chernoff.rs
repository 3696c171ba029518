//! Exponential tail bound for the sample entropy `H̄ = (1/n) Σ z_{x_i}` with
//! `z_x = −log₂ q_x`.
//!
//! With `g(s) = Σ q_x e^{s z_x}` and `h(s) = s·a − ln g(s)`,
//! `Pr(|H̄ − H| ≥ δ) ≤ e^{−n h_p} + e^{−n h_m}` where `h_p` is the supremum
//! of `h` over `s > 0` at `a = H + δ` and `h_m` the supremum over `s < 0` at
//! `a = H − δ`. `z` is measured in bits, the exponentials are natural, so
//! `h` is in nats per symbol.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::typicality::typical_set;

/// Bisection stops once the bracket on `s` is narrower than this.
pub const S_TOL: f64 = 1e-10;
/// Relative spread of `z` below which the variable is treated as constant.
const DEGENERATE_TOL: f64 = 1e-12;

fn info_values(q: &[f64]) -> Result<Vec<f64>> {
    q.iter()
        .enumerate()
        .map(|(i, &p)| {
            if p > 0.0 {
                Ok(-p.log2())
            } else {
                Err(Error::ZeroProbSymbol { symbol: i })
            }
        })
        .collect()
}

/// `ln g(s)`, evaluated as a log-sum-exp.
pub fn log_mgf(q: &[f64], s: f64) -> Result<f64> {
    let z = info_values(q)?;
    Ok(log_mgf_of(q, &z, s))
}

fn log_mgf_of(q: &[f64], z: &[f64], s: f64) -> f64 {
    let terms: Vec<f64> = q.iter().zip(z).map(|(p, z)| p.ln() + s * z).collect();
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Tilted mean `μ'(s) = Σ q_x z_x e^{s z_x} / g(s)`.
fn tilted_mean(q: &[f64], z: &[f64], s: f64) -> f64 {
    let lg = log_mgf_of(q, z, s);
    q.iter().zip(z).map(|(p, z)| z * (p.ln() + s * z - lg).exp()).sum()
}

/// `g(s) = Σ q_x e^{s z_x}`.
pub fn mgf(q: &[f64], s: f64) -> Result<f64> {
    Ok(log_mgf(q, s)?.exp())
}

/// `h(s) = s·a − ln g(s)`.
pub fn rate_function(q: &[f64], a: f64, s: f64) -> Result<f64> {
    Ok(s * a - log_mgf(q, s)?)
}

/// Optimized exponents for one `(q, δ)`.
#[derive(Debug, Clone, Serialize)]
pub struct RateFunctionResult {
    pub distribution: Vec<f64>,
    pub delta: f64,
    /// `H = E[z]` in bits.
    pub mean: f64,
    pub variance: f64,
    /// Supremum over `s > 0` of `h` at `a = H + δ`, in nats.
    pub h_p: f64,
    /// Supremum over `s < 0` of `h` at `a = H − δ`, in nats.
    pub h_m: f64,
    /// Maximizers; `None` when the supremum is approached only as `|s| → ∞`.
    pub s_p: Option<f64>,
    pub s_m: Option<f64>,
    pub degenerate: bool,
}

impl RateFunctionResult {
    /// `e^{−n h_p} + e^{−n h_m}`.
    pub fn bound(&self, n: usize) -> f64 {
        let n = n as f64;
        (-n * self.h_p).exp() + (-n * self.h_m).exp()
    }
}

/// Supremum of `h(s) = s·a − ln g(s)` over `s` of the given sign
/// (`sign = ±1`). `h` is concave, so `h'(s) = a − μ'(s)` has at most one zero.
fn one_sided_sup(q: &[f64], z: &[f64], a: f64, sign: f64) -> (f64, Option<f64>) {
    let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let zmin = z.iter().cloned().fold(f64::INFINITY, f64::min);
    let extreme = if sign > 0.0 { zmax } else { zmin };
    // slope of h along the search direction
    let slope = |t: f64| sign * (a - tilted_mean(q, z, sign * t));
    if slope(0.0) <= 0.0 {
        return (0.0, Some(0.0));
    }
    let scale = 1.0 + extreme.abs();
    let beyond = sign * (a - extreme);
    if beyond > DEGENERATE_TOL * scale {
        return (f64::INFINITY, None);
    }
    if beyond.abs() <= DEGENERATE_TOL * scale {
        // sup approached as |s| → ∞: −ln Pr(z = extreme)
        let mass: f64 = q
            .iter()
            .zip(z)
            .filter(|(_, &zx)| (zx - extreme).abs() <= DEGENERATE_TOL * scale)
            .map(|(p, _)| p)
            .sum();
        return (-mass.ln(), None);
    }
    let mut hi = 1.0;
    while slope(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > S_TOL {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = sign * 0.5 * (lo + hi);
    (s * a - log_mgf_of(q, z, s), Some(s))
}

/// Locates `h_p` and `h_m`. Zero-probability outcomes are dropped first; a
/// constant `z` yields `h_p = h_m = ∞` (bound 0) for any `δ > 0`.
pub fn optimize_rates(q: &[f64], delta: f64) -> Result<RateFunctionResult> {
    if delta < 0.0 || !delta.is_finite() {
        return Err(Error::InvalidInstance(format!("delta must be non-negative, got {delta}")));
    }
    let support: Vec<f64> = q.iter().cloned().filter(|&p| p > 0.0).collect();
    if support.is_empty() {
        return Err(Error::InvalidInstance("empty distribution".into()));
    }
    let z = info_values(&support)?;
    let mean: f64 = support.iter().zip(&z).map(|(p, z)| p * z).sum();
    let variance: f64 = support.iter().zip(&z).map(|(p, z)| p * (z - mean).powi(2)).sum();
    let spread = z.iter().map(|zx| (zx - mean).abs()).fold(0.0, f64::max);
    let degenerate = spread <= DEGENERATE_TOL * (1.0 + mean.abs());
    let (h_p, s_p, h_m, s_m) = if degenerate && delta > 0.0 {
        (f64::INFINITY, None, f64::INFINITY, None)
    } else {
        let (h_p, s_p) = one_sided_sup(&support, &z, mean + delta, 1.0);
        let (h_m, s_m) = one_sided_sup(&support, &z, mean - delta, -1.0);
        (h_p, s_p, h_m, s_m)
    };
    Ok(RateFunctionResult {
        distribution: q.to_vec(),
        delta,
        mean,
        variance,
        h_p,
        h_m,
        s_p,
        s_m,
        degenerate,
    })
}

/// Frequency of `|H̄ − H| ≥ δ` over `samples` i.i.d. sequences of length `n`.
pub fn empirical_tail<R: Rng + ?Sized>(q: &[f64], n: usize, delta: f64, samples: usize, rng: &mut R) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidInstance("samples must be at least 1".into()));
    }
    let dist = WeightedIndex::new(q).map_err(|e| Error::InvalidInstance(e.to_string()))?;
    let z: Vec<f64> = q.iter().map(|&p| if p > 0.0 { -p.log2() } else { 0.0 }).collect();
    let h: f64 = q.iter().zip(&z).map(|(p, z)| p * z).sum();
    let mut hits = 0usize;
    for _ in 0..samples {
        let total: f64 = (0..n).map(|_| z[dist.sample(rng)]).sum();
        if (total / n as f64 - h).abs() >= delta {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// `1 − Pr(x⃗ ∈ T_δⁿ)` by exhaustive enumeration.
pub fn exact_tail(q: &[f64], n: usize, delta: f64, enumeration_cap: u64) -> Result<f64> {
    Ok(1.0 - typical_set(q, n, delta, enumeration_cap)?.probability_mass())
}

/// `Var(z) / (n δ²)`.
pub fn chebyshev_bound(q: &[f64], n: usize, delta: f64) -> Result<f64> {
    let r = optimize_rates(q, delta)?;
    Ok(r.variance / (n as f64 * delta * delta))
}

/// Second differences of `ln g` on an even grid over `[lo, hi]`.
pub fn log_mgf_second_differences(q: &[f64], lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    let step = (hi - lo) / (points - 1) as f64;
    let vals: Vec<f64> = (0..points)
        .map(|i| log_mgf(q, lo + step * i as f64))
        .collect::<Result<_>>()?;
    Ok(vals.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect())
}
