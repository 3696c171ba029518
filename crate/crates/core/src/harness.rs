//! Monte Carlo averaging of the decoding error over random codes, and the
//! files a sweep leaves behind.
//!
//! Every trial draws its codebook from its own ChaCha20 stream, derived from
//! the master seed and `(n, N, trial)`. All methods at one point therefore
//! decode the same codes, and trials can run in any order.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decoders::{
    error_from_success, full_pgm_success, full_sequential_success, BisectionDecoder, CodeInstance, DecoderKind,
    DecoderOptions, SequentialScope,
};
use crate::ensembles::{checked_dim, sample_codebook, Codebook, SourceEnsemble};
use crate::error::{Error, Result};
use crate::linops::DEFAULT_DIM_CAP;
use crate::typicality::{Limits, DEFAULT_ENUMERATION_CAP};

/// Identifier of the generator written into every output file.
pub const RNG_NAME: &str = "ChaCha20";
/// How the code size follows from the rate.
pub const ROUNDING_RULE: &str = "N = 2^max(1, round(n*R))";

/// Code sizes at each block length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeSizes {
    Rate(f64),
    /// Explicit list of `N`, each a power of two, applied at every `n`.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// `None` selects the built-in `{|0⟩, |+⟩}` ensemble.
    pub ensemble_path: Option<PathBuf>,
    pub n: Vec<usize>,
    pub sizes: CodeSizes,
    pub delta: f64,
    /// Conditional-typicality width; falls back to `delta`.
    pub delta_cond: Option<f64>,
    pub methods: Vec<DecoderKind>,
    pub trials: usize,
    pub seed: u64,
    pub dim_cap: usize,
    pub enumeration_cap: u64,
    pub span_cutoff: f64,
    pub pgm_cutoff: f64,
    pub sequential_scope: SequentialScope,
    /// Output directory; not part of the config hash.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let opts = DecoderOptions::default();
        Self {
            ensemble_path: None,
            n: vec![4, 6, 8],
            sizes: CodeSizes::Rate(0.3),
            delta: 0.1,
            delta_cond: None,
            methods: vec![DecoderKind::Orthogonal, DecoderKind::Pgm, DecoderKind::Sequential],
            trials: 100,
            seed: 0,
            dim_cap: DEFAULT_DIM_CAP,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            span_cutoff: opts.span_cutoff,
            pgm_cutoff: opts.pgm_cutoff,
            sequential_scope: opts.sequential_scope,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n.iter().any(|&n| n == 0) {
            return Err(Error::Config("block lengths must be positive".into()));
        }
        if !(self.delta >= 0.0) || self.delta_cond.is_some_and(|d| !(d >= 0.0)) {
            return Err(Error::Config("delta must be non-negative".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        match &self.sizes {
            CodeSizes::Rate(r) if !(r.is_finite() && *r >= 0.0) => {
                Err(Error::Config(format!("rate {r} must be finite and non-negative")))
            }
            CodeSizes::Explicit(ns) => match ns.iter().find(|&&m| m < 2 || !m.is_power_of_two()) {
                Some(&m) => Err(Error::InvalidCodeSize(m)),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn ensemble(&self) -> Result<SourceEnsemble> {
        match &self.ensemble_path {
            Some(p) => SourceEnsemble::from_file(p),
            None => Ok(SourceEnsemble::zero_plus()),
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            dim_cap: self.dim_cap,
            enumeration_cap: self.enumeration_cap,
        }
    }

    pub fn decoder_options(&self) -> DecoderOptions {
        DecoderOptions {
            span_cutoff: self.span_cutoff,
            pgm_cutoff: self.pgm_cutoff,
            sequential_scope: self.sequential_scope,
        }
    }

    pub fn conditional_delta(&self) -> f64 {
        self.delta_cond.unwrap_or(self.delta)
    }

    /// Code sizes used at block length `n`.
    pub fn sizes_for(&self, n: usize) -> Vec<usize> {
        match &self.sizes {
            CodeSizes::Rate(r) => vec![code_size(n, *r)],
            CodeSizes::Explicit(ns) => ns.clone(),
        }
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `2^max(1, round(nR))`.
pub fn code_size(n: usize, rate: f64) -> usize {
    let bits = (n as f64 * rate).round().max(1.0) as u32;
    1usize << bits
}

/// Generator for one trial. The stream id packs `n`, `log₂ N` and the trial
/// index, so distinct points never share a stream.
pub fn trial_rng(seed: u64, n: usize, size: usize, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let stream = ((n as u64) << 40) | ((size.trailing_zeros() as u64) << 32) | trial as u64;
    rng.set_stream(stream);
    rng
}

/// Worst node-level defects of one bisection decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violations {
    /// Max over nodes of the completeness defect bound.
    pub completeness: f64,
    /// Max over nodes and elements of the distance of the spectrum from `[0, 1]`.
    pub interval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config_hash: String,
    pub rng: String,
    pub seed: u64,
    pub code_index: usize,
    pub method: DecoderKind,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub delta: f64,
    pub delta_cond: f64,
    pub p_succ: Vec<f64>,
    pub p_err: f64,
    pub wall_time_s: f64,
    pub violations: Option<Violations>,
}

impl TrialRecord {
    /// `p_err` recomputed from the success list.
    pub fn recomputed_error(&self) -> f64 {
        error_from_success(&self.p_succ)
    }
}

/// Success probabilities and node defects for one decoder on one code.
pub fn evaluate(code: &CodeInstance, kind: DecoderKind, opts: &DecoderOptions) -> (Vec<f64>, Option<Violations>) {
    match kind.bisection_method() {
        Some(m) => {
            let dec = BisectionDecoder::build(code, m, opts);
            let v = Violations {
                completeness: dec.nodes().iter().map(|n| n.completeness_defect()).fold(0.0, f64::max),
                interval: dec.nodes().iter().map(|n| n.interval_violation()).fold(0.0, f64::max),
            };
            (dec.success_probabilities(code), Some(v))
        }
        None if kind == DecoderKind::FullSequential => (full_sequential_success(code), None),
        None => (full_pgm_success(code, opts.pgm_cutoff), None),
    }
}

/// The codebook and its typical-subspace data for one trial.
pub fn trial_code(
    cfg: &ExperimentConfig,
    e: &SourceEnsemble,
    n: usize,
    size: usize,
    trial: usize,
) -> Result<(Codebook, CodeInstance)> {
    let mut rng = trial_rng(cfg.seed, n, size, trial);
    let cb = sample_codebook(e, n, size, &mut rng)?;
    let code = CodeInstance::from_codebook(e, &cb, cfg.conditional_delta(), &cfg.limits())?;
    Ok((cb, code))
}

/// `cfg.trials` random codes at `(n, N)`, decoded by `kind`. Records come
/// back in code-index order whatever the scheduling.
pub fn run_point(
    cfg: &ExperimentConfig,
    e: &SourceEnsemble,
    n: usize,
    size: usize,
    kind: DecoderKind,
) -> Result<Vec<TrialRecord>> {
    checked_dim(e.local_dim(), n, cfg.dim_cap)?;
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::InvalidCodeSize(size));
    }
    let hash = cfg.hash();
    let opts = cfg.decoder_options();
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let start = Instant::now();
            let (_, code) = trial_code(cfg, e, n, size, t)?;
            let (p_succ, violations) = evaluate(&code, kind, &opts);
            Ok(TrialRecord {
                config_hash: hash.clone(),
                rng: RNG_NAME.into(),
                seed: cfg.seed,
                code_index: t,
                method: kind,
                n,
                size,
                delta: cfg.delta,
                delta_cond: cfg.conditional_delta(),
                p_err: error_from_success(&p_succ),
                p_succ,
                wall_time_s: start.elapsed().as_secs_f64(),
                violations,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Ok,
    Error,
}

/// Aggregate of one `(n, N, method)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub method: DecoderKind,
    pub status: PointStatus,
    pub trials: usize,
    pub mean_p_err: Option<f64>,
    pub stderr: Option<f64>,
    pub max_completeness_defect: Option<f64>,
    pub max_interval_violation: Option<f64>,
    pub error: Option<String>,
}

impl PointSummary {
    pub fn from_records(n: usize, size: usize, method: DecoderKind, records: &[TrialRecord]) -> Self {
        let (mean, stderr) = mean_stderr(records.iter().map(|r| r.p_err));
        let viol = |f: fn(&Violations) -> f64| {
            records.iter().filter_map(|r| r.violations.as_ref().map(f)).reduce(f64::max)
        };
        Self {
            n,
            size,
            method,
            status: PointStatus::Ok,
            trials: records.len(),
            mean_p_err: Some(mean),
            stderr: Some(stderr),
            max_completeness_defect: viol(|v| v.completeness),
            max_interval_violation: viol(|v| v.interval),
            error: None,
        }
    }

    pub fn failed(n: usize, size: usize, method: DecoderKind, err: &Error) -> Self {
        Self {
            n,
            size,
            method,
            status: PointStatus::Error,
            trials: 0,
            mean_p_err: None,
            stderr: None,
            max_completeness_defect: None,
            max_interval_violation: None,
            error: Some(err.to_string()),
        }
    }
}

/// Sample mean and standard error of the mean (zero for a single sample).
pub fn mean_stderr(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let xs: Vec<f64> = xs.collect();
    let k = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub config_hash: String,
    pub rng: String,
    pub rounding_rule: String,
    pub config: ExperimentConfig,
    pub holevo_chi: f64,
    pub points: Vec<PointSummary>,
}

impl SweepSummary {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.status == PointStatus::Error).count()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub summary: SweepSummary,
    pub records: Vec<TrialRecord>,
}

/// Every `(n, N, method)` point, in configuration order. A failing point is
/// reported with `status = error` and the sweep moves on.
pub fn sweep(cfg: &ExperimentConfig, e: &SourceEnsemble) -> Result<SweepOutcome> {
    cfg.validate()?;
    let mut points = Vec::new();
    let mut records = Vec::new();
    for &n in &cfg.n {
        for size in cfg.sizes_for(n) {
            for &kind in &cfg.methods {
                match run_point(cfg, e, n, size, kind) {
                    Ok(rs) => {
                        let s = PointSummary::from_records(n, size, kind, &rs);
                        log::info!("n={n} N={size} {kind}: mean P_err {:.6}", s.mean_p_err.unwrap_or(f64::NAN));
                        points.push(s);
                        records.extend(rs);
                    }
                    Err(err) => {
                        log::warn!("n={n} N={size} {kind}: {err}");
                        points.push(PointSummary::failed(n, size, kind, &err));
                    }
                }
            }
        }
    }
    Ok(SweepOutcome {
        summary: SweepSummary {
            config_hash: cfg.hash(),
            rng: RNG_NAME.into(),
            rounding_rule: ROUNDING_RULE.into(),
            config: cfg.clone(),
            holevo_chi: e.holevo_chi(),
            points,
        },
        records,
    })
}

pub const SUMMARY_FILE: &str = "summary.json";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const PLOT_FILE: &str = "plot.tsv";

/// Writes `summary.json`, `records.jsonl` and `plot.tsv` into `dir`.
pub fn write_outputs(dir: &Path, outcome: &SweepOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    let summary = serde_json::to_string_pretty(&outcome.summary).map_err(io_err)?;
    fs::write(dir.join(SUMMARY_FILE), summary + "\n")?;

    let mut f = std::io::BufWriter::new(fs::File::create(dir.join(RECORDS_FILE))?);
    for r in &outcome.records {
        serde_json::to_writer(&mut f, r).map_err(io_err)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;

    fs::write(dir.join(PLOT_FILE), plot_table(&outcome.summary))?;
    Ok(())
}

/// Tab-separated `n, N, method, mean, stderr`, headed by a comment line
/// naming the generator and rounding rule. Failed points are left out.
pub fn plot_table(summary: &SweepSummary) -> String {
    let mut s = format!("# rng={} rule={}\nn\tN\tmethod\tmean\tstderr\n", summary.rng, summary.rounding_rule);
    for p in &summary.points {
        if let (Some(m), Some(se)) = (p.mean_p_err, p.stderr) {
            s.push_str(&format!("{}\t{}\t{}\t{m:.12e}\t{se:.12e}\n", p.n, p.size, p.method));
        }
    }
    s
}

fn io_err(e: serde_json::Error) -> Error {
    Error::Io(e.into())
}

/// Entropic quantities of an ensemble, in bits.
#[derive(Debug, Clone, Serialize)]
pub struct ChiReport {
    pub holevo_chi: f64,
    pub average_entropy: f64,
    pub symbol_entropies: Vec<f64>,
}

impl ChiReport {
    pub fn new(e: &SourceEnsemble) -> Self {
        Self {
            holevo_chi: e.holevo_chi(),
            average_entropy: e.average_entropy(),
            symbol_entropies: e.symbol_entropies(),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::new(&SourceEnsemble::from_file(path)?))
    }

    /// Six-decimal text form.
    pub fn render(&self) -> String {
        let mut s = format!("chi\t{}\nS(avg)\t{}\n", six(self.holevo_chi), six(self.average_entropy));
        for (j, &h) in self.symbol_entropies.iter().enumerate() {
            s.push_str(&format!("S({j})\t{}\n", six(h)));
        }
        s
    }
}

// keeps round-off like -1e-17 from printing as "-0.000000"
fn six(x: f64) -> String {
    let x = if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{x:.6}")
}

/// One row of the per-codeword table printed by `decode`.
#[derive(Debug, Clone, Serialize)]
pub struct DecodeRow {
    pub index: usize,
    pub label: String,
    pub word: String,
    pub p_succ: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecodeTable {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub method: DecoderKind,
    pub code_index: usize,
    pub rows: Vec<DecodeRow>,
    pub p_err: f64,
    pub violations: Option<Violations>,
}

/// Decodes the code a sweep would use as trial `code_index`.
pub fn decode_one(
    cfg: &ExperimentConfig,
    e: &SourceEnsemble,
    n: usize,
    size: usize,
    kind: DecoderKind,
    code_index: usize,
) -> Result<DecodeTable> {
    checked_dim(e.local_dim(), n, cfg.dim_cap)?;
    let (cb, code) = trial_code(cfg, e, n, size, code_index)?;
    let (p, violations) = evaluate(&code, kind, &cfg.decoder_options());
    let rows = p
        .iter()
        .enumerate()
        .map(|(l, &ps)| DecodeRow {
            index: l,
            label: cb.label(l).iter().map(|b| char::from(b'0' + b)).collect(),
            word: cb.word(l).symbols().iter().map(|j| j.to_string()).collect::<Vec<_>>().join(","),
            p_succ: ps,
        })
        .collect();
    Ok(DecodeTable {
        n,
        size,
        method: kind,
        code_index,
        p_err: error_from_success(&p),
        rows,
        violations,
    })
}
