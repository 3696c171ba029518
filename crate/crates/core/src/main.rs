use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use cqbisect::chernoff::{chebyshev_bound, empirical_tail, optimize_rates};
use cqbisect::decoders::{DecoderKind, SequentialScope};
use cqbisect::harness::{
    decode_one, sweep, write_outputs, ChiReport, CodeSizes, ExperimentConfig, PLOT_FILE, RNG_NAME,
};
use cqbisect::lemmas::{run_random, LemmaId};
use cqbisect::typicality::typicality_report;
use cqbisect::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "cqbisect", version, about = "Random-coding experiments with bisection decoders")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Holevo quantity, average-state entropy and per-symbol entropies.
    Chi {
        #[arg(long)]
        ensemble: Option<PathBuf>,
    },
    /// Typical-subspace statistics at one block length.
    Typical {
        #[command(flatten)]
        common: Common,
        /// Random codewords for the conditional statistics.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// One code, one method, full per-codeword table.
    Decode {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "orthogonal")]
        method: DecoderKind,
        /// Which of the sweep's trial codes to decode.
        #[arg(long, default_value_t = 0)]
        code_index: usize,
    },
    /// Average error probability over random codes for every (n, N, method).
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "orthogonal,pgm,sequential")]
        methods: Vec<DecoderKind>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Directory for summary.json, records.jsonl and plot.tsv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponential tail bound against sampled typicality frequencies.
    Chernoff {
        /// Distribution, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.9,0.1")]
        q: Vec<f64>,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Seeded random instances of the operator inequalities.
    VerifyLemmas {
        /// Lemmas to check (1-5, hn, or names); all when omitted.
        #[arg(long, value_delimiter = ',')]
        lemmas: Vec<LemmaId>,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print every instance instead of one line per lemma.
        #[arg(long)]
        records: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    ensemble: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
    n: Vec<usize>,
    /// Rate in bits per symbol; ignored when --sizes is given.
    #[arg(long, default_value_t = 0.3)]
    rate: f64,
    /// Explicit code sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Conditional-typicality width; defaults to --delta.
    #[arg(long)]
    delta_cond: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = cqbisect::linops::DEFAULT_DIM_CAP)]
    dim_cap: usize,
    #[arg(long, default_value = "global")]
    sequential_scope: String,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let scope = match self.sequential_scope.as_str() {
            "global" => SequentialScope::Global,
            "per-node" => SequentialScope::PerNode,
            s => return Err(Error::Config(format!("unknown sequential scope '{s}'"))),
        };
        let cfg = ExperimentConfig {
            ensemble_path: self.ensemble.clone(),
            n: self.n.clone(),
            sizes: if self.sizes.is_empty() {
                CodeSizes::Rate(self.rate)
            } else {
                CodeSizes::Explicit(self.sizes.clone())
            },
            delta: self.delta,
            delta_cond: self.delta_cond,
            seed: self.seed,
            dim_cap: self.dim_cap,
            sequential_scope: scope,
            ..Default::default()
        };
        Ok(cfg)
    }
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

#[derive(Serialize)]
struct ChernoffRow {
    n: usize,
    bound: f64,
    empirical: f64,
    chebyshev: f64,
    dominated: bool,
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Command::Chi { ensemble } => {
            let report = match ensemble {
                Some(p) => ChiReport::from_file(p)?,
                None => ChiReport::new(&cqbisect::ensembles::SourceEnsemble::zero_plus()),
            };
            print!("{}", report.render());
        }
        Command::Typical { common, samples } => {
            let cfg = common.config()?;
            cfg.validate()?;
            let e = cfg.ensemble()?;
            for &n in &cfg.n {
                let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
                rng.set_stream(n as u64);
                print_json(&typicality_report(&e, n, cfg.delta, samples, &mut rng, &cfg.limits())?);
            }
        }
        Command::Decode { common, method, code_index } => {
            let cfg = common.config()?;
            cfg.validate()?;
            let e = cfg.ensemble()?;
            for &n in &cfg.n {
                for size in cfg.sizes_for(n) {
                    let t = decode_one(&cfg, &e, n, size, method, code_index)?;
                    println!("# n={} N={} method={} code={} P_err={:.12}", t.n, t.size, t.method, t.code_index, t.p_err);
                    println!("index\tlabel\tword\tp_succ");
                    for r in &t.rows {
                        println!("{}\t{}\t{}\t{:.12}", r.index, r.label, r.word, r.p_succ);
                    }
                }
            }
        }
        Command::Sweep { common, methods, trials, out } => {
            let mut cfg = common.config()?;
            cfg.methods = methods;
            cfg.trials = trials;
            cfg.out = out.clone();
            let e = cfg.ensemble()?;
            let outcome = sweep(&cfg, &e)?;
            match out {
                Some(dir) => {
                    write_outputs(&dir, &outcome)?;
                    print!("{}", std::fs::read_to_string(dir.join(PLOT_FILE))?);
                }
                None => print_json(&outcome.summary),
            }
            if outcome.summary.failures() > 0 {
                eprintln!("{} point(s) failed", outcome.summary.failures());
                return Ok(EXIT_PARTIAL);
            }
        }
        Command::Chernoff { q, delta, n, samples, seed } => {
            let rates = optimize_rates(&q, delta)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            for &m in &n {
                let empirical = empirical_tail(&q, m, delta, samples, &mut rng)?;
                let bound = rates.bound(m);
                rows.push(ChernoffRow {
                    n: m,
                    bound,
                    empirical,
                    chebyshev: chebyshev_bound(&q, m, delta)?,
                    dominated: empirical <= bound,
                });
            }
            print_json(&serde_json::json!({ "rng": RNG_NAME, "seed": seed, "rates": rates, "tails": rows }));
        }
        Command::VerifyLemmas { lemmas, count, seed, records } => {
            let lemmas = if lemmas.is_empty() { LemmaId::ALL.to_vec() } else { lemmas };
            let mut failed = 0;
            for lemma in lemmas {
                let reports = run_random(lemma, count, seed)?;
                let bad = reports.iter().filter(|r| !r.pass).count();
                failed += bad;
                if records {
                    for r in &reports {
                        println!("{}", serde_json::to_string(r).expect("serializable"));
                    }
                } else {
                    let worst = reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
                    println!("{}\t{}/{} pass\tmin margin {worst:.3e}", lemma.name(), reports.len() - bad, reports.len());
                }
            }
            if failed > 0 {
                return Ok(EXIT_PARTIAL);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
