//! `tsc` — certified bounds on sphere maxima of random tensors.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tsc_core::error::Error;
use tsc_core::fmax::heuristic_fmax;
use tsc_core::report::{run, RunConfig, Which};
use tsc_core::stats::{loglog_slope, median};
use tsc_core::tensor::{load_tensor, sample_tensor, save_tensor, DenseTensor, Model};
use tsc_core::verify::run_invariant_suite;

#[derive(Parser)]
#[command(name = "tsc", version, about = "Spectral certificates for tensor sphere maxima")]
struct Cli {
    /// Worker threads for sweeps (overrides TSC_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct InstanceArgs {
    /// Tensor file written by `gen` (overrides --n/--d/--model/--seed).
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value = "rademacher")]
    model: String,
    #[arg(long)]
    seed: Option<u64>,
}

impl InstanceArgs {
    fn load(&self) -> tsc_core::Result<DenseTensor> {
        if let Some(path) = &self.input {
            return load_tensor(path);
        }
        let n = self.n.ok_or_else(|| Error::bad_input("need --n or --input"))?;
        let d = self.d.ok_or_else(|| Error::bad_input("need --d or --input"))?;
        let model = Model::from_str(&self.model)?;
        let seed = self.seed.ok_or_else(|| Error::bad_input("need --seed or --input"))?;
        sample_tensor(n, d, model, seed)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a tensor and write it to a file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "rademacher")]
        model: String,
        /// Omitted: fresh entropy, recorded in the header.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Store entries explicitly instead of just the seed.
        #[arg(long)]
        payload: bool,
    },
    /// Certify bounds for one instance and emit a JSON report.
    Certify {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value = "upper")]
        which: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 2000)]
        max_iter: usize,
        /// Heuristic-maximizer restarts.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Omit volatile fields so identical runs are byte-identical.
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep described by a JSON config file.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the cross-module invariant suite; nonzero exit on any failure.
    Verify,
    /// Heuristic maximum estimate only.
    Fmax {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(serde::Deserialize)]
struct SweepConfig {
    n: Vec<usize>,
    d: usize,
    q: Vec<usize>,
    #[serde(default = "default_model")]
    model: String,
    trials: usize,
    #[serde(default)]
    seed_base: u64,
    #[serde(default = "default_which")]
    which: String,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_max_iter")]
    max_iter: usize,
    #[serde(default = "default_restarts")]
    restarts: usize,
    #[serde(default)]
    deterministic: bool,
}

fn default_model() -> String {
    "rademacher".into()
}
fn default_which() -> String {
    "upper".into()
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    2000
}
fn default_restarts() -> usize {
    20
}

#[derive(serde::Serialize)]
struct SweepRow {
    n: usize,
    d: usize,
    q: usize,
    seed: u64,
    upper: Option<f64>,
    lower: Option<f64>,
    fmax_est: Option<f64>,
    ratio_upper: Option<f64>,
    c2: Option<f64>,
    runtime_ms: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

const CSV_HEADER: &str = "n,d,q,seed,upper,lower,fmax_est,ratio_upper,c2,runtime_ms";

fn csv_cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl SweepRow {
    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.d,
            self.q,
            self.seed,
            csv_cell(&self.upper),
            csv_cell(&self.lower),
            csv_cell(&self.fmax_est),
            csv_cell(&self.ratio_upper),
            csv_cell(&self.c2),
            csv_cell(&self.runtime_ms),
        )
    }
}

fn sweep_row(cfg: &SweepConfig, n: usize, q: usize, trial: usize) -> SweepRow {
    let seed = cfg.seed_base.wrapping_add(trial as u64);
    let started = std::time::Instant::now();
    let outcome = (|| -> tsc_core::Result<SweepRow> {
        let t = sample_tensor(n, cfg.d, Model::from_str(&cfg.model)?, seed)?;
        let mut rc = RunConfig::new(q, Which::from_str(&cfg.which)?);
        rc.tol = cfg.tol;
        rc.max_iter = cfg.max_iter;
        rc.restarts = cfg.restarts;
        rc.deterministic = cfg.deterministic;
        let report = run(&t, &rc)?;
        Ok(SweepRow {
            n,
            d: cfg.d,
            q,
            seed,
            upper: report.best_upper(),
            lower: report.results.lower_qd.as_ref().map(|e| e.value),
            fmax_est: report.results.fmax_est.as_ref().map(|e| e.value),
            ratio_upper: report.ratio_upper,
            c2: report.diagnostics.c2,
            runtime_ms: if cfg.deterministic {
                None
            } else {
                Some(started.elapsed().as_millis())
            },
            error: None,
        })
    })();
    outcome.unwrap_or_else(|e| SweepRow {
        n,
        d: cfg.d,
        q,
        seed,
        upper: None,
        lower: None,
        fmax_est: None,
        ratio_upper: None,
        c2: None,
        runtime_ms: None,
        error: Some(e.to_string()),
    })
}

#[derive(serde::Serialize)]
struct SweepSummary {
    q: usize,
    metric: &'static str,
    medians: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope_stderr: Option<f64>,
}

fn summarize(cfg: &SweepConfig, rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut out = Vec::new();
    for &q in &cfg.q {
        for (metric, get) in [
            ("upper", (|r: &SweepRow| r.upper) as fn(&SweepRow) -> Option<f64>),
            ("lower", |r| r.lower),
            ("fmax_est", |r| r.fmax_est),
        ] {
            let mut medians = Vec::new();
            for &n in &cfg.n {
                let sample: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.n == n && r.q == q)
                    .filter_map(get)
                    .collect();
                if let Ok(m) = median(&sample) {
                    medians.push((n, m));
                }
            }
            if medians.is_empty() {
                continue;
            }
            let xs: Vec<f64> = medians.iter().map(|&(n, _)| n as f64).collect();
            let ys: Vec<f64> = medians.iter().map(|&(_, m)| m).collect();
            let fit = loglog_slope(&xs, &ys).ok();
            out.push(SweepSummary {
                q,
                metric,
                medians,
                slope: fit.map(|f| f.slope),
                slope_stderr: fit.map(|f| f.stderr),
            });
        }
    }
    out
}

fn write_output(path: &Option<PathBuf>, content: &str) -> tsc_core::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn real_main() -> tsc_core::Result<i32> {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("TSC_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::bad_input(format!("thread pool: {e}")))?;
    }

    match cli.cmd {
        Cmd::Gen {
            n,
            d,
            model,
            seed,
            out,
            payload,
        } => {
            let model = Model::from_str(&model)?;
            let seed = seed.unwrap_or_else(rand_seed);
            let t = sample_tensor(n, d, model, seed)?;
            save_tensor(&t, &out, payload)?;
            eprintln!("wrote {} (n={n}, d={d}, seed={seed})", out.display());
            Ok(0)
        }
        Cmd::Certify {
            instance,
            q,
            which,
            tol,
            max_iter,
            trials,
            deterministic,
            out,
        } => {
            let t = instance.load()?;
            let mut cfg = RunConfig::new(q, Which::from_str(&which)?);
            cfg.tol = tol;
            cfg.max_iter = max_iter;
            cfg.restarts = trials;
            cfg.deterministic = deterministic;
            let report = run(&t, &cfg)?;
            write_output(&out, &(report.to_json() + "\n"))?;
            Ok(0)
        }
        Cmd::Sweep {
            config,
            out,
            format,
        } => {
            let cfg: SweepConfig =
                serde_json::from_str(&std::fs::read_to_string(&config)?)?;
            let mut jobs = Vec::new();
            for &n in &cfg.n {
                for &q in &cfg.q {
                    for trial in 0..cfg.trials {
                        jobs.push((n, q, trial));
                    }
                }
            }
            use rayon::prelude::*;
            let rows: Vec<SweepRow> = jobs
                .par_iter()
                .map(|&(n, q, trial)| sweep_row(&cfg, n, q, trial))
                .collect();
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            let content = match format {
                Format::Json => {
                    let mut s = String::new();
                    for row in &rows {
                        s.push_str(&serde_json::to_string(row).expect("row serialization"));
                        s.push('\n');
                    }
                    for summary in summarize(&cfg, &rows) {
                        s.push_str(
                            &serde_json::json!({ "summary": summary }).to_string(),
                        );
                        s.push('\n');
                    }
                    s
                }
                Format::Csv => {
                    let mut s = String::from(CSV_HEADER);
                    s.push('\n');
                    for row in &rows {
                        s.push_str(&row.to_csv());
                        s.push('\n');
                    }
                    s
                }
            };
            write_output(&out, &content)?;
            if failed > 0 {
                eprintln!("{failed} of {} rows failed", rows.len());
            }
            Ok(0)
        }
        Cmd::Verify => {
            let results = run_invariant_suite();
            let mut failed = 0;
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("{status}  {:<32} {:>6} ms  {}", r.name, r.millis, r.detail);
                if !r.passed {
                    failed += 1;
                }
            }
            println!("{} invariants, {failed} failed", results.len());
            Ok(if failed > 0 { 1 } else { 0 })
        }
        Cmd::Fmax {
            instance,
            trials,
            max_iter,
            tol,
        } => {
            let t = instance.load()?;
            let est = heuristic_fmax(&t, trials, max_iter, tol, t.seed.unwrap_or(0))?;
            println!(
                "{}",
                serde_json::json!({
                    "value": est.value,
                    "restarts": est.restarts,
                    "iterations": est.iterations,
                    "converged": est.converged,
                })
            );
            Ok(0)
        }
    }
}

/// Entropy for `gen` when no seed is given.
fn rand_seed() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    nanos ^ (std::process::id() as u64) << 32
}

fn main() {
    match real_main() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
