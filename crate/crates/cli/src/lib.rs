//! Config-driven experiment runner behind the `malab` binary.
//!
//! Every run writes its data files (JSON reports, CSV tables, binary fields)
//! under the output directory together with `manifest.json`, which holds the
//! versions, seed, thread count, wall time and derived parameters. Data files
//! carry no timing and are byte-identical across reruns and thread counts.
//!
//! Exit codes: `0` ok, `1` numerical failure, `2` configuration error.

pub mod config;
pub mod experiments;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{DomainSpec, Experiment, ExperimentConfig, SCHEMA_VERSION};
use experiments::Output;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", key.as_ref().map(|k| format!(" at `{k}`")).unwrap_or_default())]
    Config { key: Option<String>, message: String },

    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        diagnostic: Option<Value>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } | CliError::Io(_) => 1,
        }
    }

    /// Machine-readable form printed on standard error.
    pub fn to_json(&self) -> Value {
        match self {
            CliError::Config { key, message } => {
                json!({"error": "config", "key": key, "message": message})
            }
            CliError::Numerical {
                message,
                diagnostic,
            } => json!({"error": "numerical", "message": message, "diagnostic": diagnostic}),
            CliError::Io(message) => json!({"error": "io", "message": message}),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<malab_core::Error> for CliError {
    fn from(e: malab_core::Error) -> Self {
        use malab_core::Error as E;
        let message = e.to_string();
        match e {
            E::InvalidDomain(_) | E::InvalidParameter(_) | E::OutOfRange { .. } | E::MemoryCap { .. } => {
                CliError::Config { key: None, message }
            }
            E::Io(_) | E::Csv(_) | E::Json(_) => CliError::Io(message),
            E::NonConvergence { iterations, last, .. } => CliError::Numerical {
                message,
                diagnostic: Some(json!({"iterations": iterations, "last": last.summary()})),
            },
            E::PositivityBreakdown {
                iteration,
                min_eig,
                last,
            } => CliError::Numerical {
                message,
                diagnostic: Some(json!({
                    "iteration": iteration,
                    "min_eig": min_eig,
                    "last": last.summary(),
                })),
            },
            _ => CliError::Numerical {
                message,
                diagnostic: None,
            },
        }
    }
}

/// Command-line overrides of a config.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub schema_version: u32,
    pub experiment: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub derived: Value,
    pub files: Vec<String>,
    pub summary: Vec<String>,
    pub config: ExperimentConfig,
}

pub struct RunResult {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
}

/// Validates `cfg`, applies `opts` and runs the experiment.
pub fn run(mut cfg: ExperimentConfig, opts: &RunOptions) -> Result<RunResult, CliError> {
    if opts.seed.is_some() {
        cfg.seed = opts.seed;
    }
    if let Some(out) = &opts.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate()?;
    let out_dir = cfg.output_dir.clone().ok_or_else(|| CliError::Config {
        key: Some("output_dir".into()),
        message: "no output directory (set output_dir or pass --out)".into(),
    })?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(k) = opts.threads {
            if k == 0 {
                return Err(CliError::Config {
                    key: Some("--threads".into()),
                    message: "thread count must be positive".into(),
                });
            }
            b = b.num_threads(k);
        }
        b.build().map_err(|e| CliError::Io(e.to_string()))?
    };
    let start = Instant::now();
    let mut out = Output::new(&out_dir)?;
    let result = pool.install(|| experiments::run(&cfg, &mut out));
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            record_failure(&out_dir, &e)?;
            return Err(e);
        }
    };
    let manifest = Manifest {
        tool: "malab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        core_version: malab_core::VERSION.into(),
        schema_version: SCHEMA_VERSION,
        experiment: cfg.experiment.name().into(),
        seed: cfg.effective_seed(),
        threads: pool.current_num_threads(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        derived: outcome.derived,
        files: out.files().to_vec(),
        summary: outcome.summary,
        config: cfg,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(out_dir.join("manifest.json"), text + "\n")?;
    Ok(RunResult { out_dir, manifest })
}

fn record_failure(dir: &Path, e: &CliError) -> Result<(), CliError> {
    if let CliError::Numerical { .. } = e {
        let text = serde_json::to_string_pretty(&e.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(dir.join("failure.json"), text + "\n")?;
    }
    Ok(())
}

/// Loads the manifest of a finished run.
pub fn read_manifest(dir: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        key: None,
        message: format!("malformed manifest: {e}"),
    })
}

/// Human-readable summary block for standard output.
pub fn render_summary(m: &Manifest, dir: &Path) -> String {
    let mut s = format!(
        "malab {} [{}] seed={} threads={} wall_time={:.3}s\n",
        m.version, m.experiment, m.seed, m.threads, m.wall_time_seconds
    );
    for line in &m.summary {
        s.push_str("  ");
        s.push_str(line);
        s.push('\n');
    }
    s.push_str(&format!("  output: {}\n", dir.display()));
    s
}
