//! Configuration-driven runs: suites, parameter sweeps, formula evaluation,
//! and the files they write.

pub mod config;
pub mod eval;
pub mod run;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

pub use config::{ExperimentConfig, GraphSpec, LocalTimeTargetSpec, Suite, SweepSpec};
pub use eval::{eval_op, format_value, OPS};
pub use run::{exit_code, run_suite, SuiteRecord};

use crate::error::{Error, Result};
use crate::harness::{config_hash, Verdict};

pub const OUT_DIR_ENV: &str = "RWSIM_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "rwsim-out";

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.replicas {
            cfg.replicas = r;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        cfg.validate()
    }

    /// Flag, then config file, then environment, then `./rwsim-out`.
    fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| cfg.out_dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub records: Vec<SuiteRecord>,
    pub out_dir: PathBuf,
    pub exit_code: i32,
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn write_jsonl<'a, I: IntoIterator<Item = &'a Value>>(path: &Path, rows: I) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut w, row).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:e}"))
}

fn verdict_name(v: Verdict) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|x| x.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn write_csv(path: &Path, grid_key: Option<&str>, records: &[SuiteRecord]) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["test", "suite", "config-hash", "seed"];
    if let Some(k) = grid_key {
        header.push(k);
    }
    header.extend(["estimate", "se", "target", "verdict"]);
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row = vec![r.test.clone(), r.suite.to_string(), r.config_hash.clone(), r.seed.to_string()];
        if grid_key.is_some() {
            row.push(r.grid.as_ref().map_or(String::new(), |g| match g {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }));
        }
        row.extend([opt(r.estimate), opt(r.se), opt(r.target), verdict_name(r.verdict)]);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn execute_all(cfg: &ExperimentConfig, hash: &str, grid: Option<&Value>) -> Result<(Vec<SuiteRecord>, Vec<Value>)> {
    let g = cfg.graph.build()?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for i in 0..cfg.suite.len() {
        let out = with_threads(cfg.threads, || run_suite(cfg, i, hash, &g))?;
        if let Some(mut rec) = out.record {
            rec.grid = grid.cloned();
            records.push(rec);
        }
        for mut row in out.rows {
            if let (Some(v), Value::Object(m)) = (grid, &mut row) {
                m.insert("grid".into(), v.clone());
            }
            rows.push(row);
        }
    }
    Ok((records, rows))
}

fn records_json(records: &[SuiteRecord]) -> Vec<Value> {
    records.iter().map(|r| serde_json::to_value(r).unwrap_or(Value::Null)).collect()
}

/// Runs every suite of the configuration text and writes
/// `results.jsonl`, `summary.csv` and, when produced, `observables.jsonl`.
pub fn run_config(text: &str, overrides: &Overrides) -> Result<RunSummary> {
    let mut cfg = ExperimentConfig::parse(text)?;
    overrides.apply(&mut cfg)?;
    let hash = config_hash(text);
    let out_dir = overrides.out_dir(&cfg);
    let (records, rows) = execute_all(&cfg, &hash, None)?;
    fs::create_dir_all(&out_dir)?;
    write_jsonl(&out_dir.join("results.jsonl"), &records_json(&records))?;
    write_csv(&out_dir.join("summary.csv"), None, &records)?;
    if !rows.is_empty() {
        write_jsonl(&out_dir.join("observables.jsonl"), &rows)?;
    }
    let exit_code = exit_code(records.iter().map(|r| &r.verdict));
    Ok(RunSummary {
        records,
        out_dir,
        exit_code,
    })
}

/// Runs the configuration once per grid value of its `[sweep]` and writes
/// `sweep.jsonl` and `sweep.csv`, one record per grid point and suite.
pub fn sweep_config(text: &str, overrides: &Overrides) -> Result<RunSummary> {
    let mut cfg = ExperimentConfig::parse(text)?;
    overrides.apply(&mut cfg)?;
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::InvalidParameter("configuration has no [sweep] section".into()))?;
    let hash = config_hash(text);
    let out_dir = overrides.out_dir(&cfg);
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for value in &sweep.values {
        let point = cfg.with_override(&sweep.path, value)?;
        let grid = serde_json::to_value(value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let (r, o) = execute_all(&point, &hash, Some(&grid))?;
        records.extend(r);
        rows.extend(o);
    }
    fs::create_dir_all(&out_dir)?;
    write_jsonl(&out_dir.join("sweep.jsonl"), &records_json(&records))?;
    write_csv(&out_dir.join("sweep.csv"), Some(&sweep.path), &records)?;
    if !rows.is_empty() {
        write_jsonl(&out_dir.join("observables.jsonl"), &rows)?;
    }
    let exit_code = exit_code(records.iter().map(|r| &r.verdict));
    Ok(RunSummary {
        records,
        out_dir,
        exit_code,
    })
}

/// Exit status for an error: 3 for capped or underpowered runs, 2 otherwise.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Capped { .. } | Error::TooFewSamples { .. } => 3,
        _ => 2,
    }
}
