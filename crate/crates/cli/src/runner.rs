//! Parallel, resumable execution of a trial sweep.
//!
//! Completed records are appended to `<out>.partial` by a single writer as
//! they arrive. On restart the final CSV and the partial file are read back
//! and their (cell, trial) keys skipped. When the sweep ends the union is
//! sorted by key and written to `<out>`, so the final file depends only on
//! the config, not on scheduling or on how many restarts it took.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiments::{tasks, Failure};
use crate::record::{compare, read_records, RecordKey, RecordWriter, TrialRecord};

pub const THREADS_ENV: &str = "SDCS_THREADS";

#[derive(Debug)]
pub struct RunOutcome {
    /// All records of the sweep, sorted by key.
    pub records: Vec<TrialRecord>,
    pub failures: Vec<Failure>,
    pub executed: usize,
    pub resumed: usize,
}

pub fn partial_path(out: &Path) -> PathBuf {
    sibling(out, "partial")
}

pub fn failures_path(out: &Path) -> PathBuf {
    sibling(out, "failures.csv")
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    out.with_file_name(name)
}

/// Thread count from the argument, then `SDCS_THREADS`, then rayon's default.
pub fn resolve_threads(requested: Option<usize>) -> Result<Option<usize>> {
    if requested.is_some() {
        return Ok(requested);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| HarnessError::Config(format!("{THREADS_ENV} must be an integer, got `{v}`"))),
        _ => Ok(None),
    }
}

fn load(path: &Path) -> Result<Vec<TrialRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    read_records(BufReader::new(File::open(path)?))
}

pub fn run_sweep(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutcome> {
    let all = tasks(cfg)?;
    let wanted: HashSet<RecordKey> = all.iter().map(|t| t.skeleton(cfg).key()).collect();
    let partial = partial_path(&cfg.out);

    let mut done: Vec<TrialRecord> = Vec::new();
    let mut seen = HashSet::new();
    for rec in load(&cfg.out)?.into_iter().chain(load(&partial)?) {
        let key = rec.key();
        if wanted.contains(&key) && seen.insert(key) {
            done.push(rec);
        }
    }
    let pending: Vec<_> = all
        .into_iter()
        .filter(|t| !seen.contains(&t.skeleton(cfg).key()))
        .collect();
    let resumed = done.len();

    if let Some(parent) = cfg.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let fresh = !partial.exists() || fs::metadata(&partial)?.len() == 0;
    let file = OpenOptions::new().create(true).append(true).open(&partial)?;
    let mut writer = RecordWriter::new(file, fresh)?;

    let (tx, rx) = mpsc::channel::<std::result::Result<TrialRecord, Failure>>();
    let collector = std::thread::spawn(move || -> Result<(Vec<TrialRecord>, Vec<Failure>)> {
        let mut ok = Vec::new();
        let mut failed = Vec::new();
        for res in rx {
            match res {
                Ok(rec) => {
                    writer.write(&rec)?;
                    writer.flush()?;
                    ok.push(rec);
                }
                Err(f) => failed.push(f),
            }
        }
        Ok((ok, failed))
    });

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = resolve_threads(threads)? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        pending.par_iter().for_each_with(tx, |tx, task| {
            // The collector only stops once every sender is gone.
            let _ = tx.send(task.execute(cfg));
        });
    });
    let (fresh_records, mut failures) = collector
        .join()
        .map_err(|_| HarnessError::Config("record writer panicked".into()))??;
    let executed = fresh_records.len() + failures.len();

    done.extend(fresh_records);
    done.sort_by(compare);
    failures.sort_by(|a, b| compare(&a.record, &b.record));

    write_sorted(&cfg.out, &done)?;
    write_failures(&failures_path(&cfg.out), &failures)?;
    fs::remove_file(&partial)?;
    Ok(RunOutcome {
        records: done,
        failures,
        executed,
        resumed,
    })
}

/// Writes records through a temporary file and renames it into place.
pub fn write_sorted(out: &Path, records: &[TrialRecord]) -> Result<()> {
    let tmp = sibling(out, "tmp");
    {
        let mut w = RecordWriter::new(File::create(&tmp)?, true)?;
        for rec in records {
            w.write(rec)?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, out)?;
    Ok(())
}

/// Failed trials with their key columns and reason. Removes a stale sidecar
/// when nothing failed.
fn write_failures(path: &Path, failures: &[Failure]) -> Result<()> {
    if failures.is_empty() {
        if path.exists() {
            fs::remove_file(path)?;
        }
        return Ok(());
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment_id", "k", "m", "r", "shaper", "mu", "trial", "seed", "reason"])?;
    for f in failures {
        let rec = &f.record;
        w.write_record([
            rec.experiment_id.clone(),
            rec.k.to_string(),
            rec.m.to_string(),
            rec.r.map_or_else(String::new, |r| r.to_string()),
            rec.shaper.clone(),
            rec.mu.map_or_else(String::new, |mu| mu.to_string()),
            rec.trial.to_string(),
            rec.seed.to_string(),
            f.reason.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
