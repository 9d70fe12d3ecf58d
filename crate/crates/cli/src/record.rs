//! One CSV row per (cell, trial).
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back and writing it again reproduces it byte for byte. Columns that
//! do not apply to an experiment are left empty.

use std::cmp::Ordering;
use std::io::{Read, Write};

use crate::error::{HarnessError, Result};

pub const COLUMNS: [&str; 21] = [
    "experiment_id",
    "k",
    "m",
    "lambda",
    "N",
    "r",
    "shaper",
    "mu",
    "delta",
    "kprime",
    "signal_model",
    "trial",
    "seed",
    "coarse_err",
    "fine_err",
    "support_exact",
    "sigma_min",
    "u_inf",
    "u_l2",
    "overloaded",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment_id: String,
    pub k: usize,
    pub m: usize,
    pub lambda: f64,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub shaper: String,
    pub mu: Option<f64>,
    pub delta: Option<f64>,
    pub kprime: Option<usize>,
    pub signal_model: String,
    pub trial: usize,
    pub seed: u64,
    pub coarse_err: Option<f64>,
    pub fine_err: Option<f64>,
    pub support_exact: Option<bool>,
    pub sigma_min: Option<f64>,
    /// `||u||_inf`; the inf-norm study stores `||E||_{inf->inf} / sqrt(mk)` here.
    pub u_inf: Option<f64>,
    pub u_l2: Option<f64>,
    pub overloaded: Option<bool>,
    pub wall_ms: Option<f64>,
}

/// Identity of a record within a sweep: everything but the outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecordKey {
    pub experiment_id: String,
    pub k: usize,
    pub m: usize,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub shaper: String,
    /// Bit patterns; all keyed floats are positive, so bit order is numeric order.
    pub mu: Option<u64>,
    pub delta: Option<u64>,
    pub kprime: Option<usize>,
    pub signal_model: String,
    pub trial: usize,
}

impl TrialRecord {
    /// A record with cell parameters filled in and no outcomes.
    pub fn skeleton(experiment_id: &str, k: usize, m: usize, trial: usize, seed: u64) -> Self {
        Self {
            experiment_id: experiment_id.to_string(),
            k,
            m,
            lambda: m as f64 / k as f64,
            n: None,
            r: None,
            shaper: String::new(),
            mu: None,
            delta: None,
            kprime: None,
            signal_model: String::new(),
            trial,
            seed,
            coarse_err: None,
            fine_err: None,
            support_exact: None,
            sigma_min: None,
            u_inf: None,
            u_l2: None,
            overloaded: None,
            wall_ms: None,
        }
    }

    pub fn key(&self) -> RecordKey {
        RecordKey {
            experiment_id: self.experiment_id.clone(),
            k: self.k,
            m: self.m,
            n: self.n,
            r: self.r,
            shaper: self.shaper.clone(),
            mu: self.mu.map(f64::to_bits),
            delta: self.delta.map(f64::to_bits),
            kprime: self.kprime,
            signal_model: self.signal_model.clone(),
            trial: self.trial,
        }
    }

    fn fields(&self) -> [String; 21] {
        [
            self.experiment_id.clone(),
            self.k.to_string(),
            self.m.to_string(),
            fmt_f64(self.lambda),
            opt(self.n),
            opt(self.r),
            self.shaper.clone(),
            opt_f64(self.mu),
            opt_f64(self.delta),
            opt(self.kprime),
            self.signal_model.clone(),
            self.trial.to_string(),
            self.seed.to_string(),
            opt_f64(self.coarse_err),
            opt_f64(self.fine_err),
            opt(self.support_exact),
            opt_f64(self.sigma_min),
            opt_f64(self.u_inf),
            opt_f64(self.u_l2),
            opt(self.overloaded),
            opt_f64(self.wall_ms),
        ]
    }

    fn from_fields(row: &csv::StringRecord, line: u64) -> Result<Self> {
        if row.len() != COLUMNS.len() {
            return Err(HarnessError::Record {
                line,
                reason: format!("expected {} fields, found {}", COLUMNS.len(), row.len()),
            });
        }
        let f = |i: usize| &row[i];
        let bad = |i: usize| HarnessError::Record {
            line,
            reason: format!("bad {} `{}`", COLUMNS[i], &row[i]),
        };
        let req = |i: usize| -> Result<String> {
            if row[i].is_empty() {
                Err(bad(i))
            } else {
                Ok(row[i].to_string())
            }
        };
        macro_rules! parse {
            ($i:expr) => {
                req($i)?.parse().map_err(|_| bad($i))?
            };
        }
        macro_rules! parse_opt {
            ($i:expr) => {
                if f($i).is_empty() {
                    None
                } else {
                    Some(f($i).parse().map_err(|_| bad($i))?)
                }
            };
        }
        Ok(Self {
            experiment_id: req(0)?,
            k: parse!(1),
            m: parse!(2),
            lambda: parse!(3),
            n: parse_opt!(4),
            r: parse_opt!(5),
            shaper: f(6).to_string(),
            mu: parse_opt!(7),
            delta: parse_opt!(8),
            kprime: parse_opt!(9),
            signal_model: f(10).to_string(),
            trial: parse!(11),
            seed: parse!(12),
            coarse_err: parse_opt!(13),
            fine_err: parse_opt!(14),
            support_exact: parse_opt!(15),
            sigma_min: parse_opt!(16),
            u_inf: parse_opt!(17),
            u_l2: parse_opt!(18),
            overloaded: parse_opt!(19),
            wall_ms: parse_opt!(20),
        })
    }
}

pub fn compare(a: &TrialRecord, b: &TrialRecord) -> Ordering {
    a.key().cmp(&b.key())
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f64)
}

/// Appends records to a CSV stream; the header is written on creation.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(sink: W, header: bool) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
        if header {
            inner.write_record(COLUMNS)?;
        }
        Ok(Self { inner })
    }

    pub fn write(&mut self, rec: &TrialRecord) -> Result<()> {
        self.inner.write_record(rec.fields())?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Reads every record of a CSV produced by `RecordWriter`. A truncated last
/// line (from an interrupted run) is dropped.
pub fn read_records<R: Read>(source: R) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(HarnessError::Record {
            line: 1,
            reason: "header does not match the trial schema".into(),
        });
    }
    let rows: Vec<csv::StringRecord> = reader.records().collect::<std::result::Result<_, _>>()?;
    let mut out = Vec::with_capacity(rows.len());
    let last = rows.len().saturating_sub(1);
    for (i, row) in rows.iter().enumerate() {
        let line = row.position().map_or(0, |p| p.line());
        match TrialRecord::from_fields(row, line) {
            Ok(rec) => out.push(rec),
            Err(_) if i == last => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
