//! Per-cell summaries, log-log slope fits and plot scripts, all recomputed
//! from raw trial records.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sdcs_core::stats::Summary;
use sdcs_core::fit_loglog_slope;

use crate::error::Result;
use crate::record::{fmt_f64, RecordKey, TrialRecord};

/// A cell is a record key without the trial index.
pub type CellKey = RecordKey;

/// A series groups cells that differ only in m.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeriesKey {
    pub experiment_id: String,
    pub k: usize,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub shaper: String,
    pub mu: Option<u64>,
    pub delta: Option<u64>,
    pub kprime: Option<usize>,
    pub signal_model: String,
}

impl SeriesKey {
    pub fn label(&self) -> String {
        let mut s = format!("{} k={}", self.experiment_id, self.k);
        if let Some(r) = self.r {
            let _ = write!(s, " r={r}");
        }
        if !self.shaper.is_empty() {
            let _ = write!(s, " {}", self.shaper);
        }
        if let Some(mu) = self.mu {
            let _ = write!(s, " mu={}", f64::from_bits(mu));
        }
        s
    }
}

fn cell_key(rec: &TrialRecord) -> CellKey {
    RecordKey {
        trial: 0,
        ..rec.key()
    }
}

fn series_key(cell: &CellKey) -> SeriesKey {
    SeriesKey {
        experiment_id: cell.experiment_id.clone(),
        k: cell.k,
        n: cell.n,
        r: cell.r,
        shaper: cell.shaper.clone(),
        mu: cell.mu,
        delta: cell.delta,
        kprime: cell.kprime,
        signal_model: cell.signal_model.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub key: CellKey,
    pub lambda: f64,
    pub trials: usize,
    pub coarse: Option<Summary>,
    pub fine: Option<Summary>,
    pub sigma_min: Option<Summary>,
    pub u_inf: Option<Summary>,
    /// Fraction of trials with the exact support.
    pub support_rate: Option<f64>,
    pub overload_rate: Option<f64>,
    /// Empirical robust-recovery constant: max over trials of
    /// `coarse_err sqrt(m) / eps` with `eps = 2^{r-1} delta sqrt(m)`.
    pub c1_hat: Option<f64>,
}

impl CellSummary {
    /// `max over trials of 1 / sigma_min`.
    pub fn worst_inverse_sigma(&self) -> Option<f64> {
        self.sigma_min.map(|s| 1.0 / s.min)
    }
}

fn summary_of(values: impl Iterator<Item = Option<f64>>) -> Option<Summary> {
    let v: Vec<f64> = values.flatten().collect();
    Summary::of(&v)
}

fn rate(values: impl Iterator<Item = Option<bool>>) -> Option<f64> {
    let v: Vec<bool> = values.flatten().collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().filter(|b| **b).count() as f64 / v.len() as f64)
    }
}

pub fn summarize(records: &[TrialRecord]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<CellKey, Vec<&TrialRecord>> = BTreeMap::new();
    for rec in records {
        cells.entry(cell_key(rec)).or_default().push(rec);
    }
    cells
        .into_iter()
        .map(|(key, recs)| {
            let c1_hat = recs
                .iter()
                .filter_map(|r| {
                    let radius = 2f64.powi(r.r? as i32 - 1) * r.delta?;
                    Some(r.coarse_err? / radius)
                })
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
            CellSummary {
                lambda: recs[0].lambda,
                trials: recs.len(),
                coarse: summary_of(recs.iter().map(|r| r.coarse_err)),
                fine: summary_of(recs.iter().map(|r| r.fine_err)),
                sigma_min: summary_of(recs.iter().map(|r| r.sigma_min)),
                u_inf: summary_of(recs.iter().map(|r| r.u_inf)),
                support_rate: rate(recs.iter().map(|r| r.support_exact)),
                overload_rate: rate(recs.iter().map(|r| r.overloaded)),
                c1_hat,
                key,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    MeanCoarse,
    MeanFine,
    MaxFine,
    WorstInverseSigma,
    MaxInfRatio,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Self::MeanCoarse => "mean_coarse_err",
            Self::MeanFine => "mean_fine_err",
            Self::MaxFine => "max_fine_err",
            Self::WorstInverseSigma => "worst_inv_sigma_min",
            Self::MaxInfRatio => "max_inf_ratio",
        }
    }

    pub fn of(self, cell: &CellSummary) -> Option<f64> {
        match self {
            Self::MeanCoarse => cell.coarse.map(|s| s.mean),
            Self::MeanFine => cell.fine.map(|s| s.mean),
            Self::MaxFine => cell.fine.map(|s| s.max),
            Self::WorstInverseSigma => cell.worst_inverse_sigma(),
            Self::MaxInfRatio => cell.u_inf.filter(|_| cell.key.r.is_none()).map(|s| s.max),
        }
    }

    pub const ALL: [Metric; 5] = [
        Self::MeanCoarse,
        Self::MeanFine,
        Self::MaxFine,
        Self::WorstInverseSigma,
        Self::MaxInfRatio,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeRow {
    pub series: SeriesKey,
    pub metric: Metric,
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

/// Values of `metric` against lambda for every series.
pub fn series(cells: &[CellSummary], metric: Metric) -> BTreeMap<SeriesKey, Vec<(f64, f64)>> {
    let mut out: BTreeMap<SeriesKey, Vec<(f64, f64)>> = BTreeMap::new();
    for cell in cells {
        if let Some(v) = metric.of(cell) {
            out.entry(series_key(&cell.key)).or_default().push((cell.lambda, v));
        }
    }
    for pts in out.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Log-log slope of every metric against lambda, for series with at least
/// three positive points.
pub fn fit_slopes(cells: &[CellSummary]) -> Vec<SlopeRow> {
    let mut rows = Vec::new();
    for metric in Metric::ALL {
        for (key, points) in series(cells, metric) {
            let (x, y): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
            if let Ok(fit) = fit_loglog_slope(&x, &y) {
                rows.push(SlopeRow {
                    series: key,
                    metric,
                    points,
                    slope: fit.slope,
                    intercept: fit.intercept,
                    residual: fit.residual,
                });
            }
        }
    }
    rows
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f64)
}

pub fn write_summary_csv(path: &std::path::Path, cells: &[CellSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "experiment_id", "k", "m", "lambda", "N", "r", "shaper", "mu", "delta", "kprime",
        "signal_model", "trials", "coarse_mean", "coarse_min", "coarse_max", "fine_mean",
        "fine_min", "fine_max", "support_rate", "sigma_min_mean", "sigma_min_min",
        "sigma_min_max", "u_inf_max", "overload_rate", "c1_hat",
    ])?;
    for c in cells {
        let k = &c.key;
        w.write_record([
            k.experiment_id.clone(),
            k.k.to_string(),
            k.m.to_string(),
            fmt_f64(c.lambda),
            k.n.map_or_else(String::new, |v| v.to_string()),
            k.r.map_or_else(String::new, |v| v.to_string()),
            k.shaper.clone(),
            opt(k.mu.map(f64::from_bits)),
            opt(k.delta.map(f64::from_bits)),
            k.kprime.map_or_else(String::new, |v| v.to_string()),
            k.signal_model.clone(),
            c.trials.to_string(),
            opt(c.coarse.map(|s| s.mean)),
            opt(c.coarse.map(|s| s.min)),
            opt(c.coarse.map(|s| s.max)),
            opt(c.fine.map(|s| s.mean)),
            opt(c.fine.map(|s| s.min)),
            opt(c.fine.map(|s| s.max)),
            opt(c.support_rate),
            opt(c.sigma_min.map(|s| s.mean)),
            opt(c.sigma_min.map(|s| s.min)),
            opt(c.sigma_min.map(|s| s.max)),
            opt(c.u_inf.map(|s| s.max)),
            opt(c.overload_rate),
            opt(c.c1_hat),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text slope table.
pub fn format_slopes(rows: &[SlopeRow]) -> String {
    let mut s = String::new();
    for row in rows {
        let _ = writeln!(
            s,
            "{:<48} {:<22} slope {:>8.4}  intercept {:>8.4}  residual {:.3e}",
            row.series.label(),
            row.metric.name(),
            row.slope,
            row.intercept,
            row.residual
        );
    }
    s
}

/// A self-contained gnuplot script (inline data blocks) drawing every series
/// of the given metrics on log-log axes.
pub fn gnuplot_script(cells: &[CellSummary], metrics: &[Metric], output: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 900,650");
    let _ = writeln!(s, "set output '{output}'");
    let _ = writeln!(s, "set logscale xy");
    let _ = writeln!(s, "set xlabel 'lambda = m/k'");
    let _ = writeln!(s, "set key outside right");
    let mut plots = Vec::new();
    let mut block = 0;
    for &metric in metrics {
        for (key, points) in series(cells, metric) {
            let _ = writeln!(s, "$s{block} << EOD");
            for (x, y) in &points {
                let _ = writeln!(s, "{x} {y}");
            }
            let _ = writeln!(s, "EOD");
            plots.push(format!(
                "$s{block} using 1:2 with linespoints title '{} {}'",
                key.label(),
                metric.name()
            ));
            block += 1;
        }
    }
    if plots.is_empty() {
        let _ = writeln!(s, "# no data");
    } else {
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    s
}
