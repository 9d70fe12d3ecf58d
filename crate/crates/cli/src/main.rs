use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sdcs::config::{parse_pairs, ExperimentConfig, ExperimentKind};
use sdcs::record::read_records;
use sdcs::report::{fit_slopes, format_slopes, gnuplot_script, summarize, write_summary_csv, Metric};
use sdcs::runner::{resolve_threads, run_sweep};
use sdcs::tables::{rate_table, spectral_suite, write_rates, write_spectral};
use sdcs::HarnessError;

#[derive(Parser)]
#[command(name = "sdcs", version, about = "Sigma-delta compressed sensing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named by the config (`experiment = ...`).
    Run(Common),
    /// Spectral checks on the difference matrix and its powers.
    Spectral(Common),
    /// Smallest singular value of D^{-r} E over an oversampling grid.
    Sigmamin(Common),
    /// Step size, bit budget and predicted distortion.
    Ratedistortion(Common),
    /// Summaries and slope fits of an existing trial CSV.
    Report {
        /// Trial CSV written by `run` or `sigmamin`.
        input: PathBuf,
        /// Summary CSV path; defaults to `<input>.summary.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a gnuplot script next to the summary.
        #[arg(long)]
        plot: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; `SDCS_THREADS` is used when absent.
    #[arg(long)]
    threads: Option<usize>,
    /// Large grids instead of desk-scale defaults.
    #[arg(long)]
    full: bool,
    /// Override any config key, e.g. `--set trials=10`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write a gnuplot script next to the output.
    #[arg(long)]
    plot: bool,
}

impl Common {
    fn config(&self, forced: Option<ExperimentKind>) -> sdcs::Result<ExperimentConfig> {
        let mut pairs = match &self.config {
            Some(path) => parse_pairs(&fs::read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        for item in &self.overrides {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("--set expects KEY=VALUE, got `{item}`")))?;
            pairs.insert(k.trim().to_string(), v.trim().to_string());
        }
        if let Some(kind) = forced {
            pairs.insert("experiment".into(), kind.name().into());
        }
        if let Some(seed) = self.seed {
            pairs.insert("seed".into(), seed.to_string());
        }
        if let Some(out) = &self.out {
            pairs.insert("out".into(), out.display().to_string());
        }
        ExperimentConfig::from_pairs(&pairs, self.full)
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

fn plot_metrics(kind: Option<ExperimentKind>) -> &'static [Metric] {
    match kind {
        Some(ExperimentKind::SigmaMinStudy) => &[Metric::WorstInverseSigma],
        Some(ExperimentKind::InfNormStudy) => &[Metric::MaxInfRatio],
        _ => &[Metric::MeanCoarse, Metric::MeanFine],
    }
}

fn report(input: &Path, out: &Path, plot: bool, kind: Option<ExperimentKind>) -> sdcs::Result<()> {
    let records = read_records(fs::File::open(input)?)?;
    let cells = summarize(&records);
    write_summary_csv(out, &cells)?;
    print!("{}", format_slopes(&fit_slopes(&cells)));
    if plot {
        let png = with_suffix(input, ".png");
        let script = gnuplot_script(&cells, plot_metrics(kind), &png.display().to_string());
        fs::write(with_suffix(input, ".gp"), script)?;
    }
    println!("summary: {}", out.display());
    Ok(())
}

fn sweep(common: &Common, forced: Option<ExperimentKind>) -> sdcs::Result<ExitCode> {
    let cfg = common.config(forced)?;
    match cfg.kind {
        ExperimentKind::SpectralSuite => {
            let rows = spectral_suite(&cfg)?;
            write_spectral(&cfg.out, &rows)?;
            let failed = rows.iter().filter(|r| r.pass == Some(false)).count();
            println!("{} checks, {failed} failed: {}", rows.len(), cfg.out.display());
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) });
        }
        ExperimentKind::RateDistortion => {
            write_rates(&cfg.out, &rate_table(&cfg)?)?;
            println!("rate table: {}", cfg.out.display());
            return Ok(ExitCode::SUCCESS);
        }
        _ => {}
    }
    let threads = resolve_threads(common.threads)?;
    let outcome = run_sweep(&cfg, threads)?;
    println!(
        "{}: {} records ({} new, {} resumed), {} failed",
        cfg.id,
        outcome.records.len(),
        outcome.executed - outcome.failures.len(),
        outcome.resumed,
        outcome.failures.len()
    );
    report(&cfg.out, &with_suffix(&cfg.out, ".summary.csv"), common.plot, Some(cfg.kind))?;
    Ok(if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed trials: {}", sdcs::runner::failures_path(&cfg.out).display());
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => sweep(c, None),
        Command::Spectral(c) => sweep(c, Some(ExperimentKind::SpectralSuite)),
        Command::Sigmamin(c) => sweep(c, Some(ExperimentKind::SigmaMinStudy)),
        Command::Ratedistortion(c) => sweep(c, Some(ExperimentKind::RateDistortion)),
        Command::Report { input, out, plot } => {
            let out = out.clone().unwrap_or_else(|| with_suffix(input, ".summary.csv"));
            report(input, &out, *plot, None).map(|()| ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
