//! Command-line front end for the protocol pipeline.
//!
//! Exit code 0 means no document-level failures; otherwise failures are
//! listed on stderr and the exit code is 1.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use plenum::pipeline::{self, PipelineConfig, RunSummary, SplitOptions, StatsOptions};
use plenum::stats::AgeWeighting;

#[derive(Parser)]
#[command(
    name = "plenum",
    about = "Turns stenographic parliamentary protocols into a structured speech corpus",
    version
)]
struct Cli {
    /// Pipeline configuration file (TOML).
    #[arg(long, global = true, default_value = "pipeline.toml")]
    config: PathBuf,

    /// Override the configured worker count.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Skip spelling correction even if the config enables it.
    #[arg(long, global = true)]
    no_spellcheck: bool,

    /// Merge predecessor parties into their successor in statistics.
    #[arg(long, global = true)]
    merge_successors: bool,

    /// Write a machine-readable JSONL run report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Binarize and deskew page scans, emit the recognizer manifest.
    Preprocess,
    /// Spell-correct OCR text documents into the corrected tree.
    Correct,
    /// Split protocols into the JSONL speech corpus (both text variants).
    Split,
    /// Aggregate the written corpus into CSV statistics.
    Stats {
        /// Print counts in rounded thousands.
        #[arg(long)]
        thousands: bool,
        /// Weighting of the average-age series.
        #[arg(long, value_enum, default_value_t = AgeArg::Segments)]
        age_weighting: AgeArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AgeArg {
    Segments,
    UniqueSpeakers,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{failures} document(s) failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<usize> {
    let config = PipelineConfig::load(&cli.config)
        .with_context(|| format!("loading {}", cli.config.display()))?;
    let options = SplitOptions {
        workers: cli.workers,
        no_spellcheck: cli.no_spellcheck,
        report: cli.report.clone(),
    };
    match &cli.command {
        Command::Preprocess => {
            let summary = pipeline::run_preprocess(&config)?;
            for error in &summary.errors {
                eprintln!("page failed: {error}");
            }
            println!(
                "prepared {} page(s), manifest at {}",
                summary.pages - summary.failed,
                summary.manifest.display()
            );
            Ok(summary.failed)
        }
        Command::Correct => {
            let summary = pipeline::run_correct(&config, &options)?;
            print_failures(&summary);
            println!(
                "corrected {} document(s) into {}",
                summary.documents - summary.failed,
                config.corrected_root().display()
            );
            Ok(summary.failed)
        }
        Command::Split => {
            let summary = pipeline::run_split(&config, &options)?;
            print_failures(&summary);
            println!(
                "split {} document(s) into {} segment(s) under {}",
                summary.documents - summary.failed,
                summary.segments,
                config.output.root.display()
            );
            Ok(summary.failed)
        }
        Command::Stats {
            thousands,
            age_weighting,
        } => {
            let stats_options = StatsOptions {
                merge_successors: if cli.merge_successors { Some(true) } else { None },
                thousands: *thousands,
                weighting: match age_weighting {
                    AgeArg::Segments => AgeWeighting::Segments,
                    AgeArg::UniqueSpeakers => AgeWeighting::UniqueSpeakers,
                },
            };
            let summary = pipeline::run_stats(&config, &stats_options)?;
            println!(
                "aggregated {} record(s): {} and {}",
                summary.records,
                summary.counts_csv.display(),
                summary.age_csv.display()
            );
            Ok(0)
        }
    }
}

fn print_failures(summary: &RunSummary) {
    for report in &summary.reports {
        if let Some(error) = &report.error {
            eprintln!("{}: {error}", report.path);
        }
    }
}
