//! `talkshare` command-line tool: batch analysis, group comparisons,
//! rendering, and corpus statistics over timestamped transcripts.

mod analyze;
mod compare;
mod filter;
mod output;
mod survey_stats;
mod table;
mod tools;
mod viz;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Error caused by how the tool was invoked rather than by the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "talkshare", version, about = "Talk-time sharing dynamics for conversation transcripts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by commands that run the analysis configuration.
#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Analysis configuration JSON (defaults apply to missing keys)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Role map JSON grouping speakers into parties
    #[arg(long)]
    pub roles: Option<PathBuf>,
    /// Seed for every random choice (overrides the config's rng_seed)
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VizMode {
    Strip,
    Pie,
    Grid,
    Term,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SortArg {
    Imbalance,
    Id,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommentField {
    CommentPositive,
    CommentNegative,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze every conversation in a transcript file
    Analyze {
        /// Transcript file (CSV or JSONL)
        transcripts: PathBuf,
        /// Input format; inferred from the extension when omitted
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Window length in seconds
        #[arg(long)]
        k: Option<f64>,
        /// Window stride in seconds
        #[arg(long)]
        l: Option<f64>,
        /// Dominance threshold as a fraction
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare two filtered groups of speakers: phrases, enjoyment, test
    Compare {
        /// summary.csv written by `analyze`
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        survey: PathBuf,
        /// Conjunctive filter, e.g. "stereotype=BackAndForth,flips>=2"
        #[arg(long)]
        group_a: String,
        #[arg(long)]
        group_b: String,
        #[arg(long, value_enum, default_value = "comment-positive")]
        field: CommentField,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = talkshare::ingest::DEFAULT_ENJOYMENT_MAX)]
        enjoyment_max: u32,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Render reports as SVG strips, pies, a corpus grid, or terminal blocks
    Viz {
        /// One report JSON
        #[arg(long, conflicts_with = "reports_dir", required_unless_present = "reports_dir")]
        report: Option<PathBuf>,
        /// Directory of report JSON files
        #[arg(long)]
        reports_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: VizMode,
        #[arg(long, value_enum, default_value = "imbalance")]
        sort: SortArg,
        /// Output file (or directory for per-report SVGs); stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Role consistency of speakers seen in several conversations
    Consistency {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        survey: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = talkshare::ingest::DEFAULT_ENJOYMENT_MAX)]
        enjoyment_max: u32,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Gender and age of primary speakers, with stereotype share tables
    Demographics {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        survey: PathBuf,
        /// Age at which a speaker counts as older; median age when omitted
        #[arg(long)]
        age_split: Option<u32>,
        /// Smallest age difference that enters the age test
        #[arg(long, default_value_t = 3)]
        age_gap: u32,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = talkshare::ingest::DEFAULT_ENJOYMENT_MAX)]
        enjoyment_max: u32,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate a transcript from a blueprint
    Synth {
        #[arg(long)]
        blueprint: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Overlap precision/recall/F1 between two speech interval files
    ValidateIntervals {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        hypothesis: PathBuf,
        /// Output JSON; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Analyze { transcripts, format, cfg, k, l, m, out_dir } => {
            analyze::run(&transcripts, format, &cfg, (k, l, m), &out_dir)
        }
        Command::Compare { summary, survey, group_a, group_b, field, cfg, enjoyment_max, out_dir } => {
            compare::run(compare::Request {
                summary: &summary,
                survey: &survey,
                group_a: &group_a,
                group_b: &group_b,
                field,
                cfg: &cfg,
                enjoyment_max,
                out_dir: &out_dir,
            })
        }
        Command::Viz { report, reports_dir, mode, sort, out } => {
            viz::run(report.as_deref(), reports_dir.as_deref(), mode, sort, out.as_deref())
        }
        Command::Consistency { summary, survey, cfg, enjoyment_max, out_dir } => {
            survey_stats::consistency(&summary, &survey, &cfg, enjoyment_max, &out_dir)
        }
        Command::Demographics { summary, survey, age_split, age_gap, cfg, enjoyment_max, out_dir } => {
            survey_stats::demographics(survey_stats::DemographicsRequest {
                summary: &summary,
                survey: &survey,
                age_split,
                age_gap,
                cfg: &cfg,
                enjoyment_max,
                out_dir: &out_dir,
            })
        }
        Command::Synth { blueprint, out } => tools::synth(&blueprint, &out),
        Command::ValidateIntervals { reference, hypothesis, out } => {
            tools::validate_intervals(&reference, &hypothesis, out.as_deref())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<talkshare::Error>() {
        Some(talkshare::Error::Config { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
