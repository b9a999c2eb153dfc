use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liquidity_core::indicators::{ClDefinition, IndicatorOptions};
use liquidity_core::ingest::{load_csv, Dataset, Field, IngestError};
use liquidity_core::report::{render_scenario, render_stats, summarize_dataset, Format, GroupBy, StatsRequest};
use liquidity_core::stats::{Sample, DEFAULT_TAIL_FRACTION};
use liquidity_core::svg::{boxplot_svg, sz_curve_svg};
use liquidity_core::{ScenarioConfig, SzCurve};

/// Liquidity strategy model and descriptive statistics for non-profit
/// financial statements.
#[derive(Debug, Parser)]
#[command(name = "npoliq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the strategies of a scenario file and compare them.
    Scenario {
        /// Scenario file with [market], [weights], [sz] and [profile] sections.
        #[arg(long, short)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
    },
    /// Summary statistics of a financial-statement CSV.
    Stats(StatsArgs),
    /// Write an SVG figure.
    #[command(subcommand)]
    Plot(PlotCommand),
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Financial-statement CSV, one row per organization and year.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Grouping::None)]
    group_by: Grouping,
    /// Comma-separated column or indicator names; defaults to the six liquidity indicators.
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    /// Fraction removed from each tail for the truncated mean.
    #[arg(long, default_value_t = DEFAULT_TAIL_FRACTION)]
    trim: f64,
    /// Fraction replaced in each tail for the winsorized mean.
    #[arg(long, default_value_t = DEFAULT_TAIL_FRACTION)]
    winsor: f64,
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    #[command(flatten)]
    indicators: IndicatorArgs,
}

#[derive(Debug, Args)]
struct IndicatorArgs {
    /// Current liabilities used by the liquidity ratios.
    #[arg(long, value_enum, default_value_t = ClChoice::DebtAndPayables)]
    current_liabilities: ClChoice,
    /// Days per year in the conversion periods.
    #[arg(long, default_value_t = 365.0)]
    day_count: f64,
    /// Treat ROE as absent when fund capital is zero or negative.
    #[arg(long)]
    strict_roe: bool,
}

impl IndicatorArgs {
    fn options(&self) -> Result<IndicatorOptions, Failure> {
        if !(self.day_count.is_finite() && self.day_count > 0.0) {
            return Err(Failure::Validation(format!("--day-count must be positive, got {}", self.day_count)));
        }
        Ok(IndicatorOptions {
            day_count: self.day_count,
            cl_definition: match self.current_liabilities {
                ClChoice::DebtAndPayables => ClDefinition::ShortDebtPlusPayables,
                ClChoice::DebtOnly => ClDefinition::ShortDebtOnly,
            },
            strict_roe: self.strict_roe,
        })
    }
}

#[derive(Debug, Subcommand)]
enum PlotCommand {
    /// The SZ correction curve.
    Sz {
        /// Built-in curve name (SZ1 or SZ3).
        #[arg(long, conflicts_with = "anchors", required_unless_present = "anchors")]
        variant: Option<String>,
        /// Custom anchors as `ca:sz, ca:sz, ...`.
        #[arg(long)]
        anchors: Option<String>,
        /// Mark the premium at this CA/CR.
        #[arg(long)]
        highlight: Option<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Box-and-whisker plot of one or more columns.
    Box {
        #[arg(long, short)]
        input: PathBuf,
        /// One box per comma-separated column or indicator.
        #[arg(long, value_delimiter = ',', required = true)]
        metric: Vec<String>,
        /// Restrict to one sector label.
        #[arg(long)]
        sector: Option<String>,
        #[arg(long)]
        year: Option<i32>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        indicators: IndicatorArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Text => Format::Text,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Grouping {
    None,
    Sector,
    Year,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClChoice {
    /// Short-term debt plus accounts payable.
    DebtAndPayables,
    /// Short-term debt only.
    DebtOnly,
}

/// Exit status 1 for bad input, 2 for file-system trouble.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> ExitCode {
        match self {
            Self::Validation(_) => ExitCode::from(1),
            Self::Io(_) => ExitCode::from(2),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        if e.is_io() {
            Self::Io(e.to_string())
        } else {
            Self::Validation(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Validation(msg) | Failure::Io(msg)) = &f;
            eprintln!("error: {msg}");
            f.exit_code()
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Scenario { config, format } => {
            let cfg = ScenarioConfig::load(&config).map_err(|e| {
                if e.is_io() {
                    Failure::Io(e.to_string())
                } else {
                    Failure::Validation(format!("{}: {e}", config.display()))
                }
            })?;
            let cmp = cfg.evaluate().map_err(|e| Failure::Validation(e.to_string()))?;
            emit(None, &render_scenario(&cmp, &cfg.curve, cfg.rounding, format.into()))
        }
        Command::Stats(args) => stats(args),
        Command::Plot(PlotCommand::Sz { variant, anchors, highlight, output }) => {
            let curve = match (variant, anchors) {
                (Some(v), _) => SzCurve::builtin(&v),
                (None, Some(list)) => SzCurve::from_anchor_list("custom", &list),
                (None, None) => unreachable!("clap requires one of the two"),
            }
            .map_err(|e| Failure::Validation(e.to_string()))?;
            if let Some(h) = highlight.filter(|h| !h.is_finite() || *h < 0.0) {
                return Err(Failure::Validation(format!("--highlight must be a non-negative number, got {h}")));
            }
            emit(output.as_deref(), &sz_curve_svg(&curve, highlight))
        }
        Command::Plot(PlotCommand::Box { input, metric, sector, year, output, indicators }) => {
            let opts = indicators.options()?;
            let fields = parse_fields(&metric)?;
            let ds = load(&input)?.filter(sector.as_deref(), year);
            let mut boxes = Vec::new();
            for field in fields {
                let sample: Sample = ds.column(field, &opts);
                let five = sample
                    .five_number()
                    .map_err(|_| Failure::Validation(format!("no values for `{field}` in the selected records")))?;
                boxes.push((field.name().to_string(), five));
            }
            let mut title = String::from("Distribution");
            if let Some(s) = &sector {
                title.push_str(&format!(", sector {s}"));
            }
            if let Some(y) = year {
                title.push_str(&format!(", {y}"));
            }
            emit(output.as_deref(), &boxplot_svg(&title, &boxes))
        }
    }
}

fn stats(args: StatsArgs) -> Result<(), Failure> {
    let metrics = if args.metrics.is_empty() { Field::LIQUIDITY_SET.to_vec() } else { parse_fields(&args.metrics)? };
    let req = StatsRequest {
        group_by: match args.group_by {
            Grouping::None => GroupBy::None,
            Grouping::Sector => GroupBy::Sector,
            Grouping::Year => GroupBy::Year,
        },
        metrics,
        trim_fraction: args.trim,
        winsor_fraction: args.winsor,
        indicators: args.indicators.options()?,
    };
    let ds = load(&args.input)?;
    let groups = summarize_dataset(&ds, &req).map_err(|e| Failure::Validation(e.to_string()))?;
    emit(None, &render_stats(&groups, &req, args.format.into()))
}

fn parse_fields(names: &[String]) -> Result<Vec<Field>, Failure> {
    names
        .iter()
        .map(|n| n.trim().parse::<Field>().map_err(|e| Failure::Validation(e.to_string())))
        .collect()
}

/// Loads a CSV and reports skipped rows on stderr.
fn load(path: &Path) -> Result<Dataset, Failure> {
    let ds = load_csv(path)?;
    for w in &ds.warnings {
        eprintln!("warning: {w}");
    }
    for r in &ds.rejects {
        eprintln!("skipped row {}: {}", r.row, r.reason);
    }
    if !ds.rejects.is_empty() {
        eprintln!(
            "{}: {} of {} rows accepted",
            ds.provenance.source, ds.provenance.accepted, ds.provenance.total_rows
        );
    }
    Ok(ds)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("cannot write output: {e}")))
        }
    }
}
