use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use hiernet::ingest::{load_bundle, synth_generate, validate_bundle, BundlePaths, ParseMode, Severity, SynthConfig};
use hiernet::mobility::Correlation;
use hiernet::report::{parse_metrics, run_report, Metric, ReportConfig};
use hiernet::time::{from_day, to_day, WindowPlan};
use hiernet::{Anchoring, DegreeMode, Error};

#[derive(Parser)]
#[command(name = "hiernet", version, about = "Role-stratified temporal network reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check input files, listing every problem found.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
        /// Metrics the inputs will be used for; role metrics need role data.
        #[arg(long)]
        metrics: Option<String>,
    },
    /// Compute metrics over a sliding-window plan and write tidy CSV files.
    Report(ReportArgs),
    /// Generate a synthetic bundle from a TOML config.
    Synth {
        /// TOML config; omitted fields take the IETF-like preset values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    origins: Option<PathBuf>,
    #[arg(long)]
    roles: Option<PathBuf>,
    #[arg(long)]
    group_events: Option<PathBuf>,
    #[arg(long)]
    lists: Option<PathBuf>,
    /// Meeting-granularity AD listings (person,meeting_date).
    #[arg(long)]
    ad_listings: Option<PathBuf>,
    /// Abort on any invalid row (default).
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Drop invalid rows and report them.
    #[arg(long)]
    lenient: bool,
}

impl Inputs {
    fn paths(&self) -> BundlePaths {
        BundlePaths {
            edges: self.edges.clone(),
            origins: self.origins.clone(),
            roles: self.roles.clone(),
            group_events: self.group_events.clone(),
            lists: self.lists.clone(),
            ad_listings: self.ad_listings.clone(),
        }
    }

    fn mode(&self) -> ParseMode {
        if self.lenient {
            ParseMode::Lenient
        } else {
            ParseMode::Strict
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AnchoringArg {
    Participants,
    FirstSender,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorrelationArg {
    Pearson,
    Spearman,
}

#[derive(Clone, Copy, ValueEnum)]
enum DegreeArg {
    DirectedPairs,
    DistinctNeighbours,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Plan start (default: first event date).
    #[arg(long)]
    from: Option<NaiveDate>,
    /// Plan end, exclusive (default: day after the last event).
    #[arg(long)]
    to: Option<NaiveDate>,
    #[arg(long, default_value_t = 12)]
    window_months: u32,
    #[arg(long, default_value_t = 1)]
    stride_months: u32,
    #[arg(long, default_value_t = 30)]
    motif_delta_days: u32,
    /// Comma-separated metric names, or `all`.
    #[arg(long, default_value = "all")]
    metrics: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Recorded in the run metadata.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "participants")]
    anchoring: AnchoringArg,
    #[arg(long, value_enum, default_value = "pearson")]
    correlation: CorrelationArg,
    #[arg(long, value_enum, default_value = "directed-pairs")]
    degree_mode: DegreeArg,
    #[arg(long, default_value = "2012-06-21")]
    roles_valid_from: NaiveDate,
    /// Stop reporting the list-activity working-group count from this date.
    #[arg(long, default_value = "2021-01-01")]
    list_truncation: NaiveDate,
    /// Also emit AD taxonomy rows.
    #[arg(long)]
    taxonomy_include_ad: bool,
}

/// Exit codes: 1 invalid input, 2 I/O, 3 configuration.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invalid { .. } | Error::SelfLoop { .. } | Error::DuplicateSeq(_) => 1,
        Error::FileIo { .. } | Error::Io(_) => 2,
        Error::Csv(c) if c.is_io_error() => 2,
        Error::Csv(_) => 1,
        _ => 3,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    if let Error::Invalid { issues, .. } = &e {
        for i in issues.iter().skip(1) {
            eprintln!("  {i}");
        }
    }
    ExitCode::from(exit_code(&e))
}

fn validate(inputs: &Inputs, metrics: Option<&str>) -> Result<ExitCode, Error> {
    let wanted: BTreeSet<Metric> = match metrics {
        Some(m) => parse_metrics(m).map_err(Error::Config)?,
        None => BTreeSet::new(),
    };
    let loaded = validate_bundle(&inputs.paths())?;
    for i in &loaded.issues {
        println!("{i}");
    }
    let errors = loaded.issues.iter().filter(|i| i.severity == Severity::Error).count();
    let warnings = loaded.issues.len() - errors;
    println!("{errors} errors, {warnings} warnings");
    let role_metrics: Vec<&str> = wanted.iter().filter(|m| m.needs_roles()).map(|m| m.as_str()).collect();
    if !role_metrics.is_empty() && !loaded.bundle.has_role_data() {
        return Err(Error::Config(format!(
            "metrics {} need --roles, --group-events or --ad-listings",
            role_metrics.join(",")
        )));
    }
    Ok(if errors > 0 && inputs.mode() == ParseMode::Strict {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn report(args: &ReportArgs) -> Result<ExitCode, Error> {
    let mode = args.inputs.mode();
    let loaded = load_bundle(&args.inputs.paths(), mode)?;
    for i in &loaded.issues {
        eprintln!("{i}");
    }
    let bundle = loaded.bundle;
    let extent = bundle.edges.iter().map(|e| e.date).min().zip(bundle.edges.iter().map(|e| e.date).max());
    let from = args.from.or(extent.map(|e| e.0));
    let to = args.to.or(extent.map(|e| from_day(to_day(e.1) + 1)));
    let (Some(from), Some(to)) = (from, to) else {
        return Err(Error::Config("no events: pass --from and --to".into()));
    };
    let plan = WindowPlan::new(from, to, args.window_months, args.stride_months)?;
    let mut cfg = ReportConfig::new(plan);
    cfg.metrics = parse_metrics(&args.metrics).map_err(Error::Config)?;
    cfg.motif_delta_days = args.motif_delta_days;
    cfg.anchoring = match args.anchoring {
        AnchoringArg::Participants => Anchoring::Participants,
        AnchoringArg::FirstSender => Anchoring::FirstSender,
    };
    cfg.taxonomy.correlation = match args.correlation {
        CorrelationArg::Pearson => Correlation::Pearson,
        CorrelationArg::Spearman => Correlation::Spearman,
    };
    cfg.taxonomy.degree_mode = match args.degree_mode {
        DegreeArg::DirectedPairs => DegreeMode::DirectedPairs,
        DegreeArg::DistinctNeighbours => DegreeMode::DistinctNeighbours,
    };
    cfg.taxonomy_include_ad = args.taxonomy_include_ad;
    cfg.roles_valid_from = args.roles_valid_from;
    cfg.list_truncation = Some(args.list_truncation);
    cfg.parse_mode = mode;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    let report = run_report(&bundle, &cfg)?;
    report.write_dir(&args.out)?;
    eprintln!("wrote {} files to {}", report.files.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn synth(config: Option<&Path>, out: &Path, seed: Option<u64>) -> Result<ExitCode, Error> {
    let mut cfg = match config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::FileIo {
                path: p.to_owned(),
                source: e,
            })?;
            toml::from_str::<SynthConfig>(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => SynthConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let (bundle, summary) = synth_generate(&cfg)?;
    bundle.write_dir(out)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Validate { inputs, metrics } => validate(inputs, metrics.as_deref()),
        Command::Report(args) => report(args),
        Command::Synth { config, out, seed } => synth(config.as_deref(), out, *seed),
    };
    res.unwrap_or_else(fail)
}
