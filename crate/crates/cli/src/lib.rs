//! The `budgetpoll` command-line tool.
//!
//! Exit codes: 0 on success, 1 for usage and I/O errors, 2 when the input
//! data is incomplete or malformed, 3 when question generation is exhausted.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use budgetpoll_core::agents::{run_cohort, CohortOutput, CohortSpec};
use budgetpoll_core::analysis::{analyze_all, render_report, AnalysisOptions, ReportFormat};
use budgetpoll_core::domain::{rescale, validate_allocation, IdealBudget};
use budgetpoll_core::generators::{build_battery, BatteryConfig, GenError};
use budgetpoll_core::response::{read_ndjson, write_ndjson, ResponseHeader};
use budgetpoll_core::{Amount, BatteryKind, ModelKind, UtilityModel};
use budgetpoll_service::{PollService, ServiceConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "budgetpoll", version, about = "Preference elicitation for participatory budgeting polls")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the question battery for one ideal budget.
    Generate(GenerateArgs),
    /// Run a synthetic cohort and write its responses.
    Simulate(SimulateArgs),
    /// Compute consistency reports from a response file.
    Analyze(AnalyzeArgs),
    /// Start the HTTP poll service.
    Serve(ServeArgs),
    /// Download a poll's responses from a running service.
    Export(ExportArgs),
}

/// Battery selection shared by `generate` and `simulate`.
#[derive(Debug, Args)]
pub struct BatteryArgs {
    /// Battery kind, e.g. `peak_linear` or `biennial`.
    #[arg(long, required_unless_present = "config")]
    pub kind: Option<BatteryKind>,
    /// JSON battery configuration; overrides --kind.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Insert alertness checks. A --config file sets this itself.
    #[arg(long)]
    pub alertness: bool,
    /// Keep options in generator order.
    #[arg(long)]
    pub no_shuffle: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub battery: BatteryArgs,
    /// Ideal budget as comma-separated amounts, e.g. `30,20,50`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ideal: Vec<Amount>,
    /// Rescale the ideal to sum to 100 instead of rejecting it.
    #[arg(long)]
    pub rescale: bool,
    #[arg(long, default_value = "participant")]
    pub participant: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub battery: BatteryArgs,
    /// JSON cohort description; overrides --model, --n, --noise.
    #[arg(long)]
    pub cohort: Option<PathBuf>,
    /// Utility model of every agent: l1, l2 or leontief.
    #[arg(long, default_value = "l1")]
    pub model: ModelKind,
    /// Number of agents.
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    /// Probability of a uniformly random answer.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Response file, newline-delimited; `-` reads standard input.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// `md` or `csv`.
    #[arg(long, default_value = "md")]
    pub format: ReportFormat,
    /// Ignore answers where a synthetic agent broke an exact tie.
    #[arg(long)]
    pub skip_tie_broken: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Directory for event logs; in memory when absent.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, env = "BUDGETPOLL_ADMIN_TOKEN", hide_env_values = true)]
    pub admin_token: String,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Base URL of the service, e.g. `http://127.0.0.1:8080`.
    #[arg(long)]
    pub url: String,
    #[arg(long)]
    pub poll: String,
    #[arg(long, env = "BUDGETPOLL_ADMIN_TOKEN", hide_env_values = true)]
    pub admin_token: String,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("incomplete data: {0}")]
    Incomplete(String),
    #[error("{0}")]
    Exhausted(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Incomplete(_) => 2,
            CliError::Exhausted(_) => 3,
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        if e.is_exhaustion() {
            CliError::Exhausted(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command, &mut io::stderr()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command. Notes such as a sampled seed go to `log`.
pub fn run(command: Command, log: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Generate(a) => generate(a, log),
        Command::Simulate(a) => simulate(a, log),
        Command::Analyze(a) => analyze(a),
        Command::Serve(a) => serve(a),
        Command::Export(a) => export(a),
    }
}

fn seed_or_sample(seed: Option<u64>, log: &mut dyn Write) -> io::Result<u64> {
    match seed {
        Some(s) => Ok(s),
        None => {
            let s = rand::random::<u64>();
            writeln!(log, "seed: {s}")?;
            Ok(s)
        }
    }
}

impl BatteryArgs {
    pub fn resolve(&self) -> Result<BatteryConfig, CliError> {
        let mut config = match (&self.config, self.kind) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?
            }
            (None, Some(kind)) => BatteryConfig {
                alertness: false,
                ..BatteryConfig::default_for(kind)
            },
            (None, None) => return Err(usage("either --kind or --config is required")),
        };
        if self.alertness {
            config.alertness = true;
        }
        if self.no_shuffle {
            config.shuffle = false;
        }
        config.generator.validate().map_err(usage)?;
        Ok(config)
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn generate(a: GenerateArgs, log: &mut dyn Write) -> Result<(), CliError> {
    let config = a.battery.resolve()?;
    let allocation = if a.rescale {
        rescale(&a.ideal)
    } else {
        validate_allocation(&a.ideal, false)
    }
    .map_err(usage)?;
    let ideal = IdealBudget::new(a.participant, allocation).map_err(usage)?;
    let seed = seed_or_sample(a.seed, log)?;
    let battery = build_battery(&ideal, &config, seed)?;
    let mut out = output(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &battery).map_err(io::Error::other)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

impl SimulateArgs {
    pub fn cohort(&self, config: &BatteryConfig) -> Result<CohortSpec, CliError> {
        let mut spec = match &self.cohort {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?
            }
            None => {
                let model = match self.model {
                    ModelKind::L1 => UtilityModel::L1,
                    ModelKind::L2 => UtilityModel::L2,
                    ModelKind::Leontief => UtilityModel::Leontief,
                    other => {
                        return Err(usage(format!(
                            "model `{other}` needs parameters; describe the cohort with --cohort"
                        )))
                    }
                };
                CohortSpec {
                    n: self.n,
                    model,
                    noise_rate: self.noise,
                    biennial_year_weights: [1.0, 1.0],
                    all_positive: false,
                }
            }
        };
        // sample only ideals the battery and model can use
        spec.all_positive |= config.generator.requires_all_positive() || spec.model == UtilityModel::Leontief;
        Ok(spec)
    }
}

/// Runs the cohort a `simulate` invocation describes.
pub fn simulate_output(config: &BatteryConfig, spec: &CohortSpec, seed: u64) -> CohortOutput {
    run_cohort(&spec.agents(seed), config, seed)
}

fn simulate(a: SimulateArgs, log: &mut dyn Write) -> Result<(), CliError> {
    let config = a.battery.resolve()?;
    let spec = a.cohort(&config)?;
    if spec.n == 0 {
        return Err(usage("the cohort needs at least one agent"));
    }
    let seed = seed_or_sample(a.seed, log)?;
    let result = simulate_output(&config, &spec, seed);
    let header = ResponseHeader {
        source: "simulate".into(),
        battery_kind: Some(config.battery_kind()),
        seed: Some(seed),
        ..Default::default()
    };
    let mut out = output(a.out.as_deref())?;
    write_ndjson(&mut out, Some(&header), &result.records).map_err(|e| io::Error::other(e.to_string()))?;
    out.flush()?;
    for f in &result.failures {
        writeln!(log, "warning: {f}")?;
    }
    if let Some(f) = result.failures.iter().find(|f| f.exhausted) {
        return Err(CliError::Exhausted(format!(
            "{} of {} agents had no battery; first: {f}",
            result.failures.len(),
            spec.n
        )));
    }
    Ok(())
}

fn input(path: &Path) -> io::Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(Box::new(io::Cursor::new(buf)))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

/// Reads a response stream and renders its report.
pub fn analyze_text(reader: impl BufRead, options: &AnalysisOptions, format: ReportFormat) -> Result<String, CliError> {
    let (header, records) = read_ndjson(reader).map_err(|e| CliError::Incomplete(e.to_string()))?;
    let report = analyze_all(&records, header.as_ref(), options).map_err(|e| CliError::Incomplete(e.to_string()))?;
    Ok(render_report(&report, format))
}

fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let options = AnalysisOptions {
        skip_tie_broken: a.skip_tie_broken,
    };
    let text = analyze_text(input(&a.input)?, &options, a.format)?;
    let mut out = output(a.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn serve(a: ServeArgs) -> Result<(), CliError> {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .try_init();
    if a.admin_token.trim().is_empty() {
        return Err(usage("the admin token must not be empty"));
    }
    let service = PollService::open(ServiceConfig {
        admin_token: a.admin_token,
        data_dir: a.data_dir,
    })
    .map_err(|e| io::Error::other(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(budgetpoll_service::serve(a.addr, Arc::new(service)))?;
    Ok(())
}

fn export(a: ExportArgs) -> Result<(), CliError> {
    let url = format!("{}/polls/{}/export", a.url.trim_end_matches('/'), a.poll);
    let mut resp = ureq::get(&url)
        .header("Authorization", &format!("Bearer {}", a.admin_token))
        .config()
        .http_status_as_error(false)
        .build()
        .call()
        .map_err(|e| usage(format!("{url}: {e}")))?;
    let status = resp.status();
    let body = resp
        .body_mut()
        .read_to_string()
        .map_err(|e| usage(format!("{url}: {e}")))?;
    if !status.is_success() {
        return Err(usage(format!("{url}: {status}: {}", body.trim())));
    }
    let mut out = output(a.out.as_deref())?;
    out.write_all(body.as_bytes())?;
    out.flush()?;
    Ok(())
}
