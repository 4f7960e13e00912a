//! Command-line front end.
//!
//! Exit codes: 0 success, 2 a consistency check failed, 3 bad
//! configuration or arguments, 4 evaluation or rendering error.

pub mod config;
pub mod render;
pub mod report;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bayes::BayesError;
use crate::consistency::CheckOptions;
use crate::decisions::{cutoffs_from_loss, CutoffPair, LossSpec};
use crate::fbst::{hybrid_relations, surprise, GfbstConfig, Reference};
use crate::modality::{modalities_of, ModalAssignment, ModalVerdict, Modality};
use config::{ConfigError, OutputFormat, ResolvedTest, RunConfig, TestOverrides};
use render::{GlyphStyle, HexagonState, NestedState, RenderError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_EVALUATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Bayes(BayesError::ZeroNormalizer(_))) => EXIT_EVALUATION,
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Evaluation(_) | CliError::Render(_) | CliError::Io(_) => EXIT_EVALUATION,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "credal",
    about = "Agnostic hypothesis tests and their logical consistency",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a test on the configured hypotheses.
    Run(RunArgs),
    /// Check the configured test for logical consistency.
    Check(RunArgs),
    /// Generate a witness for a known failure.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Draw a hexagon of oppositions.
    Hexagon(HexagonArgs),
    /// Print the version.
    Version,
}

#[derive(Debug, Subcommand)]
enum Demo {
    /// Cutoff test that rejects every part of a partition but not their union.
    ConsonanceFailure(DemoArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReferenceArg {
    Uniform,
    FromGrid,
}

impl From<ReferenceArg> for Reference {
    fn from(r: ReferenceArg) -> Self {
        match r {
            ReferenceArg::Uniform => Reference::Uniform,
            ReferenceArg::FromGrid => Reference::FromGrid,
        }
    }
}

#[derive(Debug, Args)]
struct LossArgs {
    #[arg(long, requires = "loss_b", conflicts_with_all = ["c1", "c2"])]
    loss_a: Option<f64>,
    #[arg(long, requires = "loss_a")]
    loss_b: Option<f64>,
    #[arg(long, requires = "c2")]
    c1: Option<f64>,
    #[arg(long, requires = "c1")]
    c2: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file; standard input when absent or "-".
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    output: Option<OutputFormat>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    loss: LossArgs,
    /// GFBST/FBST cutoff; a comma-separated list runs a sweep.
    #[arg(long, value_delimiter = ',')]
    cutoff_c: Vec<f64>,
    #[arg(long)]
    tie_tolerance: Option<f64>,
    #[arg(long, value_enum)]
    reference: Option<ReferenceArg>,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[command(flatten)]
    loss: LossArgs,
    /// Number of grid points in the witness.
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, value_enum)]
    output: Option<OutputFormat>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct HexagonArgs {
    /// State as a verdict (accept, agnostic, reject) or modality letters such as AIU.
    #[arg(long, conflicts_with = "config")]
    state: Option<String>,
    /// Probabilistic state drawn inside `--state`.
    #[arg(long, requires = "state")]
    inner: Option<String>,
    #[arg(long, value_enum, default_value_t = GlyphStyle::Alethic)]
    style: GlyphStyle,
    #[arg(long, default_value = "H")]
    label: String,
    /// Config with a gfbst test; draws the nested hexagon for `--hypothesis`.
    #[arg(long, requires = "hypothesis")]
    config: Option<PathBuf>,
    /// Comma-separated point ids.
    #[arg(long, value_delimiter = ',')]
    hypothesis: Vec<String>,
    #[arg(long, value_enum)]
    output: Option<OutputFormat>,
}

impl LossArgs {
    fn loss(&self) -> Option<(f64, f64)> {
        self.loss_a.zip(self.loss_b)
    }

    fn cuts(&self) -> Option<(f64, f64)> {
        self.c1.zip(self.c2)
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

/// Runs the command line and returns the process exit code.
pub fn main_with<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let mut io = Io { stdin, stdout };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<i32, CliError> {
    match command {
        Command::Run(args) => run(args, io),
        Command::Check(args) => check(args, io),
        Command::Demo { demo: Demo::ConsonanceFailure(args) } => demo(args, io),
        Command::Hexagon(args) => hexagon(args, io),
        Command::Version => {
            writeln!(io.stdout, "credal {}", env!("CARGO_PKG_VERSION"))?;
            Ok(EXIT_OK)
        }
    }
}

fn read_config(path: Option<&PathBuf>, io: &mut Io<'_>) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    let (text, base) = match path {
        Some(p) if p.as_os_str() != "-" => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
            (text, p.parent().map(|d| d.to_path_buf()))
        }
        _ => {
            let mut text = String::new();
            io.stdin.read_to_string(&mut text).map_err(|source| ConfigError::Io { path: "<stdin>".into(), source })?;
            (text, None)
        }
    };
    Ok((RunConfig::from_json(&text)?, base))
}

fn load(args: &RunArgs, io: &mut Io<'_>) -> Result<(config::Resolved, OutputFormat), CliError> {
    let (mut config, base) = read_config(args.config.as_ref(), io)?;
    config.apply(&TestOverrides {
        loss: args.loss.loss(),
        cuts: args.loss.cuts(),
        cutoff_c: args.cutoff_c.clone(),
        tie_tolerance: args.tie_tolerance,
        reference: args.reference.map(Into::into),
    })?;
    let format = args.output.or(config.output).unwrap_or_default();
    let resolved = config::resolve(&config, base.as_deref(), args.seed)?;
    Ok((resolved, format))
}

fn options(seed: u64) -> CheckOptions {
    CheckOptions { seed, ..CheckOptions::default() }
}

fn run(args: RunArgs, io: &mut Io<'_>) -> Result<i32, CliError> {
    let (resolved, format) = load(&args, io)?;
    let report = report::run_report(&resolved)?;
    let text = match format {
        OutputFormat::Text => report::run_text(&report),
        OutputFormat::Json => report::to_json_text(&report),
        OutputFormat::Svg => report::run_svg(&report),
    };
    io.stdout.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn check(args: RunArgs, io: &mut Io<'_>) -> Result<i32, CliError> {
    let (resolved, format) = load(&args, io)?;
    let outcomes = report::check_tests(report::build_tests(&resolved)?, &options(resolved.seed))?;
    let text = match format {
        OutputFormat::Json => report::check_json(&outcomes),
        OutputFormat::Text => report::check_text(&outcomes),
        OutputFormat::Svg => return Err(CliError::Usage("check has no svg output".into())),
    };
    io.stdout.write_all(text.as_bytes())?;
    Ok(if outcomes.iter().all(|o| o.report.overall) { EXIT_OK } else { EXIT_INCONSISTENT })
}

fn demo(args: DemoArgs, io: &mut Io<'_>) -> Result<i32, CliError> {
    let cuts = match (args.loss.loss(), args.loss.c1, args.loss.c2) {
        (Some((a, b)), _, _) => cutoffs_from_loss(&LossSpec::new(a, b).map_err(ConfigError::from)?),
        (None, Some(c1), Some(c2)) => CutoffPair::new(c1, c2).map_err(ConfigError::from)?,
        _ => return Err(CliError::Usage("give --loss-a/--loss-b or --c1/--c2".into())),
    };
    let outcome = report::demo(cuts, args.n, &options(args.seed.unwrap_or(0)))?;
    let text = match args.output.unwrap_or_default() {
        OutputFormat::Json => report::demo_json(&outcome),
        OutputFormat::Text => report::demo_text(&outcome),
        OutputFormat::Svg => return Err(CliError::Usage("demo has no svg output".into())),
    };
    io.stdout.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

/// A verdict name, or a string of modality letters.
fn parse_state(s: &str) -> Result<ModalAssignment, CliError> {
    if let Ok(v) = s.parse::<ModalVerdict>() {
        return Ok(modalities_of(v));
    }
    s.chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| c.to_string().parse::<Modality>())
        .collect::<Result<ModalAssignment, _>>()
        .map_err(|e| CliError::Usage(format!("bad hexagon state {s:?}: {e}")))
}

fn hexagon(args: HexagonArgs, io: &mut Io<'_>) -> Result<i32, CliError> {
    let format = args.output.unwrap_or_default();
    let nested = if let Some(path) = &args.config {
        Some(nested_from_config(path, &args.hypothesis, io)?)
    } else if let Some(inner) = &args.inner {
        let outer = parse_state(args.state.as_deref().unwrap_or_default())?;
        Some(NestedState::new(args.label.clone(), outer, parse_state(inner)?)?)
    } else {
        None
    };
    let text = match nested {
        Some(state) => match format {
            OutputFormat::Text => render::render_nested_ascii(&state),
            OutputFormat::Svg => render::render_nested_svg(&state),
            OutputFormat::Json => report::to_json_text(&state),
        },
        None => {
            let spec = args.state.as_deref().ok_or_else(|| CliError::Usage("give --state or --config".into()))?;
            let state = HexagonState::new(args.label.clone(), parse_state(spec)?, args.style)?;
            match format {
                OutputFormat::Text => render::render_ascii(&state),
                OutputFormat::Svg => render::render_svg(&state),
                OutputFormat::Json => report::to_json_text(&state),
            }
        }
    };
    io.stdout.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn nested_from_config(path: &PathBuf, ids: &[String], io: &mut Io<'_>) -> Result<NestedState, CliError> {
    let (config, base) = read_config(Some(path), io)?;
    let resolved = config::resolve(&config, base.as_deref(), None)?;
    let ResolvedTest::Evidence { generalized: true, configs, tie_tolerance, reference } = &resolved.test else {
        return Err(CliError::Usage("nested hexagons need a gfbst test".into()));
    };
    let [gfbst_config]: [GfbstConfig; 1] =
        configs.clone().try_into().map_err(|_| CliError::Usage("nested hexagons need a single cutoff".into()))?;
    let posterior = resolved.require_posterior()?;
    let h = resolved.grid().hypothesis(ids).map_err(ConfigError::from)?;
    let profile = surprise(posterior, *reference)
        .with_tie_tolerance(*tie_tolerance)
        .map_err(|e| CliError::Evaluation(e.to_string()))?;
    let record =
        hybrid_relations(posterior, &profile, &gfbst_config, &h).map_err(|e| CliError::Evaluation(e.to_string()))?;
    let outer = verdict_of(record.necessity, record.possibility);
    let inner = verdict_of(record.probable_necessity, record.probable_possibility);
    let label = format!("H = {} (c = {})", resolved.grid().describe(&h), gfbst_config.cutoff());
    Ok(NestedState::new(label, modalities_of(outer), modalities_of(inner))?)
}

fn verdict_of(necessary: bool, possible: bool) -> ModalVerdict {
    match (necessary, possible) {
        (true, _) => ModalVerdict::Accept,
        (false, true) => ModalVerdict::Agnostic,
        (false, false) => ModalVerdict::Reject,
    }
}
