//! `millopt`: profit-rate optimization of multi-pass milling plans.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use millopt::case_study::{load_plan, reference_rows, LoadedPlan, BUNDLED_CASE};
use millopt::es::{run_with, EsConfig};
use millopt::oracle::{dinkelbach_solve, GridSpec, OracleOutcome};
use millopt::report::{CompareReport, EvaluationReport, OutputFormat, SolutionReport};
use millopt::{DecisionVector, Error, Evaluator};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "millopt",
    version,
    about = "Cutting-condition optimization for multi-pass milling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize profit rate with the evolution strategy.
    Optimize(CommonArgs),
    /// Solve the grid-restricted problem exactly.
    Oracle(CommonArgs),
    /// Objective and constraint margins at a given point.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Cutting speeds in m/min, one per operation.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        speeds: Vec<f64>,
        /// Feeds in mm/tooth, one per operation.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        feeds: Vec<f64>,
    },
    /// Published comparison table plus fresh strategy and oracle rows.
    Compare(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Plan document (TOML).
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "builtin_case",
        required_unless_present = "builtin_case"
    )]
    config: Option<PathBuf>,
    /// Use the bundled five-operation case study.
    #[arg(long)]
    builtin_case: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Parent population size.
    #[arg(long)]
    mu: Option<usize>,
    /// Offspring per generation.
    #[arg(long)]
    lambda: Option<usize>,
    /// Generations without improvement before stopping.
    #[arg(long)]
    stall: Option<usize>,
    /// Weight of the first parent in strength recombination.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    sigma_init: Option<f64>,
    /// Largest mutation strength as a multiple of the box width; `inf` disables it.
    #[arg(long)]
    sigma_ceiling: Option<f64>,
    /// Points per axis of the oracle grid (at least 2).
    #[arg(long)]
    grid_resolution: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    out: Format,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Log one line per generation to standard error.
    #[arg(long)]
    verbose: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Text => OutputFormat::Text,
        }
    }
}

enum Failure {
    Usage(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } | Error::Serialize(_) => Failure::Other(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

struct Outcome {
    text: String,
    feasible: bool,
}

impl CommonArgs {
    fn load(&self) -> Result<LoadedPlan, Failure> {
        let text = match &self.config {
            Some(path) => fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
            None => BUNDLED_CASE.to_string(),
        };
        Ok(load_plan(&text)?)
    }

    fn es_config(&self, loaded: &LoadedPlan) -> Result<EsConfig, Failure> {
        let mut c = EsConfig::default();
        c.apply(&loaded.es);
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.mu {
            c.mu = v;
        }
        if let Some(v) = self.lambda {
            c.eta = v;
        }
        if let Some(v) = self.stall {
            c.stall_limit = v;
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = self.sigma_init {
            c.sigma_init = v;
        }
        if let Some(v) = self.sigma_ceiling {
            c.sigma_ceiling = v;
        }
        c.validate()?;
        Ok(c)
    }

    fn grid(&self, loaded: &LoadedPlan) -> Result<GridSpec, Failure> {
        let mut g = GridSpec::default();
        g.apply(&loaded.oracle);
        if let Some(r) = self.grid_resolution {
            g.resolution = r;
        }
        g.validate()?;
        Ok(g)
    }

    fn run_es(
        &self,
        loaded: &LoadedPlan,
        log: &mut dyn Write,
    ) -> Result<millopt::es::RunResult, Failure> {
        let config = self.es_config(loaded)?;
        let verbose = self.verbose;
        let result = run_with(&loaded.plan, &config, |st| {
            if verbose {
                let best = st.best.as_ref().map_or(0.0, |b| b.fitness);
                let _ = writeln!(
                    log,
                    "generation {} evaluations {} best {:.6} stall {}",
                    st.generation, st.evaluations, best, st.stall_counter
                );
            }
        })?;
        Ok(result)
    }

    fn run_oracle(
        &self,
        loaded: &LoadedPlan,
        log: &mut dyn Write,
    ) -> Result<(OracleOutcome, usize), Failure> {
        let grid = self.grid(loaded)?;
        let outcome = dinkelbach_solve(&loaded.plan, &grid)?;
        if self.verbose {
            if let Some(s) = outcome.solution() {
                let _ = writeln!(log, "dinkelbach trace: {:?}", s.lambda_trace);
            }
        }
        Ok((outcome, grid.resolution))
    }
}

fn with_document_warnings(mut warnings: Vec<String>, loaded: &LoadedPlan) -> Vec<String> {
    for w in &loaded.warnings {
        if !warnings.contains(w) {
            warnings.push(w.clone());
        }
    }
    warnings
}

fn execute<'a>(
    command: &'a Command,
    log: &mut dyn Write,
) -> Result<(Outcome, &'a CommonArgs), Failure> {
    match command {
        Command::Optimize(args) => {
            let loaded = args.load()?;
            let evaluator = Evaluator::new(&loaded.plan)?;
            let result = args.run_es(&loaded, log)?;
            let mut report = SolutionReport::from_run(&evaluator, &result);
            report.warnings = with_document_warnings(report.warnings, &loaded);
            let text = report.render(args.out.into())?;
            Ok((
                Outcome {
                    text,
                    feasible: report.feasible,
                },
                args,
            ))
        }
        Command::Oracle(args) => {
            let loaded = args.load()?;
            let evaluator = Evaluator::new(&loaded.plan)?;
            let (outcome, resolution) = args.run_oracle(&loaded, log)?;
            let report = SolutionReport::from_oracle(
                &evaluator,
                &outcome,
                resolution,
                loaded.warnings.clone(),
            );
            let text = report.render(args.out.into())?;
            Ok((
                Outcome {
                    text,
                    feasible: report.feasible,
                },
                args,
            ))
        }
        Command::Evaluate {
            common,
            speeds,
            feeds,
        } => {
            let loaded = common.load()?;
            let evaluator = Evaluator::new(&loaded.plan)?;
            let m = loaded.plan.len();
            if speeds.len() != m || feeds.len() != m {
                return Err(Failure::Usage(format!(
                    "expected {m} speeds and {m} feeds, got {} and {}",
                    speeds.len(),
                    feeds.len()
                )));
            }
            let x = DecisionVector::new(speeds.clone(), feeds.clone())?;
            let report = EvaluationReport::build(&evaluator, &x, loaded.warnings.clone())?;
            let text = report.render(common.out.into())?;
            Ok((
                Outcome {
                    text,
                    feasible: true,
                },
                common,
            ))
        }
        Command::Compare(args) => {
            let loaded = args.load()?;
            let result = args.run_es(&loaded, log)?;
            let (outcome, resolution) = args.run_oracle(&loaded, log)?;
            let references = reference_rows();
            let mut report = CompareReport::build(&references, &result, &outcome, resolution);
            report.warnings = with_document_warnings(report.warnings, &loaded);
            let text = report.render(args.out.into())?;
            Ok((
                Outcome {
                    text,
                    feasible: result.feasible(),
                },
                args,
            ))
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(rendered.as_bytes());
                0
            };
        }
    };
    let (outcome, args) = match execute(&cli.command, err) {
        Ok(v) => v,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Other(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_FAILURE;
        }
    };

    let written = match &args.output {
        Some(path) => fs::write(path, &outcome.text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out
            .write_all(outcome.text.as_bytes())
            .and_then(|()| out.flush())
            .map_err(|e| format!("cannot write report: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_FAILURE;
    }

    if outcome.feasible {
        0
    } else {
        let _ = writeln!(err, "error: no feasible solution found");
        EXIT_INFEASIBLE
    }
}

fn main() -> ExitCode {
    let code = run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}
