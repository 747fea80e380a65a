//! The `graphstate` command line: graph files, the `analyze`, `exact`,
//! `simulate`, `dist` and `verify` commands, and their reports.

pub mod commands;
pub mod error;
pub mod graph_file;
pub mod report;

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphstate_core::rational;
use graphstate_core::{Budgets, EstimateConfig, SamplingMode};

pub use commands::{cmd_analyze, cmd_dist, cmd_exact, cmd_simulate, cmd_verify, DistFamily};
pub use error::{CliError, Result};
pub use graph_file::{parse_graph, parse_graph_str, resolve_graph, GraphDocument, GraphFile};
pub use report::{Report, SCHEMA};

pub const ENV_BUDGET_TUPLES: &str = "GRAPHSTATE_BUDGET_TUPLES";
pub const ENV_BUDGET_TERMS: &str = "GRAPHSTATE_BUDGET_TERMS";

#[derive(Debug, Parser)]
#[command(name = "graphstate", version, about = "Spectra of marginals of random graph states")]
pub struct Cli {
    /// Worker threads for the parallel engines (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format; `dist` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Haar,
    Ginibre,
}

impl From<Mode> for SamplingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Haar => SamplingMode::Haar,
            Mode::Ginibre => SamplingMode::Ginibre,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Fuss-Catalan law `π^(s)`, s ∈ {1, 2}.
    Fc,
    /// Free Poisson (Marchenko-Pastur) law with parameter c.
    Mp,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph file, or a built-in: one-loop, example, pi2, exotic, tsrr,
    /// fc:S, star:M,S,T, cycle:TYPES.
    pub graph: String,
    /// Traced subsystems, overriding the file's trace set.
    #[arg(long, value_delimiter = ',')]
    pub trace: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Haar)]
    pub mode: Mode,
    #[arg(long, default_value_t = 4)]
    pub pmax: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Max flow, leading-order moments and the limit law.
    Analyze {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 5)]
        pmax: usize,
        /// Also evaluate the purity and entropy predictions at this N.
        #[arg(long = "N")]
        n: Option<u64>,
    },
    /// Exact moments at finite N.
    Exact {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value_t = 3)]
        pmax: usize,
    },
    /// Monte Carlo moments, purity and entropy.
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Skip the eigensolver and the entropy estimate.
        #[arg(long)]
        no_entropy: bool,
    },
    /// Density of a limit law on a grid.
    Dist {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Free Poisson parameter, as an integer or a fraction n/d.
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// Analyze and simulate, flagging rescaled moments off by more than 4 stderr.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Further N values for the finite-N trend, comma separated.
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<u64>,
    },
}

/// Budgets from the environment, falling back to the defaults.
pub fn budgets_from(lookup: impl Fn(&str) -> Option<String>) -> Result<Budgets> {
    let mut b = Budgets::default();
    for (key, slot) in [(ENV_BUDGET_TUPLES, &mut b.tuples), (ENV_BUDGET_TERMS, &mut b.terms)] {
        if let Some(v) = lookup(key) {
            *slot = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{key}={v:?} is not a non-negative integer")))?;
        }
    }
    Ok(b)
}

fn estimate_config(s: &SampleArgs, entropy: bool) -> EstimateConfig {
    EstimateConfig {
        trials: s.trials,
        seed: s.seed,
        p_list: (1..=s.pmax).collect(),
        mode: s.mode.into(),
        entropy,
    }
}

/// Runs a parsed command and renders its report.
pub fn execute(cli: &Cli, budgets: &Budgets) -> Result<String> {
    let marginal = |g: &GraphArgs| resolve_graph(&g.graph)?.marginal(g.trace.as_deref());
    let (report, default_format) = match &cli.command {
        Command::Analyze { graph, pmax, n } => (cmd_analyze(&marginal(graph)?, *pmax, *n, budgets)?, Format::Json),
        Command::Exact { graph, n, pmax } => (cmd_exact(&marginal(graph)?, *n, *pmax, budgets)?, Format::Json),
        Command::Simulate {
            graph,
            sample,
            no_entropy,
        } => (
            cmd_simulate(&marginal(graph)?, sample.n, &estimate_config(sample, !no_entropy))?,
            Format::Json,
        ),
        Command::Dist { family, s, c, grid } => {
            let family = match family {
                Family::Fc => DistFamily::FussCatalan { s: *s },
                Family::Mp => DistFamily::FreePoisson {
                    c: rational::parse(c).ok_or_else(|| CliError::Usage(format!("--c {c:?} is not a rational")))?,
                },
            };
            (cmd_dist(&family, *grid)?, Format::Csv)
        }
        Command::Verify { graph, sample, ladder } => (
            cmd_verify(&marginal(graph)?, sample.n, &estimate_config(sample, false), ladder, budgets)?,
            Format::Json,
        ),
    };
    Ok(match cli.format.unwrap_or(default_format) {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    })
}

/// Parses `args`, runs the command on a pool capped by `--threads`, and
/// returns the exit code with what belongs on stdout and stderr.
pub fn run<I, T>(args: I, lookup: impl Fn(&str) -> Option<String>) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (1, String::new(), text) };
        }
    };
    let result = budgets_from(lookup).and_then(|budgets| {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.threads {
            if t == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            pool = pool.num_threads(t);
        }
        let pool = pool.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        pool.install(|| execute(&cli, &budgets))
    });
    match result {
        Ok(out) => (0, out, String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}
