use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mfourier::output::Destinations;
use mfourier::scenario::{self, RawSettings};
use mfourier::{execute, CliError, FieldDef, Problem, Task};

/// Weighted orthogonal expansions, Parseval checks and integral inequalities
/// over bounded regions.
#[derive(Debug, Parser)]
#[command(name = "mfourier", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// refine or stochastic
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    max_depth: Option<u32>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fail when an integral misses its error target.
    #[arg(long, global = true)]
    strict: bool,
    /// JSON report path; the summary goes next to it as .txt
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CSV table path
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

impl Global {
    fn settings(&self) -> RawSettings {
        RawSettings {
            method: self.method.clone(),
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_depth: self.max_depth,
            samples: self.samples,
            seed: self.seed,
            strict: self.strict.then_some(true),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate --field over the region.
    Integrate(ProblemArgs),
    /// Build an orthogonal family from --phi seeds.
    Orthogonalize(ProblemArgs),
    /// Coefficients, deviations and Bessel gaps of --field in the --phi family.
    Expand(ProblemArgs),
    /// Parseval residual of --field in the --phi family.
    Parseval(ProblemArgs),
    /// Integrate a sign-changing --field through per-cell Parseval sums.
    PartitionParseval(ProblemArgs),
    /// Cauchy-Schwarz gap of --g and --h.
    CauchySchwarz(ProblemArgs),
    /// Product criterion grid for --field and --g.
    ProductCriterion(ProblemArgs),
    /// Corollary bound and sub-conditions for --field and --g.
    Corollary(ProblemArgs),
    /// Run a scenario file.
    Run { scenario: PathBuf },
}

#[derive(Debug, Args)]
struct ProblemArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// e.g. "box([0, 1], [0, 1])", "ball([0, 0], 1)", "diff(A, B)"
    #[arg(long)]
    region: Option<String>,
    /// Keep only points of the region satisfying this predicate.
    #[arg(long)]
    region_pred: Option<String>,
    /// The field f.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    field_floor: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    field_bounds: Option<Vec<f64>>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    g_floor: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    g_bounds: Option<Vec<f64>>,
    #[arg(long)]
    h: Option<String>,
    /// Seed of the phi family; repeat for more.
    #[arg(long)]
    phi: Vec<String>,
    /// Seed of the psi family; defaults to the phi seeds.
    #[arg(long)]
    psi: Vec<String>,
    #[arg(short = 'N', long)]
    truncation: Option<usize>,
    /// unit, 1/<field> or the name of a positive field
    #[arg(long)]
    weight: Option<String>,
    /// Evaluate the proof-chain quantities of the product criterion.
    #[arg(long)]
    diagnostics: bool,
    /// Zero threshold for sign partitioning.
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    partition_depth: Option<u32>,
}

fn field_def(expr: &Option<String>, floor: Option<f64>, bounds: &Option<Vec<f64>>) -> Option<FieldDef> {
    expr.as_ref().map(|e| FieldDef {
        floor,
        bounds: bounds.as_ref().map(|b| (b[0], b[1])),
        ..FieldDef::new(e.clone())
    })
}

impl ProblemArgs {
    fn into_problem(self, task: Task) -> Problem {
        let mut p = Problem::new(task, self.dim);
        let defs = [
            ("f", field_def(&self.field, self.field_floor, &self.field_bounds)),
            ("g", field_def(&self.g, self.g_floor, &self.g_bounds)),
            ("h", field_def(&self.h, None, &None)),
        ];
        for (name, def) in defs {
            if let Some(def) = def {
                p.fields.insert(name.to_string(), def);
            }
        }
        p.region = self.region;
        p.region_pred = self.region_pred;
        p.phi = self.phi;
        p.psi = self.psi;
        p.truncation = self.truncation;
        p.weight = self.weight;
        p.diagnostics = self.diagnostics;
        p.zeta = self.zeta;
        p.partition_depth = self.partition_depth;
        p
    }
}

fn prepare(cli: Cli) -> Result<(Problem, Destinations), CliError> {
    let flags = cli.global.settings();
    let mut dest = Destinations {
        report: cli.global.out.clone(),
        summary: None,
        csv: cli.global.csv.clone(),
    };
    let (task, args) = match cli.command {
        Command::Run { scenario } => {
            let sc = scenario::load(&scenario)?;
            let mut problem = sc.problem;
            sc.settings.overlay(&flags).apply(&mut problem.settings)?;
            if dest.report.is_none() {
                dest.report = sc.output.report;
                dest.summary = sc.output.summary;
            }
            if dest.csv.is_none() {
                dest.csv = sc.output.csv;
            }
            return Ok((problem, dest));
        }
        Command::Integrate(a) => (Task::Integrate, a),
        Command::Orthogonalize(a) => (Task::Orthogonalize, a),
        Command::Expand(a) => (Task::Expand, a),
        Command::Parseval(a) => (Task::Parseval, a),
        Command::PartitionParseval(a) => (Task::PartitionParseval, a),
        Command::CauchySchwarz(a) => (Task::CauchySchwarz, a),
        Command::ProductCriterion(a) => (Task::ProductCriterion, a),
        Command::Corollary(a) => (Task::Corollary, a),
    };
    let mut problem = args.into_problem(task);
    flags.apply(&mut problem.settings)?;
    Ok((problem, dest))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = prepare(cli).and_then(|(problem, dest)| {
        let outcome = execute(&problem)?;
        dest.write(&outcome)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if outcome.violated() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
