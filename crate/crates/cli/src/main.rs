//! `freeze`: build and check freezing sets of digital images.
//!
//! Exit codes: 0 success (or frozen), 1 not frozen, 2 invalid input,
//! 3 search budget exhausted.

mod document;
mod error;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freeze_core::verify::DEFAULT_NODE_BUDGET;
use freeze_core::{
    c1_freezing_set, cn_freezing_set, greedy_minimize, mandatory_points, trivial_decomposition,
    validate_decomposition, verify_freezing_with, CubeDecomposition, DigitalImage, FreezeError,
    Point, PruneRule, PruneRules, VerifyConfig,
};

use document::{load_decomposition, load_image, load_set, Adjacency, LoadedImage};
use error::CliError;
use report::Report;

/// Environment variable overriding the default node budget.
const BUDGET_ENV: &str = "FREEZE_BUDGET";

#[derive(Parser)]
#[command(
    name = "freeze",
    version,
    about = "Construct and verify freezing sets of digital images"
)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Override the document's adjacency (c1, cN, c<k> or an integer).
    #[arg(long, global = true, value_name = "ADJ")]
    adjacency: Option<Adjacency>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize an image: size, connectivity, boundary and mandatory points.
    Info { image: PathBuf },
    /// Build a candidate freezing set.
    Construct {
        image: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Cube decomposition to build from (defaults to the image's own cubes).
        decomposition: Option<PathBuf>,
    },
    /// Decide whether a set freezes the image.
    Verify {
        image: PathBuf,
        set: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Shrink a freezing set to an inclusion-minimal one.
    Minimize {
        image: PathBuf,
        set: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Corners of each cube (for c1).
    Corners,
    /// Boundary of each cube (for cN).
    Boundary,
    /// Every point of the image.
    Trivial,
}

#[derive(Args)]
struct SearchArgs {
    /// Maximum search nodes before reporting inconclusive.
    #[arg(long)]
    budget: Option<u64>,
    /// Worker threads for the search.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Disable a pruning rule (repeatable).
    #[arg(long = "no-prune", value_name = "RULE")]
    no_prune: Vec<PruneRule>,
}

impl SearchArgs {
    fn config(&self) -> Result<VerifyConfig, CliError> {
        let budget = match self.budget {
            Some(b) => b,
            None => match std::env::var(BUDGET_ENV) {
                Ok(s) => s.trim().parse().map_err(|_| {
                    CliError::Invalid(format!("{BUDGET_ENV}: not a node count: `{s}`"))
                })?,
                Err(_) => DEFAULT_NODE_BUDGET,
            },
        };
        let rules = self
            .no_prune
            .iter()
            .fold(PruneRules::all(), |rules, &r| rules.without(r));
        Ok(VerifyConfig {
            budget,
            threads: self.threads.max(1),
            rules,
        })
    }
}

/// A finished command: its report and exit code.
struct Outcome {
    report: Report,
    code: u8,
}

fn ok(report: Report) -> Outcome {
    Outcome { report, code: 0 }
}

fn info(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let LoadedImage { image, .. } = load_image(path, cli.adjacency.as_ref())?;
    let boundary = image.boundary_indices().len();
    let mandatory = mandatory_points(&image).len();
    Ok(ok(report::info(&image, boundary, mandatory)))
}

fn construct(
    cli: &Cli,
    path: &Path,
    method: Method,
    decomposition: Option<&Path>,
) -> Result<Outcome, CliError> {
    let loaded = load_image(path, cli.adjacency.as_ref())?;
    let image = &loaded.image;
    let (n, u) = (image.dim(), image.u());
    let name = match method {
        Method::Corners => "corners",
        Method::Boundary => "boundary",
        Method::Trivial => "trivial",
    };
    match method {
        Method::Corners if u != 1 => {
            eprintln!("warning: corner sets are freezing sets under c1; image uses c{u}")
        }
        Method::Boundary if u != n => {
            eprintln!("warning: boundary sets are freezing sets under c{n}; image uses c{u}")
        }
        _ => {}
    }
    if let Method::Trivial = method {
        return Ok(ok(report::construct(name, "none", image.points())));
    }
    let (d, source): (Option<CubeDecomposition>, &str) = match (decomposition, loaded.cubes) {
        (Some(file), _) => {
            let d = load_decomposition(file, n)?;
            if !validate_decomposition(image, &d) {
                return Err(FreezeError::InvalidDecomposition(format!(
                    "{}: cubes do not cover the image exactly",
                    file.display()
                ))
                .into());
            }
            (Some(d), "file")
        }
        (None, Some(d)) => (Some(d), "image cubes"),
        (None, None) => (None, "none"),
    };
    let points = match (method, d) {
        (Method::Corners, Some(d)) => c1_freezing_set(&d)?,
        (Method::Corners, None) => {
            let d = trivial_decomposition(image);
            return Ok(ok(report::construct(
                name,
                "trivial",
                &c1_freezing_set(&d)?,
            )));
        }
        (Method::Boundary, Some(d)) => cn_freezing_set(&d)?,
        (Method::Boundary, None) => image.boundary(),
        (Method::Trivial, _) => unreachable!("handled above"),
    };
    Ok(ok(report::construct(name, source, &points)))
}

fn load_pair(
    cli: &Cli,
    image: &Path,
    set: &Path,
) -> Result<(Arc<DigitalImage>, Vec<Point>), CliError> {
    let LoadedImage { image, .. } = load_image(image, cli.adjacency.as_ref())?;
    let a = load_set(set, image.dim())?;
    Ok((Arc::new(image), a))
}

fn verify(cli: &Cli, image: &Path, set: &Path, search: &SearchArgs) -> Result<Outcome, CliError> {
    let config = search.config()?;
    let (x, a) = load_pair(cli, image, set)?;
    let out = verify_freezing_with(&x, &a, &config)?;
    Ok(match &out.witness {
        None => ok(report::frozen(&out.stats)),
        Some(w) => Outcome {
            report: report::not_frozen("verify", w, Some(&out.stats)),
            code: 1,
        },
    })
}

fn minimize(cli: &Cli, image: &Path, set: &Path, search: &SearchArgs) -> Result<Outcome, CliError> {
    let config = search.config()?;
    let (x, a) = load_pair(cli, image, set)?;
    let r = greedy_minimize(&x, &a, &config)?;
    Ok(ok(report::minimize(
        a.len(),
        &r.set,
        &r.removed,
        &r.certificates,
    )))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Info { image } => info(cli, image),
        Command::Construct {
            image,
            method,
            decomposition,
        } => construct(cli, image, *method, decomposition.as_deref()),
        Command::Verify { image, set, search } => verify(cli, image, set, search),
        Command::Minimize { image, set, search } => minimize(cli, image, set, search),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Command::Minimize { .. } => "minimize",
        _ => "verify",
    };
    let outcome = run(&cli).or_else(|e| match &e {
        CliError::Core(FreezeError::Inconclusive { nodes, budget }) => Ok(Outcome {
            report: report::inconclusive(command, *nodes, *budget),
            code: e.exit_code(),
        }),
        _ => match e.witness() {
            Some(w) => Ok(Outcome {
                report: report::not_frozen(command, w, None),
                code: e.exit_code(),
            }),
            None => Err(e),
        },
    });
    match outcome {
        Ok(Outcome { report, code }) => {
            print!("{}", report.render(cli.json));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
