use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skeinlab::twobox::Sign;
use skeinlab_cli::commands::{self, resolve_tolerance, CliError, Common, Selector, TOL_ENV};
use skeinlab_cli::Report;

const USAGE_EXIT: u8 = 64;

#[derive(Parser)]
#[command(
    name = "skeinlab",
    version,
    about = "Verification reports for planar algebras with a 14-dimensional 3-box space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Point {
    /// Loop value.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Even level of the Sp(4) series: delta = 2 cos(4 pi / l) + 2 cos(2 pi / l).
    #[arg(long)]
    l: Option<u32>,
    /// The depth-3 point.
    #[arg(long)]
    depth3: bool,
}

#[derive(Args)]
struct Shared {
    #[command(flatten)]
    point: Point,
    /// Chirality, +1 or -1; defaults from the case.
    #[arg(long, allow_negative_numbers = true, value_parser = parse_sigma)]
    sigma: Option<Sign>,
    /// Equality tolerance (overrides SKEINLAB_TOL).
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the classification pipeline at one loop value.
    Classify(Shared),
    /// Evaluate a closed diagram file.
    Evaluate {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Gram matrix of the 3-box basis.
    Gram {
        #[command(flatten)]
        shared: Shared,
        /// Write the matrix report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Braid relation residuals in the 3-box space.
    Ybe {
        #[command(flatten)]
        shared: Shared,
        /// Multiply q by this factor before building the braid.
        #[arg(long, default_value_t = 1.0)]
        perturb_q: f64,
    },
}

fn parse_sigma(s: &str) -> Result<Sign, String> {
    match s.trim_start_matches('+') {
        "1" => Ok(Sign::Plus),
        "-1" => Ok(Sign::Minus),
        _ => Err(format!("sigma must be +1 or -1, got {s}")),
    }
}

fn common(s: &Shared) -> Result<Common, CliError> {
    let env = std::env::var(TOL_ENV).ok();
    let tol = resolve_tolerance(s.tol, env.as_deref())?;
    let selector = match (s.point.delta, s.point.l, s.point.depth3) {
        (Some(d), _, _) => Selector::Delta(d),
        (_, Some(l), _) => Selector::L(l),
        _ => Selector::Depth3,
    };
    Ok(Common {
        selector,
        sigma: s.sigma,
        tol,
    })
}

fn write(path: &Path, report: &Report) -> Result<(), CliError> {
    std::fs::write(path, report.to_json_string()).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let (report, shared, extra) = match &cli.command {
        Command::Classify(s) => (commands::classify(&common(s)?)?, s, None),
        Command::Evaluate { shared, diagram } => (commands::evaluate(&common(shared)?, diagram)?, shared, None),
        Command::Gram { shared, out } => (commands::gram(&common(shared)?)?, shared, out.as_deref()),
        Command::Ybe { shared, perturb_q } => (commands::ybe(&common(shared)?, *perturb_q)?, shared, None),
    };
    for path in shared.json.as_deref().into_iter().chain(extra) {
        write(path, &report)?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_EXIT } else { 0 });
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::from(report.verdict().exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
