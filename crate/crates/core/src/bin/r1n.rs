use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rank1_neumann::run::{self, Artifacts, Command, RunConfig, VerificationReport};

/// Neumann eigenvalue computations and isoperimetric checks on rank-1 symmetric spaces.
#[derive(Parser)]
#[command(name = "r1n", version, about)]
struct Cli {
    /// Rerun the configuration embedded in a report and compare margins.
    #[arg(long, value_name = "REPORT")]
    replay: Option<PathBuf>,
    /// Read the run configuration from a `key = value` file.
    #[arg(long, value_name = "FILE", conflicts_with = "replay")]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (ball, check-lemmas) or directory (verify); stdout if absent.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// First nonzero Neumann eigenvalue of a geodesic ball.
    Ball {
        #[arg(long)]
        space: String,
        #[arg(long)]
        radius: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Pointwise identities, gradient bounds and ball lemmas.
    CheckLemmas {
        /// Space strings; repeat or comma-separate. Default: the standard set.
        #[arg(long = "space", value_delimiter = ',')]
        spaces: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, default_value_t = 20)]
        radii: usize,
        #[arg(long, hide = true)]
        corrupt_count: bool,
    },
    /// Main inequality and proof-chain checks on one domain.
    Verify {
        #[arg(long)]
        space: String,
        /// ball:R | disk:x,y,R | ellipse:a,b[,rot[,cx,cy]] | peanut:c,eps[,rot] | polyline:FILE | annulus:r_in,r_out
        #[arg(long)]
        domain: String,
        /// Target mesh size in the model metric.
        #[arg(long, default_value_t = 0.03)]
        h: f64,
        /// FEM eigenpairs to compute, constant mode included.
        #[arg(long, default_value_t = 4)]
        eigs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Shooting tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Profile grid size.
    #[arg(long, default_value_t = 2000)]
    grid: usize,
}

fn config_from(cmd: Cmd) -> RunConfig {
    match cmd {
        Cmd::Ball { space, radius, solver } => RunConfig {
            spaces: vec![space],
            radius: Some(radius),
            tol: solver.tol,
            grid_size: solver.grid,
            ..RunConfig::new(Command::Ball)
        },
        Cmd::CheckLemmas { spaces, points, radii, corrupt_count } => RunConfig {
            spaces,
            lemma_points: points,
            lemma_radii: radii,
            corrupt_count,
            ..RunConfig::new(Command::CheckLemmas)
        },
        Cmd::Verify { space, domain, h, eigs, seed, jitter, solver } => RunConfig {
            spaces: vec![space],
            domain: Some(domain),
            target_h: h,
            eigen_count: eigs,
            seed,
            jitter,
            tol: solver.tol,
            grid_size: solver.grid,
            ..RunConfig::new(Command::Verify)
        },
    }
}

fn emit(text: &str, out: Option<&Path>) -> rank1_neumann::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn report_exit(report: &VerificationReport) -> ExitCode {
    let s = &report.summary;
    eprintln!("{} passed, {} failed, {} inconclusive", s.passed, s.failed, s.inconclusive);
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("  {:?} {}: margin {:.3e} (tol {:.1e})", c.status, c.id, c.margin, c.tol);
    }
    if s.failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn execute(config: &RunConfig, out: Option<&Path>) -> rank1_neumann::Result<ExitCode> {
    match config.command {
        Command::Ball => {
            let ball = run::run_ball(config)?;
            match out {
                Some(dir) => Artifacts { ball: Some(ball), ..Default::default() }.write(dir, &config.hash())?,
                None => {
                    let mut v = serde_json::to_value(&ball)?;
                    v["config_hash"] = config.hash().into();
                    println!("{}", serde_json::to_string_pretty(&v)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckLemmas => {
            let report = run::run_check_lemmas(config)?;
            emit(&(report.to_json()? + "\n"), out)?;
            Ok(report_exit(&report))
        }
        Command::Verify => {
            let (report, artifacts) = run::run_verify(config)?;
            match out {
                Some(dir) => {
                    artifacts.write(dir, &report.config_hash)?;
                    report.write(&dir.join("report.json"))?;
                }
                None => println!("{}", report.to_json()?),
            }
            Ok(report_exit(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = if let Some(path) = &cli.replay {
        VerificationReport::read(path).and_then(|old| {
            let (fresh, diff) = run::replay(&old)?;
            eprintln!("replayed {} checks; max margin difference {diff:.3e}", fresh.checks.len());
            if let Some(out) = &cli.out {
                fresh.write(out)?;
            }
            Ok(if diff > 1e-12 { ExitCode::from(1) } else { report_exit(&fresh) })
        })
    } else {
        let config = match (&cli.config, cli.command) {
            (Some(path), None) => {
                std::fs::read_to_string(path).map_err(Into::into).and_then(|t| RunConfig::from_key_values(&t))
            }
            (None, Some(cmd)) => Ok(config_from(cmd)),
            _ => {
                eprintln!("error: give exactly one of a subcommand, --config or --replay");
                return ExitCode::from(2);
            }
        };
        config.and_then(|c| execute(&c, cli.out.as_deref()))
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
