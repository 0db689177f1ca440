use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use randfix_cli::solve::{run_solve, write_json, SolveFlags, Status};
use randfix_cli::sperner::{run_sperner, Rule, SpernerFlags, SubdivisionKind};
use randfix_cli::subdivide::{run_subdivide, SubdivideFlags};
use randfix_core::{Arithmetic, CellSelection};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "randfix", version, about = "Random fixed points of sigma-stable maps on random simplexes")]
struct Cli {
    /// Worker threads for per-atom work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate the random fixed point of a problem file.
    Solve {
        problem: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// `float` or `rational`.
        #[arg(long)]
        arith: Option<Arithmetic>,
        /// `pl-zero` or `sperner`.
        #[arg(long)]
        selection: Option<CellSelection>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write every nested simplex to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Label a subdivision of the standard simplex and find a completely labeled simplex.
    Sperner {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        atoms: usize,
        #[arg(long, value_enum, default_value_t = SubdivisionKind::Barycentric)]
        subdivision: SubdivisionKind,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Labeling file; overrides `--n`, `--atoms` and `--rule`.
        #[arg(long)]
        labeling: Option<PathBuf>,
        /// One rule for all atoms, or one per atom.
        #[arg(long = "rule", value_enum)]
        rules: Vec<Rule>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Count completely labeled cells over every proper labeling (K = 1, n <= 3).
        #[arg(long)]
        enumerate_all: bool,
        #[arg(long)]
        export_labeling: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build iterated barycentric subdivisions and certify the diameter bound.
    Subdivide {
        /// Standard simplex with this many vertices.
        #[arg(long, conflicts_with = "simplex")]
        n: Option<usize>,
        /// Simplex file `{schema, space, vertices}`.
        #[arg(long)]
        simplex: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Write levels, registry and cells here instead of stdout.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Check volumes, face intersections and point location.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit<T: Serialize>(value: &T, path: Option<&PathBuf>, summary: &str) -> Result<()> {
    match path {
        Some(p) => {
            write_json(p, value)?;
            print!("{summary}");
        }
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("--threads")?;
    }
    match cli.command {
        Command::Solve { problem, epsilon, max_iter, arith, selection, seed, trace, report } => {
            let flags = SolveFlags { problem, epsilon, max_iter, arith, selection, seed, trace, report };
            let out = run_solve(&flags)?;
            emit(&out.report, flags.report.as_ref(), &out.summary)?;
            Ok(match out.report.status {
                Status::Converged => ExitCode::SUCCESS,
                Status::MaxIter => ExitCode::from(2),
            })
        }
        Command::Sperner { n, atoms, subdivision, depth, labeling, rules, seed, enumerate_all, export_labeling, report } => {
            let flags = SpernerFlags { n, atoms, subdivision, depth, labeling, rules, seed, enumerate_all, export_labeling };
            let (out, summary) = run_sperner(&flags)?;
            emit(&out, report.as_ref(), &summary)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Subdivide { n, simplex, depth, trace, verify, samples, seed } => {
            let flags = SubdivideFlags { n, simplex, depth, verify, samples, seed };
            let (out, summary) = run_subdivide(&flags)?;
            emit(&out, trace.as_ref(), &summary)?;
            Ok(if out.is_sound() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
