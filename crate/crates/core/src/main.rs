use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hsfm::cli::{
    bench_csv, cmd_bench, cmd_kth, cmd_solve, cmd_verify, error_exit_code, ReportFile, EXIT_OK,
};
use hsfm::gen::{generate, InstanceKind};
use hsfm::instance::{Instance, InstanceFile};
use hsfm::sfm::{InnerEngine, SfmConfig};
use hsfm::solver::SolveOptions;
use hsfm::Result;

#[derive(Parser)]
#[command(name = "hsfm", version, about = "Submodular minimization over complements of hierarchical lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the instance's function over its feasible family.
    Solve {
        #[command(flatten)]
        io: InstanceIo,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Check declared structure and compare the solver with an exhaustive scan (n <= 14).
    Verify {
        #[command(flatten)]
        io: InstanceIo,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// The k smallest distinct values of the instance's function.
    Kth {
        #[command(flatten)]
        io: InstanceIo,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Write a seeded random instance.
    Gen {
        #[arg(long, value_parser = parse_kind)]
        kind: InstanceKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve generated instances over ranges of n and k and emit CSV rows.
    Bench {
        #[arg(long, value_parser = parse_kind)]
        kind: InstanceKind,
        /// Single value or inclusive range such as 6..12.
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<usize>,
        #[arg(long, value_parser = parse_range, default_value = "1")]
        k: RangeInclusive<usize>,
        /// Number of seeds per (n, k).
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverFlags,
    },
}

#[derive(Args)]
struct InstanceIo {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Auto,
    Wolfe,
    Brute,
}

#[derive(Args)]
struct SolverFlags {
    /// Inner box solver.
    #[arg(long, value_enum, default_value_t = Engine::Auto)]
    engine: Engine,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Stop at the first feasible box matching the unconstrained minimum.
    #[arg(long)]
    early_exit: bool,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        let engine = match self.engine {
            Engine::Auto => InnerEngine::Auto,
            Engine::Wolfe => InnerEngine::Wolfe,
            Engine::Brute => InnerEngine::Exhaustive,
        };
        SolveOptions {
            sfm: SfmConfig {
                engine,
                ..SfmConfig::default()
            },
            parallel: self.parallel,
            early_exit: self.early_exit,
            value_bound: None,
        }
    }
}

fn parse_kind(s: &str) -> std::result::Result<InstanceKind, String> {
    s.parse().map_err(|e: hsfm::Error| e.to_string())
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|v| v..=v),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load(path: &Path) -> Result<Instance> {
    Instance::from_file(&InstanceFile::read(path)?)
}

fn report(result: Result<(ReportFile, i32)>, out: Option<&Path>) -> Result<i32> {
    let (file, code) = result?;
    emit(&file.to_json(), out)?;
    Ok(code)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve { io, solver } => report(cmd_solve(&load(&io.instance)?, &solver.options()), io.out.as_deref()),
        Command::Verify { io, solver } => report(cmd_verify(&load(&io.instance)?, &solver.options()), io.out.as_deref()),
        Command::Kth { io, k, solver } => report(cmd_kth(&load(&io.instance)?, k, &solver.options()), io.out.as_deref()),
        Command::Gen { kind, n, k, seed, out } => {
            emit(&generate(kind, n, k, seed)?.to_json(), out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Bench {
            kind,
            n,
            k,
            seeds,
            seed,
            csv,
            solver,
        } => {
            let rows = cmd_bench(kind, n, k, seed..seed + seeds, &solver.options())?;
            emit(&bench_csv(&rows), csv.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        error_exit_code(&e)
    });
    ExitCode::from(code as u8)
}
