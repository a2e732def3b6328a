use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use electctl_cli::commands::{
    self, Family, GenConfig, OutputFormat, Preset, ReductionKind, Solver, SweepConfig, EXIT_ERROR,
};
use electctl_core::{Problem, TieRule, VotingRule, DEFAULT_BUDGET};

/// Election control by partition: solvers, reductions and agreement sweeps.
///
/// Exit status: 0 yes/accepted, 1 no/rejected, 2 unknown (budget exceeded),
/// 3 error.
#[derive(Parser)]
#[command(name = "electctl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance file and print a result record.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "poly")]
        solver: Solver,
        /// Largest witness space the oracle will enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a witness (or a result record) against an instance file.
    Verify { instance: PathBuf, witness: PathBuf },
    /// Build the target instance of a reduction from a source file.
    Reduce {
        #[arg(value_enum)]
        kind: ReductionKind,
        source: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the polynomial solver with the oracle over a family of instances.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        candidates: usize,
        #[arg(long, default_value_t = 5)]
        voters: usize,
        /// Number of parts for the ccpkv family.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Seeded instances to draw; 0 enumerates every profile.
        #[arg(long, default_value_t = 0)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Record solver times in the report (makes it non-reproducible).
        #[arg(long)]
        timings: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        /// Directory for report.csv, summary.json and counterexamples/.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded random instance or a preset file.
    Gen {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long, default_value = "plurality")]
        rule: String,
        #[arg(long, default_value = "CCPV")]
        problem: String,
        #[arg(long, default_value = "TE")]
        tie: String,
        #[arg(long, default_value_t = 3)]
        candidates: usize,
        #[arg(long, default_value_t = 6)]
        voters: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        limit: usize,
        /// Distinct group labels for the group problems.
        #[arg(long, default_value_t = 3)]
        groups: usize,
        /// Ballots in the addition pool (CCAVG).
        #[arg(long, default_value_t = 4)]
        pool: usize,
        /// Approval probability per candidate for approval ballots.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<i32> {
    let stdout = &mut std::io::stdout().lock();
    match cli.command {
        Command::Solve { file, solver, budget, format, out } => {
            commands::solve(&file, solver, budget, format, out.as_deref(), stdout)
        }
        Command::Verify { instance, witness } => commands::verify(&instance, &witness, stdout),
        Command::Reduce { kind, source, out } => commands::reduce(kind, &source, out.as_deref(), stdout),
        Command::Sweep { family, candidates, voters, k, count, seed, budget, timings, format, out } => {
            let cfg = SweepConfig { family, candidates, voters, k, count, seed, budget, timings };
            commands::sweep(&cfg, format, out.as_deref(), stdout)
        }
        Command::Gen { preset, rule, problem, tie, candidates, voters, k, limit, groups, pool, density, seed, out } => {
            if preset.is_some() {
                return commands::gen(None, preset, out.as_deref(), stdout);
            }
            if !(0.0..=1.0).contains(&density) {
                return Err(anyhow!("--density must lie in [0, 1]"));
            }
            let cfg = GenConfig {
                rule: VotingRule::from_name(&rule).ok_or_else(|| anyhow!("unknown rule {rule:?}"))?,
                problem: Problem::from_name(&problem).ok_or_else(|| anyhow!("unknown problem {problem:?}"))?,
                tie: TieRule::from_name(&tie).ok_or_else(|| anyhow!("unknown tie rule {tie:?}"))?,
                candidates,
                voters,
                k,
                limit,
                groups,
                pool,
                density,
                seed,
            };
            commands::gen(Some(&cfg), None, out.as_deref(), stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
