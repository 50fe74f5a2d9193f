//! Command-line front end. Exit codes: 0 success, 1 usage or config error,
//! 2 verification failure, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kaczmarz_cascade::experiments::{
    cmd_montecarlo, cmd_reproduce, cmd_solve, cmd_verify, Figure, FigureSummary, Overrides, RunConfig,
};
use kaczmarz_cascade::Error;

#[derive(Parser)]
#[command(name = "kaczmarz", version, about = "Randomized Kaczmarz solves, bound checks and experiment data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured solve and write one trace CSV per run.
    Solve(RunArgs),
    /// Check the one-step bounds along a trajectory.
    Verify(RunArgs),
    /// Write the data behind one of the three figures.
    Reproduce {
        #[arg(long, value_parser = parse_figure)]
        figure: Figure,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate statistics over independent runs.
    Montecarlo(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    record_stride: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    theorem: Option<u8>,
    #[arg(long, num_args = 1..)]
    ell: Option<Vec<usize>>,
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl RunArgs {
    fn config(&self) -> kaczmarz_cascade::Result<RunConfig> {
        let mut config = RunConfig::load(&self.config)?;
        config.apply(&Overrides {
            seed: self.seed,
            steps: self.steps,
            runs: self.runs,
            output_path: self.out.clone(),
            record_stride: self.record_stride,
            theorem: self.theorem,
            ells: self.ell.clone(),
            ..Default::default()
        });
        Ok(config)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NumericFailure { .. } | Error::SvdNoConvergence { .. } | Error::NotPositiveDefinite { .. } => 3,
        _ => 1,
    }
}

fn execute(command: Command) -> kaczmarz_cascade::Result<u8> {
    match command {
        Command::Solve(args) => {
            let out = cmd_solve(&args.config()?)?;
            for p in out.paths {
                println!("{}", p.display());
            }
        }
        Command::Verify(args) => {
            let out = cmd_verify(&args.config()?)?;
            println!(
                "{}: {} inequality violations, {} identity violations",
                out.path.display(),
                out.inequality_violations,
                out.identity_violations
            );
            if !out.passed() {
                return Ok(2);
            }
        }
        Command::Reproduce { figure, seed, out } => {
            let seed = seed.ok_or_else(|| Error::Config {
                field: "seed".into(),
                msg: "required (pass --seed)".into(),
            })?;
            let result = cmd_reproduce(figure, seed, &out)?;
            for p in &result.paths {
                println!("{}", p.display());
            }
            match result.summary {
                FigureSummary::Fig1(s) => println!(
                    "residual {:.4e} -> {:.4e} -> {:.4e}; |x_k| = {:.3}, |x| = {:.3}",
                    s.initial_residual, s.mid_residual, s.final_residual, s.final_iterate_norm, s.solution_norm
                ),
                FigureSummary::Fig2 { min_cosine, max_cosine } => {
                    println!("v1 cosine range [{min_cosine:.4}, {max_cosine:.4}]")
                }
                FigureSummary::Fig3(runs) => {
                    for (j, r) in runs.iter().enumerate() {
                        println!(
                            "run {j}: |Ax-b|^2 change {:.1}, predicted {:.1}",
                            r.realized_change_sq(),
                            r.cumulative_decrement
                        );
                    }
                }
            }
        }
        Command::Montecarlo(args) => {
            let out = cmd_montecarlo(&args.config()?)?;
            println!("{}", out.path.display());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
