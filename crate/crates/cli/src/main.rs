//! Command-line front end: preset parameter sweeps, single-bound
//! evaluations, and the verification suite. Emits fixed-schema CSV.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use clap::{Parser, Subcommand, ValueEnum};
use lmo_bounds_cli::{csv, eval, sweeps};
use lmo_bounds::{verify, McConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lmob", about = "Leave-m-out generalization bound toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset parameter sweep and emit CSV.
    Sweep {
        /// Figure preset: fig4, fig5, fig6 or fig7.
        #[arg(long)]
        figure: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the outer Monte-Carlo budget.
        #[arg(long)]
        mc_outer: Option<usize>,
        /// Override the inner Monte-Carlo budget.
        #[arg(long)]
        mc_inner: Option<usize>,
    },
    /// Run the verification suite; nonzero exit if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional report path; the report always also prints to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mc_outer: Option<usize>,
        #[arg(long)]
        mc_inner: Option<usize>,
    },
    /// Evaluate a single bound and emit one CSV row.
    Bound {
        /// Bound name; see the error message for the full list.
        #[arg(long)]
        bound: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 0.4)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mc_outer: Option<usize>,
        #[arg(long)]
        mc_inner: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Sweep { figure, seed, out, mc_outer, mc_inner } => {
            let spec = sweeps::SweepSpec { figure, seed, mc_outer, mc_inner };
            let rows = sweeps::run_sweep(&spec)?;
            csv::write_output(&rows, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { level, seed, out, mc_outer: _, mc_inner: _ } => {
            let results = match level {
                Level::Fast => verify::fast_checks(seed),
                Level::Full => verify::full_checks(seed),
            };
            let mut report = String::new();
            for r in &results {
                report.push_str(&r.summary_line());
                report.push('\n');
            }
            print!("{report}");
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {} failed", results.len(), failed);
            if let Some(path) = out {
                std::fs::write(&path, &report)
                    .map_err(|e| format!("failed to write {}: {e}", path.display()))?;
            }
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bound {
            bound,
            n,
            m,
            k,
            p,
            mu,
            sigma,
            delta,
            seed,
            out,
            mc_outer,
            mc_inner,
        } => {
            let mut mc = McConfig { seed, ..Default::default() };
            if let Some(o) = mc_outer {
                mc.outer = o;
            }
            if let Some(i) = mc_inner {
                mc.inner = i;
            }
            let ep = eval::EvalParams { n, m, k, p, mu, sigma, delta, seed, mc };
            let row = eval::evaluate(&bound, &ep)?;
            csv::write_output(&[row], out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
