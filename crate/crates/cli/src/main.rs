use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use vpure_core::harness::{analytic_fidelity, render_report, run_to_dir, selftest, ExperimentConfig, SelftestOptions};
use vpure_core::Error;

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

#[derive(Parser)]
#[command(name = "vpure", version, about = "Virtual entanglement purification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write its CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check invariants and headline numbers; exit 3 if any fails.
    Selftest {
        /// Shift q_II of the PEC decompositions (mutation check).
        #[arg(long, default_value_t = 0.0, hide = true)]
        perturb_pec_q_ii: f64,
        /// Replace −Y⊗Y by +Y⊗Y in the stabilizer-sum check (mutation check).
        #[arg(long, hide = true)]
        flip_yy_sign: bool,
    },
    /// Closed-form purified fidelity for one Werner pair.
    Analytic {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        #[arg(long)]
        eps: f64,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("vpure: {msg}");
    ExitCode::from(code)
}

fn code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parameter { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn run(config: PathBuf, out: PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", config.display())),
    };
    let cfg = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", config.display())),
    };
    let start = Instant::now();
    match run_to_dir(&cfg, &out) {
        Ok(path) => {
            eprintln!("wrote {} in {:.2} s", path.display(), start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => fail(code_for(&e), e),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out } => run(config, out),
        Command::Selftest { perturb_pec_q_ii, flip_yy_sign } => {
            let checks = selftest(&SelftestOptions { pec_q_ii_shift: perturb_pec_q_ii, flip_yy_sign });
            print!("{}", render_report(&checks));
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION)
            }
        }
        Command::Analytic { p1, p2, eps } => match analytic_fidelity(p1, p2, eps) {
            Ok(a) => {
                println!("fidelity {}", a.fidelity);
                println!("infidelity {}", a.infidelity());
                println!("leading_order_fidelity {}", a.leading_order);
                ExitCode::SUCCESS
            }
            Err(e) => fail(code_for(&e), e),
        },
    }
}
