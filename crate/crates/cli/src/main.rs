use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nqverify::corpus::{run_corpus, Expected};
use nqverify::semantics::Mode;
use nqverify::{error_exit_code, render_error, verify_file, VerifyOptions};

/// Verify correctness formulas of nondeterministic quantum while-programs.
#[derive(Parser)]
#[command(name = "nqverify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every proof in a declaration file.
    Verify {
        file: PathBuf,
        /// Acceptance tolerance for order decisions.
        #[arg(long, default_value_t = 1e-7)]
        epsilon: f64,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        /// Also test the formula on sampled states, unrolling loops to this depth.
        #[arg(long)]
        oracle_depth: Option<usize>,
        #[arg(long, default_value_t = 200)]
        oracle_samples: usize,
        /// Write generated predicates as VARk.qmat.json into this directory.
        #[arg(long)]
        save_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Correctness::Partial)]
        mode: Correctness,
        /// Largest set of predicates or channels kept at any node.
        #[arg(long, default_value_t = nqverify::semantics::DEFAULT_CAP)]
        cap: usize,
    },
    /// Run the bundled examples and compare against their expected outcomes.
    Corpus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Correctness {
    Partial,
    Total,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            file,
            epsilon,
            max_iters,
            oracle_depth,
            oracle_samples,
            save_dir,
            seed,
            mode,
            cap,
        } => {
            let opts = VerifyOptions {
                epsilon,
                max_iters,
                oracle_depth,
                oracle_samples,
                save_dir,
                seed,
                mode: match mode {
                    Correctness::Partial => Mode::Partial,
                    Correctness::Total => Mode::Total,
                },
                cap,
                ..VerifyOptions::default()
            };
            match verify_file(&file, &opts) {
                Ok(report) => {
                    print!("{}", report.text);
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => {
                    eprint!("{}", render_error(&e));
                    ExitCode::from(error_exit_code(&e) as u8)
                }
            }
        }
        Command::Corpus => {
            let outcomes = run_corpus(&VerifyOptions::default());
            let mut all = true;
            for o in &outcomes {
                let expected = match o.expected {
                    Expected::Verdict(v) => v.to_string(),
                    Expected::InvalidInvariant => "invalid invariant".into(),
                };
                println!(
                    "{:<4} {:<22} expected {:<18} got {}",
                    if o.ok() { "ok" } else { "FAIL" },
                    o.name,
                    expected,
                    o.detail
                );
                all &= o.ok();
            }
            if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
