use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wznw_mono::report::{summarize, write_jsonl};
use wznw_mono::suites::{run_suites, ModeKind, RunConfig, SuiteKind};
use wznw_mono::Corruption;

/// Exact verifier for the quantum monodromy matrices, zero modes and
/// q-determinant identities of the SU(n) WZNW chiral model.
#[derive(Parser)]
#[command(name = "wznw-mono", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected verification suites and print a report table.
    Run {
        /// Rank of su(n); 2 or 3 (4 requires --allow-large-n).
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Level k; the height is h = k + n.
        #[arg(long, default_value_t = 2)]
        level: usize,
        /// Coefficient field: exact cyclotomic numbers or formal q.
        #[arg(long, value_enum, default_value_t = ModeKind::Generic)]
        mode: ModeKind,
        /// Suites to run (repeatable).
        #[arg(long = "suite", value_enum, default_values_t = [SuiteKind::All])]
        suites: Vec<SuiteKind>,
        /// Maximum word length for the zero-mode corpus (default n + 1).
        #[arg(long)]
        max_word_len: Option<usize>,
        /// Write one JSON record per check to this path.
        #[arg(long)]
        emit: Option<std::path::PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Permit n = 4 despite the dimension growth.
        #[arg(long, default_value_t = false)]
        allow_large_n: bool,
        /// Deliberately corrupt one convention (test-only; the affected
        /// checks must then fail).
        #[arg(long, value_enum, default_value_t = Corruption::None)]
        corrupt: Corruption,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            n,
            level,
            mode,
            suites,
            max_word_len,
            emit,
            jobs,
            allow_large_n,
            corrupt,
        } => {
            if let Some(j) = jobs {
                if rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build_global()
                    .is_err()
                {
                    eprintln!("warning: thread pool already initialized");
                }
            }
            let config = RunConfig {
                n,
                level,
                mode_kind: mode,
                suites,
                max_word_len,
                allow_large_n,
                corrupt,
            };
            let reports = match run_suites(&config) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let summary = summarize(&reports);
            for line in &summary.lines {
                println!("{line}");
            }
            println!(
                "\n{} checks: {} passed, {} failed, {} skipped",
                summary.total, summary.passed, summary.failed, summary.skipped
            );
            if let Some(path) = emit {
                let file = match File::create(&path) {
                    Ok(f) => f,
                    Err(e) => {
                        eprintln!("error: cannot write report to {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                };
                let mut w = BufWriter::new(file);
                if let Err(e) = write_jsonl(&mut w, &reports).and_then(|_| w.flush()) {
                    eprintln!("error: report emission failed: {e}");
                    return ExitCode::from(2);
                }
                println!("report written to {}", path.display());
            }
            if summary.failed > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
