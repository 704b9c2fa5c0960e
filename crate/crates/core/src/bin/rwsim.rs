use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use reinforced_walks::cli::{error_exit_code, eval_op, format_value, run_config, sweep_config, Overrides, RunSummary, OPS};
use reinforced_walks::harness::Verdict;

#[derive(Parser)]
#[command(name = "rwsim", version, about = "Reinforced random walk simulation and validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replica count, overriding the configuration.
    #[arg(long, global = true)]
    replicas: Option<u64>,
    /// Output directory [default: $RWSIM_OUT_DIR or ./rwsim-out].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every suite of a configuration file.
    Run { config: PathBuf },
    /// Run a configuration over the grid of its [sweep] section.
    Sweep { config: PathBuf },
    /// Evaluate a formula, e.g. `eval gamma 1 1`.
    Eval {
        op: String,
        #[arg(allow_negative_numbers = true)]
        args: Vec<f64>,
    },
}

fn report(summary: &RunSummary) {
    for r in &summary.records {
        let grid = r.grid.as_ref().map(|g| format!(" [{g}]")).unwrap_or_default();
        let est = r.estimate.map(format_value).unwrap_or_else(|| "-".into());
        println!("{:<20}{grid} estimate={est} verdict={:?}", r.test, r.verdict);
    }
    let failed = summary.records.iter().filter(|r| r.verdict == Verdict::Fail).count();
    eprintln!("{} records, {failed} failed, output in {}", summary.records.len(), summary.out_dir.display());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let overrides = Overrides {
        seed: cli.seed,
        replicas: cli.replicas,
        out_dir: cli.out_dir,
        threads: cli.threads,
    };
    let result = match cli.command {
        Command::Eval { op, args } => eval_op(&op, &args).map(|v| {
            println!("{}", format_value(v));
            0
        }),
        Command::Run { config } => std::fs::read_to_string(&config)
            .map_err(Into::into)
            .and_then(|text| run_config(&text, &overrides))
            .map(|s| {
                report(&s);
                s.exit_code
            }),
        Command::Sweep { config } => std::fs::read_to_string(&config)
            .map_err(Into::into)
            .and_then(|text| sweep_config(&text, &overrides))
            .map(|s| {
                report(&s);
                s.exit_code
            }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if let reinforced_walks::Error::InvalidParameter(m) = &e {
                if m.starts_with("unknown operation") {
                    let names: Vec<&str> = OPS.iter().map(|(n, _)| *n).collect();
                    eprintln!("operations: {}", names.join(", "));
                }
            }
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
