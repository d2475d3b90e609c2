//! `ccwf` command line: generate synthetic scenarios, fit partitioned forest
//! ensembles, predict, and run the replicated benchmark experiments.
//!
//! Exit codes: 0 success, 1 usage / invalid configuration, 2 I/O, 3 numeric.
//! Given identical arguments, config, and seed, every output file is
//! byte-identical regardless of `--threads`.

mod commands;
mod config;
mod model_io;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "ccwf",
    version,
    about = "Cross-cluster weighted forests: partitioned random-forest ensembles with stacking"
)]
struct Cli {
    /// Worker threads (default: all cores). Never changes the numbers.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic train/test scenario as CSV files.
    Gen(commands::GenArgs),
    /// Fit one ensemble variant on a training CSV.
    Fit(commands::FitArgs),
    /// Predict from a saved model bundle.
    Predict(commands::PredictArgs),
    /// Run a replicated benchmark scenario from a config file.
    Bench(commands::BenchArgs),
    /// Re-run a scenario while varying one parameter.
    Sweep(commands::SweepArgs),
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let first = e.to_string().lines().next().unwrap_or("bad arguments").to_string();
            eprintln!("error: usage: {first}");
            return 1;
        }
    };
    if let Err(msg) = init_threads(cli.threads) {
        eprintln!("error: usage: {msg}");
        return 1;
    }
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Fit(a) => commands::fit(a),
        Command::Predict(a) => commands::predict(a),
        Command::Bench(a) => commands::bench(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let (class, code) = match &e {
                ccwf::Error::Io { .. } | ccwf::Error::Csv(_) => ("io", 2),
                ccwf::Error::Numeric(_) => ("numeric", 3),
                ccwf::Error::Invalid(_) => ("usage", 1),
            };
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {class}: {msg}");
            code
        }
    }
}

#[cfg(feature = "parallel")]
fn init_threads(n: Option<usize>) -> Result<(), String> {
    match n {
        None => Ok(()),
        Some(0) => Err("--threads must be >= 1".into()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("thread pool: {e}")),
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads(n: Option<usize>) -> Result<(), String> {
    // sequential build: the flag is accepted and has no effect
    let _ = n;
    Ok(())
}
