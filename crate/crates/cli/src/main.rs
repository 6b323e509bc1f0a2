use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wparab_cli::{load_config, run_config, summary, RunOptions};

#[derive(Parser)]
#[command(name = "wparab", version, about = "Weighted parabolicity scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario in a config.
    Run(RunArgs),
    /// Run only the `curves` scenarios of a config.
    Curves(RunArgs),
    /// Run only the `mc-verify` scenarios of a config.
    McVerify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Directory for report.json and CSV tables.
    #[arg(long, default_value = "wparab-out")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the report JSON instead of the summary.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, only) = match cli.command {
        Command::Run(a) => (a, None),
        Command::Curves(a) => (a, Some("curves")),
        Command::McVerify(a) => (a, Some("mc-verify")),
    };
    let config = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        workers: args.workers,
        seed: args.seed,
        only_task: only.map(str::to_owned),
    };
    let out = run_config(&config, &opts);
    if let Err(e) = out.write_to(&args.out) {
        eprintln!("error: cannot write to {}: {e}", args.out.display());
        return ExitCode::from(2);
    }
    if args.json {
        print!("{}", out.report_json());
    } else {
        println!("{}", summary(&out));
        println!("report written to {}", args.out.join("report.json").display());
    }
    if out.errors > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
