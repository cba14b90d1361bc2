use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nslab::{list_text, load_config, run, CliError};

#[derive(Parser)]
#[command(name = "nslab", version, about = "Non-scattering obstacle laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write results.json plus artifacts.
    Run {
        scenario: String,
        /// Config file, or `default`.
        #[arg(value_name = "CONFIG")]
        config_pos: Option<PathBuf>,
        #[arg(long, conflicts_with = "config_pos")]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List scenarios.
    List {
        /// Also print every config key with its default.
        #[arg(long)]
        keys: bool,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List { keys } => {
            print!("{}", list_text(keys));
            Ok(())
        }
        Command::Run { scenario, config_pos, config, out, threads } => {
            let mut cfg = load_config(&scenario, config.or(config_pos).as_deref())?;
            if let Some(out) = out {
                cfg.set("output.dir", &out.to_string_lossy());
            }
            if let Some(n) = threads {
                if n == 0 {
                    return Err(CliError::Config("--threads must be positive".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            let (dir, report) = run(&cfg)?;
            for (name, ok) in &report.checks {
                println!("{:<4} {name}", if *ok { "ok" } else { "FAIL" });
            }
            println!("wrote {}", dir.join("results.json").display());
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Scenario("some checks failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nslab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
