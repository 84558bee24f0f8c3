use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qmem_cli::config::{Experiment, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(
    name = "qmem",
    version,
    about = "Run error-string transport experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `experiment` in the file
        #[arg(long)]
        experiment: Option<String>,
        /// Overrides `output_dir`
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed`
        #[arg(long)]
        seed: Option<u64>,
        /// Also write SVG plots
        #[arg(long)]
        svg: bool,
    },
    /// List experiments and the keys they read
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in Experiment::all() {
                let d = ExperimentConfig::defaults(e);
                println!("{e}");
                println!("    {}", e.describe());
                println!("    n_range (default {:?})", d.n_range);
                println!("    keys: {}", e.parameters().join(", "));
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            experiment,
            out,
            seed,
            svg,
        } => {
            let overrides = Overrides {
                experiment,
                output_dir: out,
                seed,
                svg,
            };
            let result =
                ExperimentConfig::load(&config, &overrides).and_then(|c| qmem_cli::run(&c));
            match result {
                Ok(o) => {
                    for c in &o.report.checks {
                        println!("ok    {} = {}", c.name, c.value);
                    }
                    for f in &o.files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("qmem: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
