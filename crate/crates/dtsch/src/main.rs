use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dtsch::commands::{cmd_compare, cmd_run, cmd_scenario, list_scenarios};
use dtsch::{CliError, RunConfig};

/// Directional-antenna TSCH scheduling simulator.
#[derive(Parser)]
#[command(name = "dtsch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one antenna mode and write its report.
    Run(RunArgs),
    /// Simulate omni and directional on identical inputs and compare.
    Compare(RunArgs),
    /// Run a built-in scenario and check its expected outcome.
    Scenario { name: String },
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// omni or directional (ignored by compare).
    #[arg(long)]
    mode: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Simulated seconds.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    channels: Option<u16>,
    #[arg(long)]
    beams: Option<u16>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut o: Vec<(&str, &str, String)> = Vec::new();
        if let Some(v) = self.seed {
            o.push(("seed", "seed", v.to_string()));
        }
        if let Some(v) = &self.mode {
            o.push(("mode", "mode", v.clone()));
        }
        if let Some(v) = self.duration {
            o.push(("duration", "duration", v.to_string()));
        }
        if let Some(v) = self.nodes {
            o.push(("nodes", "nodes", v.to_string()));
        }
        if let Some(v) = self.channels {
            o.push(("channels", "channels", v.to_string()));
        }
        if let Some(v) = self.beams {
            o.push(("beams", "beams", v.to_string()));
        }
        Ok(RunConfig::load(self.config.as_deref(), &o)?)
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let cfg = args.load()?;
            println!("{}", cmd_run(&cfg, &args.out)?);
            println!("wrote {}", args.out.display());
        }
        Command::Compare(args) => {
            let cfg = args.load()?;
            println!("{}", cmd_compare(&cfg, &args.out)?);
            println!("wrote {}", args.out.display());
        }
        Command::Scenario { name } => {
            let verdict = cmd_scenario(&name)?;
            println!("{verdict}");
            if !verdict.passed() {
                return Err(CliError::ScenarioFailed(name));
            }
        }
        Command::ListScenarios => print!("{}", list_scenarios()),
    }
    Ok(())
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
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
