use clap::error::ErrorKind;
use clap::Parser;

use qradar_cli::{cmd_campaign, cmd_trial, CampaignArgs, CliError, TrialArgs};

/// FMCW radar localization simulations: Monte Carlo error maps and
/// single-trial dumps for the 1-bit dithered, channel-dropped two-antenna
/// acquisition scheme.
#[derive(Debug, Parser)]
#[command(name = "qradar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Run a seeded Monte Carlo campaign and emit the per-cell error map.
    Campaign(CampaignArgs),
    /// Run a single localization trial and dump its internals as JSON.
    Trial(TrialArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Campaign(args) => cmd_campaign(&args),
        Command::Trial(args) => cmd_trial(&args),
    };
    match result {
        Ok(()) => {}
        Err(err @ CliError::Usage(_)) => {
            eprintln!("error: {err}");
            std::process::exit(1);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(2);
        }
    }
}
