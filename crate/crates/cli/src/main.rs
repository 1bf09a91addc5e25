mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::CliResult;

fn run(cli: Cli) -> CliResult<()> {
    let (out_dir, (outputs, manifest)) = match &cli.command {
        Command::Fit(a) => (&a.out_dir, commands::cmd_fit(a)?),
        Command::Tail(a) => (&a.out_dir, commands::cmd_tail(a)?),
        Command::Gen(a) => (&a.out_dir, commands::cmd_gen(a)?),
        Command::Experiment(a) => (&a.out_dir, commands::cmd_experiment(a)?),
    };
    outputs.write(out_dir, &manifest)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
