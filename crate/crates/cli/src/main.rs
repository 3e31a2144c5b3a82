use std::process::ExitCode;

use clap::Parser;
use pervin_cli::commands::{limits_from_env, run};
use pervin_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let result = limits_from_env().and_then(|limits| run(&cli.command, &command_line, limits));
    match result {
        Ok(output) => {
            print!("{}", output.render(cli.format));
            ExitCode::from(output.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
