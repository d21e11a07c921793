use std::process::ExitCode;

use anyhow::Context;
use namevar::cli::{execute, parse_args, Cli, CliError};

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool setup failed")?;
    }
    execute(cli)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match parse_args(std::env::args_os()) {
        Ok(cli) => cli,
        Err(Ok(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(Err(e)) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => match err.downcast_ref::<CliError>() {
            Some(e) => {
                eprintln!("{e}");
                ExitCode::from(e.exit_code() as u8)
            }
            None => {
                eprintln!("error[E_INTERNAL]: {err:#}");
                ExitCode::from(4)
            }
        },
    }
}
