use clap::Parser;

use txh_cli::cli::Cli;
use txh_cli::report::write_atomic;
use txh_cli::{commands, CliError};

fn main() {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("TXH_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                txh_core::exec::configure_threads(n);
            }
            _ => {
                eprintln!("txh: ignoring invalid TXH_THREADS value `{threads}`");
            }
        }
    }

    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("txh: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let report = commands::run(cli)?;
    let text = report.render(cli.format);
    match &cli.out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
