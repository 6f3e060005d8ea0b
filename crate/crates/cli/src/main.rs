use std::process::ExitCode;

use clap::Parser;
use sysrisk_cli::args::Cli;
use sysrisk_cli::{run, Outcome};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Report(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(Outcome::Written(paths)) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
