use std::process::ExitCode;

use clap::Parser;
use helmuc_cli::{parse_config, run, Flags};

fn main() -> ExitCode {
    let flags = Flags::parse();
    let config = match parse_config(&flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            println!();
            println!("wrote {}", outcome.csv_path.display());
            println!("wrote {}", outcome.summary_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
