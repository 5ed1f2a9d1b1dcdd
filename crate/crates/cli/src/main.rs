use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use minimax_lr::Error;
use minimax_lr_cli::{error_json, exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = Error::InvalidArgument(e.render().to_string().trim().to_string());
            eprintln!("{}", error_json(&err));
            return ExitCode::from(exit_code(err.class()) as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            let _ = writeln!(std::io::stdout().lock(), "{}", out.stdout.trim_end());
            ExitCode::from(out.exit as u8)
        }
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::from(exit_code(err.class()) as u8)
        }
    }
}
