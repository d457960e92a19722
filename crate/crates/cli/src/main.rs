use std::process::ExitCode;

use kih_cli::CliError;

fn main() -> ExitCode {
    match kih_cli::run(std::env::args_os()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            match &err {
                CliError::Clap(e) => {
                    let _ = e.print();
                }
                CliError::Kih(e) => eprintln!("kih: {e}"),
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
