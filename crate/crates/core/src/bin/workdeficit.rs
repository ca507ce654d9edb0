use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use workdeficit::cli::{self, Cli, CliError};

fn configure_threads() -> Result<(), CliError> {
    if let Some(n) = cli::thread_cap()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Parse(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = configure_threads().and_then(|()| cli::run(&args));
    match result {
        Ok((text, None)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Ok((text, Some(path))) => match fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
