use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cracked_beam_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((cfg, report)) => {
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, &report.body)
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
                None => std::io::stdout()
                    .write_all(report.body.as_bytes())
                    .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
            };
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            match written.err().or(report.failure) {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
