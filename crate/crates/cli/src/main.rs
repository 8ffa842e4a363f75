use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use ostrowski_cli::{exit_code_for, run, Cli, EXIT_INVALID};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INVALID as u8),
            };
        }
    };

    let start = Instant::now();
    let mut outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };
    outcome.report.timings.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let rendered = if cli.json {
        outcome.report.to_json() + "\n"
    } else if cli.csv {
        outcome.report.to_csv()
    } else {
        outcome.report.to_text()
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, rendered.as_bytes()),
        None => std::io::stdout().lock().write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    if let Some(note) = &outcome.note {
        eprintln!("note: {note}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
