mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::Body;
use config::{Cli, Format, RunConfig, OUT_DIR_ENV};
use error::ConfigError;

const EXIT_TOLERANCE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn output_path(cfg: &RunConfig) -> Option<PathBuf> {
    if let Some(p) = &cfg.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty())?;
    let ext = match cfg.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let name = serde_json::to_value(cfg.command).expect("command name serializes");
    Some(PathBuf::from(dir).join(format!("{}.{ext}", name.as_str().unwrap_or("report"))))
}

fn render(body: &Body) -> String {
    match body {
        Body::Json(v) => {
            let mut s = serde_json::to_string_pretty(v).expect("report serializes");
            s.push('\n');
            s
        }
        Body::Csv(s) => s.clone(),
    }
}

fn execute(cli: Cli) -> Result<bool, ConfigError> {
    let (name, flags) = cli.command.split();
    let cfg = RunConfig::resolve(name, flags)?;
    let outcome = commands::run(&cfg)?;
    let text = render(&outcome.body);
    match output_path(&cfg) {
        Some(path) => std::fs::write(&path, text).map_err(|source| ConfigError::Output {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = out.write_all(text.as_bytes());
        }
    }
    eprintln!("{}", outcome.summary);
    eprintln!(
        "{}",
        if outcome.passed {
            "PASS"
        } else {
            "FAIL: tolerance violated"
        }
    );
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_TOLERANCE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
