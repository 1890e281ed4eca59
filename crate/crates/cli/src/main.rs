mod cli;
mod commands;
mod error;
mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use error::{CliError, EXIT_USAGE};

const SUBCOMMANDS: [&str; 5] = ["sample", "fit", "bayes", "study", "gof"];

/// Turn `key = value` lines into long flags. `key = true` becomes a bare
/// switch and `key = false` is dropped.
fn config_args(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(CliError::usage(format!("config line {}: invalid key", i + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => out.push(format!("--{key}={value}").into()),
        }
    }
    Ok(out)
}

/// Find `--config` on the command line and splice the file's flags in just
/// after the subcommand, so anything the user typed later wins.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if s == "--config" {
            path = args.get(i + 1).map(|p| p.to_string_lossy().into_owned());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| CliError::usage(format!("cannot read config {path}: {e}")))?;
    let extra = config_args(&text)?;
    let at = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map(|i| i + 1)
        .unwrap_or(args.len());
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = cli.global.seed;
    let (report, side) = match &cli.command {
        Command::Sample(a) => (commands::sample(a, seed)?, vec![]),
        Command::Fit(a) => (commands::fit(a)?, vec![]),
        Command::Bayes(a) => commands::bayes(a, seed)?,
        Command::Study(a) => (commands::study(a, seed)?, vec![]),
        Command::Gof(a) => (commands::gof(a, seed)?, vec![]),
    };
    let text = report.render(cli.global.format)?;
    for (path, content) in side {
        fs::write(&path, content).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    match &cli.global.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(CliError::runtime)
        }
    }
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
