//! `weylpath` — command-line driver for loop phases, open-path transport,
//! mass-shell trajectories and bare-mass spreads.
//!
//! Exit status: 0 when every embedded check passes, 1 when a check fails,
//! 2 on invalid input (reported as one JSON line on stderr).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{apply_config, output_path, Cli, Command, Common, Format};
use report::Report;

fn error_kind(err: &anyhow::Error) -> &'static str {
    err.chain()
        .find_map(|e| e.downcast_ref::<weylpath::Error>())
        .map(weylpath::Error::kind)
        .unwrap_or("invalid-config")
}

fn fail(kind: &str, message: &str) -> ExitCode {
    let line = serde_json::json!({ "error": kind, "message": message.replace('\n', " ") });
    eprintln!("{line}");
    ExitCode::from(2)
}

fn emit(report: &Report, common: &Common) -> io::Result<()> {
    let mut out: Box<dyn Write> = match &common.output {
        Some(path) => {
            let target = output_path(path);
            if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            Box::new(BufWriter::new(File::create(target)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match common.format {
        Format::Json => report.write_json(&mut out)?,
        Format::Csv => report.write_csv(&mut out)?,
    }
    out.flush()
}

fn run(command: Command) -> anyhow::Result<(Report, Common)> {
    Ok(match command {
        Command::LoopPhase { common, args } => {
            let (common, args) = apply_config(common, args)?;
            (commands::loop_phase(&args)?, common)
        }
        Command::Transport { common, args } => {
            let (common, args) = apply_config(common, args)?;
            (commands::transport(&args)?, common)
        }
        Command::Trajectory { common, args } => {
            let (common, args) = apply_config(common, args)?;
            let table = common.format == Format::Csv;
            (commands::trajectory(&args, table)?, common)
        }
        Command::MassSpread { common, args } => {
            let (common, args) = apply_config(common, args)?;
            (commands::mass_spread(&args, common.seed)?, common)
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => return fail("usage", e.to_string().trim()),
    };
    let (report, common) = match run(cli.command) {
        Ok(done) => done,
        Err(e) => return fail(error_kind(&e), &format!("{e:#}")),
    };
    if let Err(e) = emit(&report, &common) {
        return fail("io", &e.to_string());
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
