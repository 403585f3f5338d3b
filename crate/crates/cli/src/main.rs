mod args;
mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::Cli;
use commands::{write_file, UsageError};

const EXIT_USAGE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_IO: u8 = 3;

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn execute(cli: &Cli, argv: &[String]) -> anyhow::Result<()> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let outcome = commands::run(&cli.command, &cli.common)?;
    let rendered = outcome.report.render(cli.common.format)?;
    match (&cli.common.out, outcome.artifact) {
        (Some(out), Some(bytes)) => {
            write_file(out, &bytes)?;
            print!("{rendered}");
        }
        (Some(out), None) => write_file(out, rendered.as_bytes())?,
        (None, _) => print!("{rendered}"),
    }
    if let Some(out) = &cli.common.out {
        let manifest = json!({
            "tool": "sqrex",
            "version": env!("CARGO_PKG_VERSION"),
            "command": cli.command.name(),
            "argv": argv,
            "seed": cli.common.seed,
            "format": format!("{:?}", cli.common.format).to_lowercase(),
            "threads": cli.common.threads,
        });
        write_file(&manifest_path(out), (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match execute(&cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(e) = err.downcast_ref::<sqrex_core::Error>() {
                println!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
                ExitCode::from(EXIT_DOMAIN)
            } else if err.downcast_ref::<UsageError>().is_some() {
                eprintln!("error: {err}");
                ExitCode::from(EXIT_USAGE)
            } else if err.downcast_ref::<std::io::Error>().is_some() {
                eprintln!("error: {err:#}");
                ExitCode::from(EXIT_IO)
            } else {
                eprintln!("error: {err:#}");
                ExitCode::from(EXIT_USAGE)
            }
        }
    }
}
