use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use vubqc_core::scenario::{
    execute_audit, execute_run, AuditConfig, Execution, ModeFlag, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "vubqc",
    version,
    about = "Blind and verifiable MBQC sessions and audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; defaults to $VUBQC_REPORT_DIR/<digest>.json or ./reports/<digest>.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sample,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol session.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Blindness, incorrectness, bound or partition audit.
    Audit {
        #[command(flatten)]
        common: Common,
        /// Overrides the mode in the config.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Threads for independent analysis cells.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn read_config<T>(path: &Path, parse: fn(&str) -> vubqc_core::Result<T>) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn report_path(out: Option<PathBuf>, digest: &str) -> PathBuf {
    out.unwrap_or_else(|| {
        let dir = std::env::var_os("VUBQC_REPORT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("reports"));
        dir.join(format!("{digest}.json"))
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn execute(command: Command) -> Result<(Execution, Option<PathBuf>)> {
    match command {
        Command::Run { common } => {
            let mut config = read_config(&common.config, RunConfig::from_json)?;
            if let Some(seed) = common.seed {
                config.seed = seed;
            }
            Ok((
                Execution {
                    report: execute_run(&config)?,
                    csv: None,
                },
                common.out,
            ))
        }
        Command::Audit { common, mode, jobs } => {
            let mut config = read_config(&common.config, AuditConfig::from_json)?;
            if let Some(seed) = common.seed {
                config.seed = seed;
            }
            match mode {
                Some(Mode::Exact) => config.mode = ModeFlag::Exact,
                Some(Mode::Sample) => config.mode = ModeFlag::Sample,
                None => {}
            }
            Ok((execute_audit(&config, jobs)?, common.out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command).and_then(|(execution, out)| {
        let report = &execution.report;
        let path = report_path(out, &report.config_digest);
        write(&path, &report.to_json())?;
        if let Some(csv) = &execution.csv {
            write(&path.with_extension("csv"), csv)?;
        }
        let verdict = match report.accept {
            Some(true) => "accept",
            Some(false) => "reject",
            None if report.pass => "pass",
            None => "fail",
        };
        println!(
            "{} {} ({}) -> {}",
            report.command,
            verdict,
            report.mode,
            path.display()
        );
        Ok(report.exit_code())
    }) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
