use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use levymult::io::{parse_config, run_command, Command};
use levymult::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Symbol,
    Apply,
    Pair,
    Probe,
    Mc,
    GaussianMc,
    Selftest,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Symbol => Command::Symbol,
            Cmd::Apply => Command::Apply,
            Cmd::Pair => Command::Pair,
            Cmd::Probe => Command::Probe,
            Cmd::Mc => Command::Mc,
            Cmd::GaussianMc => Command::GaussianMc,
            Cmd::Selftest => Command::Selftest,
        }
    }
}

/// Fourier multipliers from Lévy processes.
#[derive(Parser, Debug)]
#[command(name = "levymult", version)]
struct Cli {
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides mc.paths or brownian.paths.
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn quote(s: &str) -> String {
    format!("{:?}", s)
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let text = std::fs::read_to_string(&cli.config)?;
    let mut cfg = parse_config(&text)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(p) = cli.paths {
        cfg.mc.paths = p;
        cfg.brownian.paths = p;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.to_string_lossy().into_owned();
    }
    let command = Command::from(cli.command);
    let outcome = run_command(command, &cfg)?;
    print!("{}", outcome.report.to_text());
    let failed = outcome.report.failures();
    if failed.is_empty() {
        println!("RESULT status=PASS command={} checks={}", command.name(), outcome.report.rows.len());
        Ok(true)
    } else {
        println!(
            "RESULT status=FAIL command={} failed={} reason={}",
            command.name(),
            failed.len(),
            quote(&failed.join(";"))
        );
        Ok(false)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            println!("RESULT status=ERROR code={} reason={}", e.code(), quote(&e.to_string()));
            ExitCode::from(2)
        }
    }
}
