//! Command-line front-end; see the `cli` module of the library for the config schema.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use statdisc::cli::{parse_config, run_scenario, Command, Format, ScenarioConfig, EXIT_PARSE, EXIT_RUNTIME};

#[derive(Parser, Debug)]
#[command(name = "statdisc", version, about = "Stationary discs of strongly pseudoconvex hypersurfaces")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON scenario config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the report and disc samples; the report goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn load(args: &Args) -> anyhow::Result<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(args: &Args, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let samples = match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Some(dir.join("samples.csv"))
        }
        None => None,
    };
    let report = run_scenario(args.command, cfg, samples.as_deref());
    let text = report.render(args.format);
    match &args.out {
        Some(dir) => {
            let ext = match args.format {
                Format::Json => "json",
                Format::Csv => "csv",
            };
            let path = dir.join(format!("report.{ext}"));
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{text}"),
    }
    if let Some(e) = &report.error {
        eprintln!("statdisc: {e}");
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("statdisc: {e:#}");
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    match run(&args, &cfg) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("statdisc: {e:#}");
            ExitCode::from(EXIT_RUNTIME as u8)
        }
    }
}
