use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use topoloc::harness::{self, Execution, InvariantReport, OutputFormat, RunConfig};
use topoloc::models::CATALOG;
use topoloc::{Error, Result};

#[derive(Parser)]
#[command(name = "topoloc", version, about = "Topological invariants of tight-binding models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured task at every sweep point.
    Run(RunArgs),
    /// Check a config without computing anything.
    Validate { config: PathBuf },
    /// Run every configured route and report agreement.
    CrossValidate(RunArgs),
    /// List built-in models and their parameters.
    Models,
}

#[derive(clap::Args)]
struct RunArgs {
    config: PathBuf,
    /// Override the output path from the config.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Override the output format.
    #[arg(short, long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Evaluate sweep points one after another.
    #[arg(long)]
    serial: bool,
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    match s {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        _ => Err(format!("unknown format '{s}' (json or csv)")),
    }
}

fn load(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&args.config).map_err(|e| match e {
        Error::Io(m) => Error::ConfigInvalid { path: String::new(), message: m },
        other => other,
    })?;
    if let Some(p) = &args.output {
        cfg.output.path = Some(p.clone());
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    Ok(cfg)
}

fn emit(report: &Result<InvariantReport>) -> Result<()> {
    let Ok(r) = report else { return Ok(()) };
    match &r.config.output.path {
        Some(_) => r.write()?,
        None => print!("{}", r.render(r.config.output.format)?),
    }
    eprintln!("{} points, {} succeeded, {} failed", r.summary.points, r.summary.succeeded, r.summary.failed);
    Ok(())
}

fn execute(args: &RunArgs, cross: bool) -> i32 {
    let exec = if args.serial { Execution::Serial } else { Execution::Parallel };
    let report = load(args).and_then(|cfg| {
        if cross {
            harness::cross_validate_with(&cfg, exec)
        } else {
            harness::run_with(&cfg, exec)
        }
    });
    if let Err(e) = &report {
        eprintln!("error: {e}");
    }
    if let Err(e) = emit(&report) {
        eprintln!("error: {e}");
        return 2;
    }
    harness::exit_code(&report)
}

fn models() {
    for m in CATALOG {
        println!("{} (d={}, {} orbitals)", m.name, m.d, m.orbitals);
        println!("    {}", m.summary);
        println!("    required: {}", m.required.join(", "));
        if !m.optional.is_empty() {
            let opt: Vec<String> = m.optional.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("    optional: {}", opt.join(", "));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => execute(&args, false),
        Command::CrossValidate(args) => execute(&args, true),
        Command::Validate { config } => match RunConfig::load(&config).and_then(|c| c.validate().map(|p| (c, p))) {
            Ok((c, points)) => {
                let what = c.task.map(|t| t.to_string()).unwrap_or_else(|| "cross-validation".into());
                println!("ok: {} points, {what}", points.len());
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Command::Models => {
            models();
            0
        }
    };
    ExitCode::from(code as u8)
}
