use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use quatchains::harness::{
    cmd_cache, cmd_constants, cmd_count, cmd_equidistribute, cmd_verify, ExperimentConfig, HarnessError,
};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Verify,
    Count,
    Equidistribute,
    Cache,
    Constants,
}

/// Cartan chain experiments over the Hurwitz order.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, env = "QCHAIN_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, env = "QCHAIN_EPSILON_MIN")]
    epsilon_min: Option<String>,
    /// Maximal word length of the orbit search.
    #[arg(long, env = "QCHAIN_DEPTH")]
    depth: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "QCHAIN_WORKERS")]
    workers: Option<String>,
    #[arg(long, env = "QCHAIN_SEED")]
    seed: Option<String>,
    /// Output directory.
    #[arg(long, env = "QCHAIN_OUT")]
    out: Option<String>,
}

fn config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let overrides = [
        ("eps_min", &cli.epsilon_min),
        ("depth", &cli.depth),
        ("workers", &cli.workers),
        ("seed", &cli.seed),
        ("out", &cli.out),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v, 0)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let cfg = config(cli)?;
    match cli.command {
        Command::Verify => {
            let (report, path) = cmd_verify(&cfg)?;
            for g in &report.groups {
                let status = if g.passed { "pass" } else { "FAIL" };
                println!("{status}  {:<22} {:<42} {:>7} checks", g.module, g.name, g.checks);
                if let Some(w) = &g.witness {
                    println!("      witness: {w}");
                }
            }
            println!("{} passed, {} failed; report written to {}", report.passed, report.failed, path.display());
            if !report.ok() {
                return Err(HarnessError::Invariant(format!("{} invariant groups failed", report.failed)));
            }
        }
        Command::Count => {
            let out = cmd_count(&cfg)?;
            print!("{}", out.summary());
            println!("{} classes ({:?}); wrote {}", out.classes, out.source, join(&out.files));
        }
        Command::Equidistribute => {
            let out = cmd_equidistribute(&cfg)?;
            print!("{}", out.summary());
            println!("wrote {} files under {}", out.files.len(), cfg.out.display());
        }
        Command::Cache => {
            let out = cmd_cache(&cfg)?;
            println!(
                "{} classes, new per depth {:?}, exhausted {}; wrote {}",
                out.classes,
                out.new_per_depth,
                out.exhausted,
                out.path.display()
            );
        }
        Command::Constants => {
            let (c, path) = cmd_constants(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&c).expect("plain data serializes"));
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn join(files: &[PathBuf]) -> String {
    files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
