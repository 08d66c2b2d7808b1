use c1einstein::commands::{run, EXIT_USAGE};
use c1einstein::config::{Command, ConfigError, RunConfig};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "c1einstein", version, about = "Cohomogeneity-one Einstein metrics: solve, scan, verify, report")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one diagram and write solution.csv, constants.txt, diagnostics.json
    Solve(Args),
    /// Residual map over a box of unknowns, then polish the best points
    Scan(Args),
    /// Solve and run every certificate for the diagram
    Verify(Args),
    /// Solve and print the constants table
    Report(Args),
}

#[derive(clap::Args)]
struct Args {
    /// su2_s4, so3_s4, su2_cp2, so3_cp2, su2_cp2bar, so3_s2xs2 or so3_hitchin
    #[arg(long)]
    diagram: Option<String>,
    /// Hitchin index
    #[arg(long)]
    k: Option<i64>,
    /// Flat `key = value` file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default `out/<diagram>`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for scan
    #[arg(long)]
    jobs: Option<usize>,
    /// Shooting convergence bound on the match residual
    #[arg(long)]
    tol: Option<f64>,
    /// Any configuration key, as `key=value` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build(command: Command, a: Args) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::new(command);
    if let Some(p) = &a.config {
        cfg.apply_file(p)?;
    }
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::Invalid(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim(), 0)?;
    }
    if let Some(d) = a.diagram {
        cfg.diagram = d;
    }
    if let Some(k) = a.k {
        cfg.k = Some(k);
    }
    if let Some(o) = a.out {
        cfg.out = Some(o);
    }
    if let Some(j) = a.jobs {
        cfg.jobs = j.max(1);
    }
    if let Some(t) = a.tol {
        cfg.shooting.tol = t;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (command, args) = match cli.command {
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Scan(a) => (Command::Scan, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Report(a) => (Command::Report, a),
    };
    let cfg = match build(command, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let mut stdout = std::io::stdout();
    ExitCode::from(run(&cfg, &mut stdout) as u8)
}
