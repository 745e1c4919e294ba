use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use szlab_core::runner::{self, Experiment, ExperimentConfig, Formats, Status, DEFAULT_SEED};

/// Experiments on the Suzuki groups Sz(q): exact small-q checks and sampled
/// measurements, written as JSON/CSV reports with a hash manifest.
#[derive(Parser, Debug)]
#[command(name = "szlab", version)]
struct Cli {
    /// Master seed [default: 42, or the config file's `seed`].
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for reports and manifests.
    #[arg(long, global = true, default_value = "szlab-out")]
    out_dir: PathBuf,

    /// TOML key-value file with experiment parameters.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write JSON reports (default: both formats unless one is chosen).
    #[arg(long, global = true)]
    json: bool,

    /// Write CSV reports.
    #[arg(long, global = true)]
    csv: bool,

    /// Override one parameter, `key=value` in TOML syntax. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Field size q = 2^m.
    #[arg(long)]
    q: Option<u64>,

    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exhaustive field identities.
    FieldCheck(RunArgs),
    /// Enumerate Sz(q): orders, factorization, subfield subgroup.
    Enumerate(RunArgs),
    /// Generation and girth of random pairs.
    Girth(RunArgs),
    /// Kesten bound and the sigma estimators.
    Walk(RunArgs),
    /// Exact non-concentration and the Cauchy-Schwarz step.
    Nonconc(RunArgs),
    /// Second eigenvalue of Cayley graphs.
    Spectral(RunArgs),
    /// Twisted root counting and zero probabilities.
    Polycount(RunArgs),
    /// Word-law witnesses and Borel solvability.
    Wordlaw(RunArgs),
    /// SL2 trace distribution.
    Sl2Trace(RunArgs),
    /// Merge manifests into summary.json / summary.csv.
    Summarize {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
    },
}

fn experiment_of(c: &Command) -> Option<(Experiment, &RunArgs)> {
    Some(match c {
        Command::FieldCheck(a) => (Experiment::FieldCheck, a),
        Command::Enumerate(a) => (Experiment::Enumerate, a),
        Command::Girth(a) => (Experiment::Girth, a),
        Command::Walk(a) => (Experiment::Walk, a),
        Command::Nonconc(a) => (Experiment::Nonconc, a),
        Command::Spectral(a) => (Experiment::Spectral, a),
        Command::Polycount(a) => (Experiment::Polycount, a),
        Command::Wordlaw(a) => (Experiment::Wordlaw, a),
        Command::Sl2Trace(a) => (Experiment::Sl2Trace, a),
        Command::Summarize { .. } => return None,
    })
}

fn build_config(cli: &Cli, e: Experiment, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::new(e, DEFAULT_SEED);
    if let Some(path) = &cli.config {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        c.apply_toml(&text)?;
    }
    if let Some(q) = args.q {
        c.set_q(q)?;
    }
    for s in &cli.sets {
        c.apply_assignment(s)?;
    }
    if let Some(seed) = cli.seed {
        c.seed = seed;
    }
    Ok(c)
}

/// 0: every asserted criterion passed; 1: a criterion failed.
fn execute(cli: &Cli) -> Result<u8> {
    let formats = if cli.json || cli.csv {
        Formats {
            json: cli.json,
            csv: cli.csv,
        }
    } else {
        Formats::default()
    };
    let Some((e, args)) = experiment_of(&cli.command) else {
        let Command::Summarize { manifests } = &cli.command else {
            unreachable!()
        };
        let s = runner::summarize(manifests)?;
        for p in s.write(&cli.out_dir)? {
            println!("wrote {}", p.display());
        }
        println!("{} rows from {} runs", s.rows.len(), s.runs.len());
        return Ok(0);
    };
    let config = build_config(cli, e, args)?;
    if args.print_config {
        println!("{}", serde_json::to_string_pretty(&config.to_value())?);
        return Ok(0);
    }
    let r = runner::run(&config, &cli.out_dir, formats)?;
    for o in &r.outcomes {
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ReportOnly => "REPORT",
        };
        println!("criterion {:>2} {tag}  {}: {}", o.id, o.title, o.detail);
    }
    println!(
        "manifest {} ({})",
        r.manifest_path.display(),
        r.manifest.run_id
    );
    Ok(if r.manifest.passed() { 0 } else { 1 })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<szlab_core::Error>() {
        Some(szlab_core::Error::Inconsistent(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
