//! `womp` command-line interface.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_config, render};
use crate::error::{Error, Result};
use crate::experiments::{run_sweep, ExperimentConfig};
use crate::index_sets::hyperbolic_cross;
use crate::verify::{self, Fault, VerifyOptions};

pub const OUTPUT_FILES: &[&str] = &[
    "errors.csv",
    "support.csv",
    "runtimes.csv",
    "report.json",
    "config.txt",
];

#[derive(Debug, Parser)]
#[command(name = "womp", version, about = "Sparse polynomial approximation with weighted OMP")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the multi-trial study and write CSV/JSON artifacts.
    Run(RunArgs),
    /// Run the built-in oracle checks.
    Verify(VerifyArgs),
    /// Print the resolved configuration and derived sizes.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for trials (default: all cores). Use 1 for timing runs.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
    /// `key=value` overrides applied after the file.
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    DeltaSign,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, hide = true, value_enum)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub config: PathBuf,
    pub overrides: Vec<String>,
}

fn resolve(path: &Path, overrides: &[String], seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut all = overrides.to_vec();
    if let Some(seed) = seed {
        all.push(format!("seed={seed}"));
    }
    parse_config(path, &all)
}

fn remove_outputs(dir: &Path) {
    for name in OUTPUT_FILES {
        let _ = fs::remove_file(dir.join(name));
    }
}

fn write_outputs(dir: &Path, report: &crate::experiments::ExperimentReport) -> Result<()> {
    let create = |name: &str| -> Result<io::BufWriter<fs::File>> {
        Ok(io::BufWriter::new(fs::File::create(dir.join(name))?))
    };
    let mut f = create("errors.csv")?;
    report.write_errors_csv(&mut f)?;
    f.flush()?;
    let mut f = create("support.csv")?;
    report.write_support_csv(&mut f)?;
    f.flush()?;
    let mut f = create("runtimes.csv")?;
    report.write_runtimes_csv(&mut f)?;
    f.flush()?;
    let mut f = create("report.json")?;
    report.write_json(&mut f)?;
    writeln!(f)?;
    f.flush()?;
    fs::write(dir.join("config.txt"), render(&report.config))?;
    Ok(())
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = resolve(&args.config, &args.overrides, args.seed)?;
    if !args.force {
        if let Some(existing) = OUTPUT_FILES.iter().find(|n| args.out.join(n).exists()) {
            return Err(Error::Config(format!(
                "{} already exists; pass --force to overwrite",
                args.out.join(existing).display()
            )));
        }
    }
    fs::create_dir_all(&args.out)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let result = pool
        .install(|| run_sweep(&cfg))
        .and_then(|report| write_outputs(&args.out, &report).map(|_| report));
    match result {
        Ok(report) => {
            write!(out, "{}", report.summary())?;
            writeln!(out, "wrote {} to {}", OUTPUT_FILES.join(", "), args.out.display())?;
            Ok(())
        }
        Err(e) => {
            remove_outputs(&args.out);
            Err(e)
        }
    }
}

/// Returns whether every check passed.
pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let mut opts = VerifyOptions::default();
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    opts.fault = args.inject_fault.map(|FaultArg::DeltaSign| Fault::DeltaSign);
    let results = verify::run_all(&opts);
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
    if failed.is_empty() {
        writeln!(out, "all {} checks passed", results.len())?;
    } else {
        writeln!(
            out,
            "{} check(s) failed: {}",
            failed.len(),
            failed.iter().map(|r| r.name).collect::<Vec<_>>().join(", ")
        )?;
    }
    Ok(failed.is_empty())
}

pub fn cmd_info(args: &InfoArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = resolve(&args.config, &args.overrides, None)?;
    let set = hyperbolic_cross(cfg.dimension, cfg.cross_order)?;
    write!(out, "{}", render(&cfg))?;
    writeln!(out, "# derived")?;
    writeln!(out, "d={} s={} N={}", cfg.dimension, cfg.cross_order, set.cardinality())?;
    writeln!(
        out,
        "reference_samples={}",
        cfg.reference_oversampling * set.cardinality()
    )?;
    Ok(())
}

/// Dispatches a parsed command and maps the outcome to an exit status.
pub fn run(cli: Cli) -> i32 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, &mut out).map(|_| true),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Info(a) => cmd_info(a, &mut out).map(|_| true),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
