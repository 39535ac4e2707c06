//! `olcp`: play, verify and tabulate on-line chain partitioning games.
//!
//! Exit status is 0 on success, 1 when a game or transcript fails a check
//! or misses its bound, and 2 on a usage error.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use olcp::adversary::StrategySpec;
use olcp::arena::{audit, run_spec, sweep, write_csv, SweepConfig, Transcript, BOUND_TOLERANCE};
use olcp::partitioner::{Human, Partitioner, PartitionerKind};

#[derive(Parser, Debug)]
#[command(name = "olcp", version, about = "On-line chain partitioning games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play one game and print its report.
    Play(PlayArgs),
    /// Replay a transcript and list every violation.
    Verify {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Play a grid of games and write one CSV row per game.
    Table(TableArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StrategyName {
    Szemeredi,
    Theorem1,
    Theorem2,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PartitionerName {
    FirstFit,
    Random,
    Human,
}

#[derive(Args, Debug)]
struct PlayArgs {
    #[arg(long, value_enum)]
    strategy: StrategyName,
    #[arg(long)]
    width: u32,
    /// Number of presented extensions (theorem2 only, at least 2).
    #[arg(long)]
    dim: Option<u32>,
    /// Szemeredi only; defaults to the width.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_enum)]
    partitioner: PartitionerName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the transcript.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    strategies: Vec<StrategyName>,
    #[arg(long)]
    width_max: u32,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    dims: Vec<u32>,
    /// Random-partitioner games use seeds 0..N.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "first-fit,random")]
    partitioners: Vec<PartitionerName>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn strategy_spec(a: &PlayArgs) -> Result<StrategySpec, String> {
    if a.width == 0 {
        return Err("--width must be at least 1".into());
    }
    if a.strategy != StrategyName::Theorem2 && a.dim.is_some() {
        return Err("--dim applies to theorem2 only".into());
    }
    if a.strategy != StrategyName::Szemeredi && a.k.is_some() {
        return Err("--k applies to szemeredi only".into());
    }
    Ok(match a.strategy {
        StrategyName::Szemeredi => {
            let k = a.k.unwrap_or(a.width);
            if k == 0 || k > a.width {
                return Err(format!("--k must lie in 1..={}", a.width));
            }
            StrategySpec::Szemeredi { w: a.width, k }
        }
        StrategyName::Theorem1 => StrategySpec::Theorem1 { w: a.width },
        StrategyName::Theorem2 => match a.dim {
            Some(d) if d >= 2 => StrategySpec::Theorem2 { w: a.width, d },
            Some(_) => return Err("--dim must be at least 2".into()),
            None => return Err("theorem2 needs --dim".into()),
        },
    })
}

fn play(a: &PlayArgs) -> Result<ExitCode> {
    let spec = match strategy_spec(a) {
        Ok(s) => s,
        Err(msg) => return Ok(usage(&msg)),
    };
    let mut partitioner: Box<dyn Partitioner> = match a.partitioner {
        PartitionerName::FirstFit => PartitionerKind::FirstFit.build(a.seed),
        PartitionerName::Random => PartitionerKind::Random.build(a.seed),
        PartitionerName::Human => Box::new(Human::new(io::BufReader::new(io::stdin()), io::stdout())),
    };
    let (transcript, report) = run_spec(spec, partitioner.as_mut())?;
    if let Some(path) = &a.out {
        transcript.write(path)?;
    }
    println!("{report}");
    Ok(if report.is_ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify(path: &Path) -> Result<ExitCode> {
    let t = Transcript::read(path)?;
    let a = audit(&t);
    let bound = t.header.strategy_spec().map(|s| s.bound()).unwrap_or(f64::NAN);
    let bound_met = a.colors as f64 + BOUND_TOLERANCE >= bound;
    let mut out = io::stdout().lock();
    writeln!(out, "{}: {} points, {} colors, width {}", path.display(), a.points, a.colors, a.width)?;
    for v in &a.violations {
        writeln!(out, "  {v}")?;
    }
    writeln!(out, "{} violations", a.violations.len())?;
    if !bound_met {
        writeln!(out, "bound {bound:.3} not met")?;
    }
    Ok(if a.violations.is_empty() && bound_met { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn table(a: &TableArgs) -> Result<ExitCode> {
    if a.width_max == 0 {
        return Ok(usage("--width-max must be at least 1"));
    }
    if a.strategies.contains(&StrategyName::Theorem2) && a.dims.iter().any(|&d| d < 2) {
        return Ok(usage("--dims must be at least 2"));
    }
    let mut partitioners = Vec::new();
    for p in &a.partitioners {
        match p {
            PartitionerName::FirstFit => partitioners.push(PartitionerKind::FirstFit),
            PartitionerName::Random => partitioners.push(PartitionerKind::Random),
            PartitionerName::Human => return Ok(usage("the human partitioner is only available with play")),
        }
    }
    let failure_dir = match a.out.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let config = SweepConfig {
        strategies: a
            .strategies
            .iter()
            .map(|s| s.to_possible_value().expect("named variant").get_name().to_string())
            .collect(),
        partitioners,
        widths: (1..=a.width_max).collect(),
        dims: a.dims.clone(),
        seeds: (0..a.seeds).collect(),
        failure_dir,
    };
    let rows = match sweep(&config) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(1));
        }
    };
    let file = std::fs::File::create(&a.out).with_context(|| format!("{}", a.out.display()))?;
    write_csv(&rows, io::BufWriter::new(file)).with_context(|| format!("{}", a.out.display()))?;
    println!("{} games verified, table written to {}", rows.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match &cli.command {
        Command::Play(a) => play(a),
        Command::Verify { input } => verify(input),
        Command::Table(a) => table(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}
