use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::game::run_spec;
use super::transcript::Transcript;
use super::{ArenaError, GameReport};
use crate::adversary::StrategySpec;
use crate::partitioner::PartitionerKind;

/// Strategies by name: `szemeredi` (with `k = w`), `theorem1`, `theorem2`.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub strategies: Vec<String>,
    pub partitioners: Vec<PartitionerKind>,
    pub widths: Vec<u32>,
    /// Used by `theorem2` only.
    pub dims: Vec<u32>,
    /// Seeds for `random`; `first-fit` plays once per configuration.
    pub seeds: Vec<u64>,
    /// Where a failing transcript is written.
    pub failure_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub strategy: String,
    pub partitioner: String,
    pub w: u32,
    pub d: Option<u32>,
    pub seed: Option<u64>,
    pub points: usize,
    pub colors: usize,
    pub bound: f64,
    pub bound_met: bool,
    /// Seconds.
    pub runtime: f64,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("{game} failed verification, transcript written to {}: {summary}", path.display())]
    Failed { game: String, path: PathBuf, summary: String },
    #[error("{game}: {source}")]
    Arena { game: String, source: ArenaError },
}

#[derive(Debug, Clone, Copy)]
struct Game {
    spec: StrategySpec,
    partitioner: PartitionerKind,
    seed: Option<u64>,
}

impl Game {
    fn label(&self) -> String {
        match self.seed {
            Some(s) => format!("{} vs {} seed {s}", self.spec, self.partitioner.name()),
            None => format!("{} vs {}", self.spec, self.partitioner.name()),
        }
    }

    fn file_name(&self) -> String {
        let d = self.spec.dim().map(|d| format!("-d{d}")).unwrap_or_default();
        let seed = self.seed.map(|s| format!("-seed{s}")).unwrap_or_default();
        format!("failed-{}-w{}{d}-{}{seed}.jsonl", self.spec.name(), self.spec.width(), self.partitioner.name())
    }
}

fn games(config: &SweepConfig) -> Result<Vec<Game>, SweepError> {
    let mut out = Vec::new();
    for name in &config.strategies {
        for &w in &config.widths {
            let specs: Vec<StrategySpec> = match name.as_str() {
                "szemeredi" => vec![StrategySpec::Szemeredi { w, k: w }],
                "theorem1" => vec![StrategySpec::Theorem1 { w }],
                "theorem2" => config.dims.iter().map(|&d| StrategySpec::Theorem2 { w, d }).collect(),
                _ => return Err(SweepError::UnknownStrategy(name.clone())),
            };
            for spec in specs {
                for &partitioner in &config.partitioners {
                    match partitioner {
                        PartitionerKind::FirstFit => out.push(Game { spec, partitioner, seed: None }),
                        PartitionerKind::Random => {
                            out.extend(config.seeds.iter().map(|&s| Game { spec, partitioner, seed: Some(s) }))
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn play_one(g: Game) -> Result<(Transcript, GameReport, f64), ArenaError> {
    let start = Instant::now();
    let mut partitioner = g.partitioner.build(g.seed.unwrap_or(0));
    let (t, r) = run_spec(g.spec, partitioner.as_mut())?;
    Ok((t, r, start.elapsed().as_secs_f64()))
}

/// One verified row per game, in configuration order. Games run in
/// parallel; the first failing game in configuration order aborts the
/// sweep and its transcript is kept.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    let games = games(config)?;
    let results: Vec<_> = games.par_iter().map(|&g| play_one(g)).collect();
    let mut rows = Vec::with_capacity(games.len());
    for (g, res) in games.iter().zip(results) {
        let (t, report, runtime) = res.map_err(|source| SweepError::Arena { game: g.label(), source })?;
        if !report.is_ok() {
            let path = config.failure_dir.join(g.file_name());
            t.write(&path).map_err(|source| SweepError::Arena { game: g.label(), source })?;
            let summary = match report.violations.first() {
                Some(v) => format!("{} violations, first: {v}", report.violations.len()),
                None => format!("{} colors below bound {}", report.colors, report.bound),
            };
            return Err(SweepError::Failed { game: g.label(), path, summary });
        }
        rows.push(SweepRow {
            strategy: g.spec.name().to_string(),
            partitioner: g.partitioner.name().to_string(),
            w: g.spec.width(),
            d: g.spec.dim(),
            seed: g.seed,
            points: report.points,
            colors: report.colors,
            bound: report.bound,
            bound_met: report.bound_met,
            runtime,
        });
    }
    Ok(rows)
}

pub fn write_csv(rows: &[SweepRow], out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
