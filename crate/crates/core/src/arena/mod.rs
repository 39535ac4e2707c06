//! Playing games, recording them, and checking the records.

mod game;
mod sweep;
mod transcript;
mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{LevelReport, StrategyError, StrategySpec};
use crate::partition::Color;
use crate::partitioner::PartitionerError;
use crate::poset::{ElementId, PosetError};

pub use game::{play, run_game, run_spec};
pub use sweep::{sweep, write_csv, SweepConfig, SweepError, SweepRow};
pub use transcript::{Anchor, Header, Round, Transcript, FORMAT_VERSION};
pub use verify::{audit, verify_transcript, Audit};

/// Colors may fall short of a fractional bound by at most this much.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error("illegal partition move in round {round}: color {color} for {element} conflicts with {conflict}")]
    IllegalPartitionMove { round: u32, element: ElementId, color: Color, conflict: String },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Partitioner(#[from] PartitionerError),
    #[error("strategy produced an inconsistent move in round {round}: {source}")]
    BadMove { round: u32, source: PosetError },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    Header,
    Sequence,
    Poset,
    ChainPartition,
    ExtensionGrowth,
    Realizer,
    Replay,
    Strategy,
    SamePoset,
    Rainbow,
    Separation,
    Stage,
    Threshold,
    ColorAccounting,
    Width,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Header => "header",
            ViolationKind::Sequence => "sequence",
            ViolationKind::Poset => "poset",
            ViolationKind::ChainPartition => "chain-partition",
            ViolationKind::ExtensionGrowth => "extension-growth",
            ViolationKind::Realizer => "realizer",
            ViolationKind::Replay => "replay",
            ViolationKind::Strategy => "strategy",
            ViolationKind::SamePoset => "same-poset",
            ViolationKind::Rainbow => "rainbow",
            ViolationKind::Separation => "separation",
            ViolationKind::Stage => "stage",
            ViolationKind::Threshold => "threshold",
            ViolationKind::ColorAccounting => "color-accounting",
            ViolationKind::Width => "width",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub round: Option<u32>,
    pub message: String,
}

impl Violation {
    pub fn new(kind: ViolationKind, round: Option<u32>, message: impl Into<String>) -> Self {
        Violation { kind, round, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.round {
            Some(r) => write!(f, "[{}] round {r}: {}", self.kind, self.message),
            None => write!(f, "[{}] {}", self.kind, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub strategy: StrategySpec,
    pub partitioner: String,
    pub seed: Option<u64>,
    pub points: usize,
    pub colors: usize,
    pub width: usize,
    pub bound: f64,
    pub bound_met: bool,
    pub levels: Vec<LevelReport>,
    /// Whether the strategy's final realizer intersects to the presented poset.
    pub realizer_ok: Option<bool>,
    pub violations: Vec<Violation>,
}

impl GameReport {
    pub fn is_ok(&self) -> bool {
        self.bound_met && self.violations.is_empty()
    }
}

pub(crate) fn format_bound(b: f64) -> String {
    if b.fract() == 0.0 {
        format!("{b:.0}")
    } else {
        format!("{b:.3}")
    }
}

impl fmt::Display for GameReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} vs {}: {} points, {} colors, bound {}, {}",
            self.strategy,
            self.partitioner,
            self.points,
            self.colors,
            format_bound(self.bound),
            if self.is_ok() { "OK" } else { "FAIL" }
        )?;
        write!(f, "\nwidth {}", self.width)?;
        if let Some(ok) = self.realizer_ok {
            write!(f, ", realizer {}", if ok { "valid" } else { "invalid" })?;
        }
        for l in &self.levels {
            write!(
                f,
                "\nlevel {}: t = {}, {} separator colors, threshold {:.3}",
                l.level_width, l.t, l.separator_colors, l.threshold
            )?;
        }
        write!(f, "\n{} violations", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}
