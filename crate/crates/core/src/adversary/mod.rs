//! The poset-building side of the game.
//!
//! Three strategies are provided: Szemerédi's `R(k, w)`, the two-dimensional
//! strategy `S(w)` that hides its realizer, and `S(d, w)`, which must show a
//! realizer of size `d` every round. Each one emits a [`Move`] per round,
//! consumes the partitioner's color, and when finished hands out a
//! [`Certificate`] the arena checks against the presented poset.

pub mod bounds;
pub mod rainbow;
pub mod szemeredi;
pub mod theorem1;
pub mod theorem2;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::BuilderError;
use crate::order::{LinearOrder, Realizer};
use crate::partition::{ChainPartition, Color, PartitionError};
use crate::poset::{ElementId, Poset, PosetError};

pub use rainbow::{LevelReport, RainbowChains};
pub use szemeredi::SzemerediStrategy;
pub use theorem1::Theorem1Strategy;
pub use theorem2::Theorem2Strategy;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("strategy is exhausted")]
    Exhausted,
    #[error("strategy has not finished")]
    NotDone,
    #[error("strategy invariant violated: {0}")]
    InvariantViolated(String),
    #[error("bad strategy parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Builder(#[from] BuilderError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// One round of the adversary: a fresh element and its relations to every
/// earlier element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub element: ElementId,
    pub below: BTreeSet<ElementId>,
    pub above: BTreeSet<ElementId>,
    /// `(extension slot, element the new one sits directly above)`, present
    /// only when the realizer is shown to the partitioner.
    pub extension_positions: Option<Vec<(usize, Option<ElementId>)>>,
    /// Width of the innermost recursion level that produced the point.
    pub level: u32,
    /// Stage of that level (1 or 2).
    pub stage: u8,
}

/// Which strategy to play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrategySpec {
    Szemeredi { w: u32, k: u32 },
    Theorem1 { w: u32 },
    Theorem2 { w: u32, d: u32 },
}

impl StrategySpec {
    pub fn width(&self) -> u32 {
        match *self {
            StrategySpec::Szemeredi { w, .. } | StrategySpec::Theorem1 { w } | StrategySpec::Theorem2 { w, .. } => w,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrategySpec::Szemeredi { .. } => "szemeredi",
            StrategySpec::Theorem1 { .. } => "theorem1",
            StrategySpec::Theorem2 { .. } => "theorem2",
        }
    }

    pub fn dim(&self) -> Option<u32> {
        match *self {
            StrategySpec::Theorem2 { d, .. } => Some(d),
            _ => None,
        }
    }

    /// The number of colors the strategy guarantees.
    pub fn bound(&self) -> f64 {
        match *self {
            StrategySpec::Szemeredi { w, .. } => bounds::szemeredi_bound(w) as f64,
            StrategySpec::Theorem1 { w } => bounds::theorem1_total(w),
            StrategySpec::Theorem2 { w, d } => bounds::theorem2_total(w, d).unwrap_or(f64::NAN),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Adversary>, StrategyError> {
        Ok(match *self {
            StrategySpec::Szemeredi { w, k } => Box::new(SzemerediStrategy::new(i64::from(k), w)?),
            StrategySpec::Theorem1 { w } => Box::new(Theorem1Strategy::new(w)?),
            StrategySpec::Theorem2 { w, d } => Box::new(Theorem2Strategy::new(d, w)?),
        })
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Szemeredi { w, k } => write!(f, "R({k},{w})"),
            StrategySpec::Theorem1 { w } => write!(f, "S({w})"),
            StrategySpec::Theorem2 { w, d } => write!(f, "S({d},{w})"),
        }
    }
}

/// `first` must precede `then` in `order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationClaim {
    pub label: String,
    pub order: LinearOrder,
    pub first: BTreeSet<ElementId>,
    pub then: BTreeSet<ElementId>,
}

/// Everything one level of a three-stage strategy claims about its points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCertificate {
    pub width: u32,
    pub stage1: BTreeSet<ElementId>,
    pub stage2: BTreeSet<ElementId>,
    pub stage3: BTreeSet<ElementId>,
    pub c_chains: RainbowChains,
    pub d_chains: RainbowChains,
    pub report: LevelReport,
    pub separations: Vec<SeparationClaim>,
    /// Families of internal orders each of which must realize the level's
    /// poset on stage-one and stage-two points.
    pub realizing_families: Vec<(String, Vec<LinearOrder>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    Szemeredi {
        w: u32,
        k: u32,
        chains: RainbowChains,
        separations: Vec<SeparationClaim>,
        hosts: Vec<LinearOrder>,
    },
    Theorem1 {
        levels: Vec<LevelCertificate>,
        realizer: Realizer,
    },
    Theorem2 {
        d: u32,
        levels: Vec<LevelCertificate>,
        extensions: Vec<LinearOrder>,
    },
}

/// An adversary plays one game: alternate `next_move` and `observe` until
/// `next_move` returns `None`.
pub trait Adversary: Send {
    fn spec(&self) -> StrategySpec;

    /// The move introducing element `e`, or `None` once the strategy is done.
    fn next_move(
        &mut self,
        e: ElementId,
        poset: &Poset,
        partition: &ChainPartition,
    ) -> Result<Option<Move>, StrategyError>;

    /// The color given to the last introduced element. `poset` and
    /// `partition` already include it.
    fn observe(
        &mut self,
        e: ElementId,
        color: Color,
        poset: &Poset,
        partition: &ChainPartition,
    ) -> Result<(), StrategyError>;

    /// The realizer shown to the partitioner, if the strategy shows one.
    fn presented_extensions(&self) -> Option<&[LinearOrder]> {
        None
    }

    fn is_done(&self) -> bool;

    fn certificate(&self, poset: &Poset, partition: &ChainPartition) -> Result<Certificate, StrategyError>;
}

/// Elements before / after `e` in every order.
pub(crate) fn relations_in(orders: &[&LinearOrder], e: ElementId) -> (BTreeSet<ElementId>, BTreeSet<ElementId>) {
    let (first, rest) = orders.split_first().expect("at least one order");
    let pos = first.position(e).expect("element placed");
    let mut below = BTreeSet::new();
    let mut above = BTreeSet::new();
    for (i, x) in first.iter().enumerate() {
        if x == e {
            continue;
        }
        if i < pos {
            if rest.iter().all(|o| o.precedes(x, e)) {
                below.insert(x);
            }
        } else if rest.iter().all(|o| o.precedes(e, x)) {
            above.insert(x);
        }
    }
    (below, above)
}
