//! The chain-assigning side of the game.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::order::LinearOrder;
use crate::partition::{ChainPartition, Color};
use crate::poset::{ElementId, Poset};

#[derive(Debug, Error)]
pub enum PartitionerError {
    #[error("input closed, game aborted")]
    Aborted,
    #[error("prompt channel: {0}")]
    Io(#[from] std::io::Error),
    #[error("no recorded color for round {0}")]
    ReplayExhausted(u32),
}

/// What the partitioner may look at when coloring `element`. The poset
/// already contains `element`; the partition does not.
#[derive(Debug, Clone, Copy)]
pub struct PartitionerView<'a> {
    pub round: u32,
    pub element: ElementId,
    pub below: &'a BTreeSet<ElementId>,
    pub above: &'a BTreeSet<ElementId>,
    pub poset: &'a Poset,
    pub partition: &'a ChainPartition,
    /// The presented extensions, `element` included.
    pub extensions: Option<&'a [LinearOrder]>,
    pub positions: Option<&'a [(usize, Option<ElementId>)]>,
}

impl PartitionerView<'_> {
    /// Existing colors that `element` may join.
    pub fn valid_colors(&self) -> Vec<Color> {
        self.partition.chain_compatible_colors(self.poset, self.element)
    }

    pub fn is_legal(&self, color: Color) -> bool {
        color.0 > 0 && self.partition.conflict(self.poset, self.element, color).is_none()
    }
}

pub trait Partitioner: Send {
    fn name(&self) -> &str;

    fn seed(&self) -> Option<u64> {
        None
    }

    fn choose(&mut self, view: &PartitionerView<'_>) -> Result<Color, PartitionerError>;
}

/// The automatic partitioners, by command-line name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionerKind {
    FirstFit,
    Random,
}

impl PartitionerKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "first-fit" => Some(PartitionerKind::FirstFit),
            "random" => Some(PartitionerKind::Random),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PartitionerKind::FirstFit => "first-fit",
            PartitionerKind::Random => "random",
        }
    }

    pub fn build(self, seed: u64) -> Box<dyn Partitioner> {
        match self {
            PartitionerKind::FirstFit => Box::new(FirstFit),
            PartitionerKind::Random => Box::new(RandomValid::new(seed)),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct FirstFit;

impl Partitioner for FirstFit {
    fn name(&self) -> &str {
        "first-fit"
    }

    fn choose(&mut self, view: &PartitionerView<'_>) -> Result<Color, PartitionerError> {
        let mut c = 1;
        while view.partition.conflict(view.poset, view.element, Color(c)).is_some() {
            c += 1;
        }
        Ok(Color(c))
    }
}

/// Uniform over the valid existing colors plus one fresh color.
#[derive(Debug, Clone)]
pub struct RandomValid {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomValid {
    pub fn new(seed: u64) -> Self {
        RandomValid { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Partitioner for RandomValid {
    fn name(&self) -> &str {
        "random"
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn choose(&mut self, view: &PartitionerView<'_>) -> Result<Color, PartitionerError> {
        let mut options = view.valid_colors();
        options.push(view.partition.fresh_color());
        Ok(options[self.rng.gen_range(0..options.len())])
    }
}

/// Re-issues recorded colors, one per round.
#[derive(Debug, Clone)]
pub struct Replay {
    name: String,
    colors: Vec<Color>,
}

impl Replay {
    pub fn new(name: impl Into<String>, colors: Vec<Color>) -> Self {
        Replay { name: name.into(), colors }
    }
}

impl Partitioner for Replay {
    fn name(&self) -> &str {
        &self.name
    }

    fn choose(&mut self, view: &PartitionerView<'_>) -> Result<Color, PartitionerError> {
        let i = view.round.checked_sub(1).ok_or(PartitionerError::ReplayExhausted(view.round))? as usize;
        self.colors.get(i).copied().ok_or(PartitionerError::ReplayExhausted(view.round))
    }
}

/// Asks a person, one line per round.
pub struct Human<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> Human<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Human { input, output }
    }

    pub fn into_inner(self) -> (R, W) {
        (self.input, self.output)
    }
}

fn id_list<'a>(ids: impl IntoIterator<Item = &'a ElementId>) -> String {
    ids.into_iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// `element N: below={..} above={..} incomparable={..}; chains: 1:[..]; color?`
pub fn prompt_line(view: &PartitionerView<'_>) -> String {
    let incomparable: BTreeSet<ElementId> = view
        .poset
        .elements()
        .iter()
        .copied()
        .filter(|&x| x != view.element && !view.poset.comparable(x, view.element))
        .collect();
    let mut s = format!(
        "element {}: below={{{}}} above={{{}}} incomparable={{{}}}; chains:",
        view.element,
        id_list(view.below),
        id_list(view.above),
        id_list(&incomparable)
    );
    for (c, members) in view.partition.classes() {
        let _ = write!(s, " {c}:[{}]", id_list(members));
    }
    if let Some(positions) = view.positions {
        s.push_str("; positions:");
        for (slot, anchor) in positions {
            match anchor {
                Some(a) => {
                    let _ = write!(s, " {slot}:above {a}");
                }
                None => {
                    let _ = write!(s, " {slot}:bottom");
                }
            }
        }
    }
    s.push_str("; color?");
    s
}

impl<R: BufRead + Send, W: Write + Send> Partitioner for Human<R, W> {
    fn name(&self) -> &str {
        "human"
    }

    fn choose(&mut self, view: &PartitionerView<'_>) -> Result<Color, PartitionerError> {
        writeln!(self.output, "{}", prompt_line(view))?;
        loop {
            self.output.flush()?;
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Err(PartitionerError::Aborted);
            }
            let text = line.trim();
            let color = match text.parse::<u32>() {
                Ok(c) if c > 0 => Color(c),
                _ => {
                    writeln!(self.output, "not a color: {text:?}; enter a positive integer")?;
                    continue;
                }
            };
            match view.partition.conflict(view.poset, view.element, color) {
                None => return Ok(color),
                Some(x) => writeln!(
                    self.output,
                    "color {color} rejected: {} and {x} are incomparable; color?",
                    view.element
                )?,
            }
        }
    }
}
