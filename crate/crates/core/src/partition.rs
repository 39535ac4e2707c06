//! Chain partitions: the partitioner's coloring together with round stamps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{ElementId, Poset};

/// A chain label. Labels are opaque; only equality matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub u32);

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("element {0} has no color")]
    Uncolored(ElementId),
    #[error("element {0} is already colored")]
    AlreadyColored(ElementId),
    #[error("colors are positive integers, got 0")]
    ZeroColor,
}

/// Two incomparable elements sharing a color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainViolation {
    pub color: Color,
    pub first: ElementId,
    pub second: ElementId,
}

impl fmt::Display for ChainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "elements {} and {} share color {} but are incomparable", self.first, self.second, self.color)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainPartition {
    color_of: BTreeMap<ElementId, Color>,
    round_of: BTreeMap<ElementId, u32>,
    classes: BTreeMap<Color, Vec<ElementId>>,
}

impl ChainPartition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, e: ElementId, color: Color, round: u32) -> Result<(), PartitionError> {
        if color.0 == 0 {
            return Err(PartitionError::ZeroColor);
        }
        if self.color_of.contains_key(&e) {
            return Err(PartitionError::AlreadyColored(e));
        }
        self.color_of.insert(e, color);
        self.round_of.insert(e, round);
        self.classes.entry(color).or_default().push(e);
        Ok(())
    }

    pub fn color(&self, e: ElementId) -> Option<Color> {
        self.color_of.get(&e).copied()
    }

    pub fn round(&self, e: ElementId) -> Option<u32> {
        self.round_of.get(&e).copied()
    }

    pub fn len(&self) -> usize {
        self.color_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.color_of.is_empty()
    }

    /// Color classes in ascending color order, members in assignment order.
    pub fn classes(&self) -> &BTreeMap<Color, Vec<ElementId>> {
        &self.classes
    }

    pub fn color_count(&self) -> usize {
        self.classes.len()
    }

    /// One past the largest color in use.
    pub fn fresh_color(&self) -> Color {
        Color(self.classes.keys().next_back().map_or(1, |c| c.0 + 1))
    }

    /// Existing colors whose class stays a chain when `e` joins it.
    pub fn chain_compatible_colors(&self, p: &Poset, e: ElementId) -> Vec<Color> {
        self.classes
            .iter()
            .filter(|(_, members)| members.iter().all(|&m| m == e || p.comparable(m, e)))
            .map(|(&c, _)| c)
            .collect()
    }

    /// The first member of `color`'s class that is incomparable to `e`.
    pub fn conflict(&self, p: &Poset, e: ElementId, color: Color) -> Option<ElementId> {
        self.classes.get(&color)?.iter().copied().find(|&m| m != e && !p.comparable(m, e))
    }

    /// Number of distinct colors on `set`.
    pub fn distinct_colors<'a>(
        &self,
        set: impl IntoIterator<Item = &'a ElementId>,
    ) -> Result<usize, PartitionError> {
        let mut seen = BTreeSet::new();
        for &u in set {
            seen.insert(self.color(u).ok_or(PartitionError::Uncolored(u))?);
        }
        Ok(seen.len())
    }

    /// True iff all members of `set` carry pairwise distinct colors.
    pub fn is_rainbow(&self, set: &BTreeSet<ElementId>) -> Result<bool, PartitionError> {
        Ok(self.distinct_colors(set)? == set.len())
    }

    pub fn colors_of<'a>(
        &self,
        set: impl IntoIterator<Item = &'a ElementId>,
    ) -> Result<BTreeSet<Color>, PartitionError> {
        set.into_iter().map(|&u| self.color(u).ok_or(PartitionError::Uncolored(u))).collect()
    }

    /// Every incomparable same-color pair, in ascending order.
    pub fn verify(&self, p: &Poset) -> Result<Vec<ChainViolation>, PartitionError> {
        if let Some(&e) = p.elements().iter().find(|e| !self.color_of.contains_key(e)) {
            return Err(PartitionError::Uncolored(e));
        }
        let mut out = Vec::new();
        for (&color, members) in &self.classes {
            let mut sorted = members.clone();
            sorted.sort();
            for (i, &a) in sorted.iter().enumerate() {
                for &b in &sorted[i + 1..] {
                    if !p.comparable(a, b) {
                        out.push(ChainViolation { color, first: a, second: b });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: u32) -> ElementId {
        ElementId(i)
    }

    fn colored(colors: &[u32]) -> ChainPartition {
        let mut part = ChainPartition::new();
        for (i, &c) in colors.iter().enumerate() {
            part.assign(e(i as u32 + 1), Color(c), i as u32 + 1).unwrap();
        }
        part
    }

    #[test]
    fn counting_colors() {
        let part = colored(&[1, 2, 1]);
        assert_eq!(part.distinct_colors(&[e(1), e(2), e(3)]).unwrap(), 2);
        assert_eq!(part.distinct_colors(&[]).unwrap(), 0);
        let part = colored(&[5, 2, 9, 4]);
        assert_eq!(part.distinct_colors(&[e(1), e(2), e(3), e(4)]).unwrap(), 4);
        assert_eq!(part.distinct_colors(&[e(7)]).unwrap_err(), PartitionError::Uncolored(e(7)));
    }

    #[test]
    fn rainbow_sets() {
        let part = colored(&[1, 2, 3, 1]);
        assert!(part.is_rainbow(&[e(1), e(2), e(3)].into()).unwrap());
        assert!(!part.is_rainbow(&[e(1), e(4)].into()).unwrap());
        assert!(part.is_rainbow(&BTreeSet::new()).unwrap());
    }

    #[test]
    fn verification_names_pairs() {
        let chain = Poset::chain(&[e(1), e(2), e(3)]);
        assert!(colored(&[1, 1, 1]).verify(&chain).unwrap().is_empty());
        let anti = Poset::antichain(&[e(1), e(2)]);
        let v = colored(&[1, 1]).verify(&anti).unwrap();
        assert_eq!(v, vec![ChainViolation { color: Color(1), first: e(1), second: e(2) }]);
        assert_eq!(colored(&[1]).verify(&anti).unwrap_err(), PartitionError::Uncolored(e(2)));
    }

    #[test]
    fn assignment_errors() {
        let mut part = colored(&[1]);
        assert_eq!(part.assign(e(1), Color(2), 2).unwrap_err(), PartitionError::AlreadyColored(e(1)));
        assert_eq!(part.assign(e(2), Color(0), 2).unwrap_err(), PartitionError::ZeroColor);
        assert_eq!(part.fresh_color(), Color(2));
    }
}
