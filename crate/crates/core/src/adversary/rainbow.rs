//! Rainbow chains, their extraction from finished builders, and the choice of
//! the separated chain `C_t` in the three-stage strategies.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::bounds::{theorem1_level_threshold, theorem2_level_threshold};
use super::StrategyError;
use crate::builder::Builder;
use crate::order::LinearOrder;
use crate::partition::ChainPartition;
use crate::poset::{ElementId, Poset};

/// `chains[i - 1]` is `C_i`, the chain of size `i`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowChains {
    pub chains: Vec<BTreeSet<ElementId>>,
}

impl RainbowChains {
    pub fn get(&self, i: u32) -> Option<&BTreeSet<ElementId>> {
        self.chains.get((i as usize).checked_sub(1)?)
    }

    pub fn width(&self) -> u32 {
        self.chains.len() as u32
    }

    pub fn union(&self) -> BTreeSet<ElementId> {
        self.chains.iter().flatten().copied().collect()
    }

    /// Failures of the four Rainbow Property conditions, with downward
    /// closure judged inside `scope`.
    pub fn property_failures(
        &self,
        p: &Poset,
        part: &ChainPartition,
        scope: &BTreeSet<ElementId>,
    ) -> Vec<String> {
        let mut out = Vec::new();
        for (i, ci) in self.chains.iter().enumerate() {
            for cj in &self.chains[i + 1..] {
                for &x in ci {
                    if let Some(&y) = cj.iter().find(|&&y| p.comparable(x, y)) {
                        out.push(format!("chains of sizes {} and another share comparable pair {x}, {y}", i + 1));
                    }
                }
            }
        }
        let union = self.union();
        match part.is_rainbow(&union) {
            Ok(true) => {}
            Ok(false) => out.push(format!(
                "union of {} points carries only {} colors",
                union.len(),
                part.distinct_colors(&union).unwrap_or(0)
            )),
            Err(e) => out.push(e.to_string()),
        }
        for (i, ci) in self.chains.iter().enumerate() {
            if ci.len() != i + 1 {
                out.push(format!("chain C_{} has {} points", i + 1, ci.len()));
            }
            let members: Vec<ElementId> = ci.iter().copied().collect();
            if !p.is_chain(&members) {
                out.push(format!("C_{} is not a chain", i + 1));
            }
        }
        for &x in &union {
            if let Some(y) = p.strictly_below(x).into_iter().find(|y| scope.contains(y) && !union.contains(y)) {
                out.push(format!("{y} < {x} but {y} lies outside the chains"));
            }
        }
        out
    }
}

/// Extracts `C_1, ..., C_w` from a finished builder: the chain of the level
/// of width `i` is the closed down-set (up-set, for `dual`) of that level's
/// stage-one terminal, restricted to the level's points.
pub fn chains_from_builder(b: &Builder, p: &Poset, dual: bool) -> Result<RainbowChains, StrategyError> {
    let instances = b.instances();
    let mut chains = vec![BTreeSet::new(); instances.len()];
    let mut level_points: BTreeSet<ElementId> = BTreeSet::new();
    for inst in instances.iter().rev() {
        level_points.extend(inst.points.iter().copied());
        let z = inst.terminal.ok_or(StrategyError::NotDone)?;
        let closed = if dual { p.up_set(z)? } else { p.down_set(z)? };
        let slot = chains
            .get_mut(inst.spec.w as usize - 1)
            .ok_or_else(|| StrategyError::InvariantViolated(format!("level width {} out of range", inst.spec.w)))?;
        *slot = closed.intersection(&level_points).copied().collect();
    }
    Ok(RainbowChains { chains })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level_width: u32,
    pub t: u32,
    /// `||C_t ∪ D_w||`
    pub separator_colors: usize,
    pub threshold: f64,
    pub strict: bool,
    pub separator_set: Vec<ElementId>,
}

impl LevelReport {
    pub fn meets_threshold(&self) -> bool {
        let c = self.separator_colors as f64;
        if self.strict {
            c > self.threshold
        } else {
            c >= self.threshold
        }
    }
}

fn argmax_t(
    chains: &RainbowChains,
    d_w: &BTreeSet<ElementId>,
    part: &ChainPartition,
    candidates: impl Iterator<Item = u32>,
) -> Result<(u32, usize), StrategyError> {
    let mut best: Option<(u32, usize)> = None;
    for t in candidates {
        let c_t = chains.get(t).ok_or_else(|| StrategyError::InvariantViolated(format!("no chain C_{t}")))?;
        let count = part.distinct_colors(c_t.iter().chain(d_w))?;
        if best.is_none_or(|(_, b)| count > b) {
            best = Some((t, count));
        }
    }
    best.ok_or_else(|| StrategyError::InvariantViolated("no candidate for t".into()))
}

fn report(
    chains: &RainbowChains,
    d_w: &BTreeSet<ElementId>,
    t: u32,
    count: usize,
    threshold: f64,
    strict: bool,
) -> Result<LevelReport, StrategyError> {
    let mut set: BTreeSet<ElementId> = chains.get(t).cloned().unwrap_or_default();
    set.extend(d_w.iter().copied());
    let r = LevelReport {
        level_width: chains.width(),
        t,
        separator_colors: count,
        threshold,
        strict,
        separator_set: set.into_iter().collect(),
    };
    if r.meets_threshold() {
        Ok(r)
    } else {
        Err(StrategyError::InvariantViolated(format!(
            "level {}: ||C_t ∪ D_w|| = {count} misses threshold {threshold:.4}",
            r.level_width
        )))
    }
}

/// Picks `t` in `1..=w` maximizing `||C_t ∪ D_w||` (smallest on ties); the
/// count must exceed `2w - sqrt(2w)`.
pub fn choose_t_theorem1(
    chains: &RainbowChains,
    d_w: &BTreeSet<ElementId>,
    part: &ChainPartition,
) -> Result<(u32, LevelReport), StrategyError> {
    let w = chains.width();
    let (t, count) = argmax_t(chains, d_w, part, 1..=w)?;
    Ok((t, report(chains, d_w, t, count, theorem1_level_threshold(w), true)?))
}

/// Same with candidates `max(1, w-d+2)..=w` and the non-strict target
/// `2w - w/(d-1) - (d-2)/2`.
pub fn choose_t_theorem2(
    chains: &RainbowChains,
    d_w: &BTreeSet<ElementId>,
    part: &ChainPartition,
    d: u32,
) -> Result<(u32, LevelReport), StrategyError> {
    let w = chains.width();
    let threshold = theorem2_level_threshold(w, d)?;
    let lo = (i64::from(w) - i64::from(d) + 2).max(1) as u32;
    let (t, count) = argmax_t(chains, d_w, part, lo..=w)?;
    Ok((t, report(chains, d_w, t, count, threshold, false)?))
}

/// Pairs `(x, y)` with `x ∈ first`, `y ∈ then` and `y` not after `x` in `order`.
pub fn separation_failures(
    order: &LinearOrder,
    first: &BTreeSet<ElementId>,
    then: &BTreeSet<ElementId>,
) -> Vec<(ElementId, ElementId)> {
    let last_first = first.iter().filter_map(|&x| order.position(x).map(|p| (p, x))).max();
    let Some((cut, x)) = last_first else { return Vec::new() };
    then.iter()
        .filter(|&&y| !first.contains(&y) && order.position(y).is_some_and(|p| p < cut))
        .map(|&y| (x, y))
        .collect()
}
