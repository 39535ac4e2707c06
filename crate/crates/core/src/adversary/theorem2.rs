//! `S(d, w)`: the strategy that must show a realizer of size `d` every round.
//!
//! The `d` presented extensions live in slots `0..d`. At a level of width `w`
//! slot `j < d - 1` carries index `w - d + 2 + j` and runs `L_alpha(index, w)`
//! (an index below 1 runs `L_alpha(w, w)`), the last slot carries index
//! `w + 1` and runs `L_beta(w, w)`. Stage two runs `L_beta*(w, w)`, resp.
//! `L_alpha*(w, w)` in the last slot, below stage one. Stage three places the
//! recursion `S(d, w - 1)` in every slot so that
//!
//! * `S_2 < C_t < S_3 < S_1 \ C_t` in the slot of index `t`,
//! * `S_2 \ D_w < S_3 < D_w < S_1` in the last slot,
//! * `S_2 < S_3 < S_1` everywhere else.
//!
//! The child level keeps the slot numbering: index `i` at width `w` becomes
//! index `i - 1` at width `w - 1`.

use std::collections::BTreeSet;

use super::rainbow::{chains_from_builder, choose_t_theorem2};
use super::{
    relations_in, Adversary, Certificate, LevelCertificate, LevelReport, Move, RainbowChains, SeparationClaim,
    StrategyError, StrategySpec,
};
use crate::builder::{Bound, Builder, BuilderSpec, Family, Region};
use crate::order::LinearOrder;
use crate::partition::{ChainPartition, Color};
use crate::poset::{ElementId, Poset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
    Three,
    Done,
}

#[derive(Debug, Clone)]
struct Level {
    d: u32,
    w: u32,
    regions: Vec<Region>,
    stage1: Vec<Builder>,
    stage2: Vec<Builder>,
    phase: Phase,
    s1: BTreeSet<ElementId>,
    s2: BTreeSet<ElementId>,
    c_chains: RainbowChains,
    d_chains: RainbowChains,
    report: Option<LevelReport>,
    child: Option<Box<Level>>,
}

fn position_extreme(host: &LinearOrder, set: &BTreeSet<ElementId>, top: bool) -> Result<ElementId, StrategyError> {
    let positions = set.iter().filter_map(|&x| host.position(x).map(|p| (p, x)));
    let found = if top { positions.max() } else { positions.min() };
    found
        .map(|(_, x)| x)
        .ok_or_else(|| StrategyError::InvariantViolated("empty block in presented extension".into()))
}

/// Anchors per slot, level, stage.
type Placement = (Vec<Option<ElementId>>, u32, u8);

impl Level {
    fn new(d: u32, w: u32, regions: Vec<Region>, hosts: &[LinearOrder]) -> Result<Self, StrategyError> {
        let mut stage1 = Vec::with_capacity(d as usize);
        for j in 0..d as usize {
            let spec = if j + 1 < d as usize {
                BuilderSpec::primal(Family::Alpha, slot_index(d, w, j), w)?
            } else {
                BuilderSpec::primal(Family::Beta, i64::from(w), w)?
            };
            stage1.push(Builder::new(spec, regions[j], &hosts[j])?);
        }
        Ok(Level {
            d,
            w,
            regions,
            stage1,
            stage2: Vec::new(),
            phase: Phase::One,
            s1: BTreeSet::new(),
            s2: BTreeSet::new(),
            c_chains: RainbowChains::default(),
            d_chains: RainbowChains::default(),
            report: None,
            child: None,
        })
    }

    fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    fn last(&self) -> usize {
        self.d as usize - 1
    }

    /// Places `e` in every slot; returns the anchors and the level annotation.
    fn next_move(&mut self, e: ElementId, hosts: &mut [LinearOrder]) -> Result<Option<Placement>, StrategyError> {
        let (builders, stage) = match self.phase {
            Phase::Done => return Ok(None),
            Phase::Three => return self.child.as_mut().expect("stage three has a child").next_move(e, hosts),
            Phase::One => {
                self.s1.insert(e);
                (&mut self.stage1, 1)
            }
            Phase::Two => {
                self.s2.insert(e);
                (&mut self.stage2, 2)
            }
        };
        let anchors = builders
            .iter_mut()
            .zip(hosts.iter_mut())
            .map(|(b, h)| b.place_next(h, e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some((anchors, self.w, stage)))
    }

    fn observe(
        &mut self,
        e: ElementId,
        color: Color,
        hosts: &[LinearOrder],
        p: &Poset,
        part: &ChainPartition,
    ) -> Result<(), StrategyError> {
        let builders = match self.phase {
            Phase::Done => return Err(StrategyError::Exhausted),
            Phase::Three => {
                let child = self.child.as_mut().expect("stage three has a child");
                child.observe(e, color, hosts, p, part)?;
                if child.is_done() {
                    self.phase = Phase::Done;
                }
                return Ok(());
            }
            Phase::One => &mut self.stage1,
            Phase::Two => &mut self.stage2,
        };
        let mut events = None;
        for (b, h) in builders.iter_mut().zip(hosts) {
            let ev = b.observe_color(h, e, color)?;
            if events.get_or_insert_with(|| ev.clone()) != &ev {
                return Err(StrategyError::InvariantViolated(format!("extension builders diverged after {e}")));
            }
        }
        let done: Vec<bool> = builders.iter().map(Builder::is_done).collect();
        if done.iter().any(|&x| x != done[0]) {
            return Err(StrategyError::InvariantViolated("extension builders finished apart".into()));
        }
        if done[0] {
            match self.phase {
                Phase::One => self.start_stage_two(hosts)?,
                _ => self.start_stage_three(hosts, p, part)?,
            }
        }
        Ok(())
    }

    fn start_stage_two(&mut self, hosts: &[LinearOrder]) -> Result<(), StrategyError> {
        let w = self.w;
        let mut stage2 = Vec::with_capacity(self.d as usize);
        for (j, host) in hosts.iter().enumerate() {
            let bottom_s1 = position_extreme(host, &self.s1, false)?;
            let region = Region::new(self.regions[j].low, Bound::Elem(bottom_s1));
            let family = if j == self.last() { Family::Alpha } else { Family::Beta };
            stage2.push(Builder::new(BuilderSpec::dual(family, i64::from(w), w)?, region, host)?);
        }
        self.stage2 = stage2;
        self.phase = Phase::Two;
        Ok(())
    }

    fn t_slot(&self, t: u32) -> usize {
        (i64::from(t) - (i64::from(self.w) - i64::from(self.d) + 2)) as usize
    }

    fn start_stage_three(&mut self, hosts: &[LinearOrder], p: &Poset, part: &ChainPartition) -> Result<(), StrategyError> {
        let last = self.last();
        self.c_chains = chains_from_builder(&self.stage1[last], p, false)?;
        if chains_from_builder(&self.stage1[last - 1], p, false)? != self.c_chains {
            return Err(StrategyError::InvariantViolated("stage-one extensions disagree on C chains".into()));
        }
        self.d_chains = chains_from_builder(&self.stage2[last], p, true)?;
        if chains_from_builder(&self.stage2[0], p, true)? != self.d_chains {
            return Err(StrategyError::InvariantViolated("stage-two extensions disagree on D chains".into()));
        }
        let d_w = self.d_chains.get(self.w).cloned().unwrap_or_default();
        let (t, report) = choose_t_theorem2(&self.c_chains, &d_w, part, self.d)?;
        self.report = Some(report);
        if self.w == 1 {
            self.phase = Phase::Done;
            return Ok(());
        }
        let c_t = self.c_chains.get(t).cloned().unwrap_or_default();
        let t_slot = self.t_slot(t);
        let mut regions = Vec::with_capacity(hosts.len());
        for (j, host) in hosts.iter().enumerate() {
            let region = if j == t_slot {
                let top = position_extreme(host, &c_t, true)?;
                Region::new(Bound::Elem(top), Bound::from_high(host.cover_above(top)?))
            } else {
                let block = if j == last { &d_w } else { &self.s1 };
                let bottom = position_extreme(host, block, false)?;
                Region::new(Bound::from_low(host.cover_below(bottom)?), Bound::Elem(bottom))
            };
            regions.push(region);
        }
        self.child = Some(Box::new(Level::new(self.d, self.w - 1, regions, hosts)?));
        self.phase = Phase::Three;
        Ok(())
    }

    fn all_points(&self) -> BTreeSet<ElementId> {
        let mut out: BTreeSet<ElementId> = self.s1.union(&self.s2).copied().collect();
        if let Some(c) = &self.child {
            out.extend(c.all_points());
        }
        out
    }

    fn certificates(&self, hosts: &[LinearOrder], out: &mut Vec<LevelCertificate>) -> Result<(), StrategyError> {
        let report = self.report.clone().ok_or(StrategyError::NotDone)?;
        let w = self.w;
        let last = self.last();
        let d_w = self.d_chains.get(w).cloned().unwrap_or_default();
        let s3 = self.child.as_ref().map(|c| c.all_points()).unwrap_or_default();
        let claim = |label: String, j: usize, first: &BTreeSet<ElementId>, then: &BTreeSet<ElementId>| SeparationClaim {
            label,
            order: hosts[j].clone(),
            first: first.clone(),
            then: then.clone(),
        };
        let mut separations = Vec::new();
        for j in 0..last {
            let index = slot_index(self.d, w, j);
            let k = if index < 1 { w } else { index as u32 };
            let c_k = self.c_chains.get(k).cloned().unwrap_or_default();
            let rest: BTreeSet<ElementId> = self.s1.difference(&c_k).copied().collect();
            separations.push(claim(format!("level {w}: C_{k} first among S_1 in L_{index}"), j, &c_k, &rest));
        }
        let s2_rest: BTreeSet<ElementId> = self.s2.difference(&d_w).copied().collect();
        separations.push(claim(format!("level {w}: D_{w} last among S_2 in L_{}", w + 1), last, &s2_rest, &d_w));

        if !s3.is_empty() {
            let t = report.t;
            let t_slot = self.t_slot(t);
            let c_t = self.c_chains.get(t).cloned().unwrap_or_default();
            let s1_rest: BTreeSet<ElementId> = self.s1.difference(&c_t).copied().collect();
            for j in 0..=last {
                let name = if j == last { format!("L_{}", w + 1) } else { format!("L_{}", slot_index(self.d, w, j)) };
                let pairs: Vec<(&str, &BTreeSet<ElementId>, &str, &BTreeSet<ElementId>)> = if j == t_slot {
                    vec![("S_2", &self.s2, "C_t", &c_t), ("C_t", &c_t, "S_3", &s3), ("S_3", &s3, "S_1\\C_t", &s1_rest)]
                } else if j == last {
                    vec![("S_2\\D_w", &s2_rest, "S_3", &s3), ("S_3", &s3, "D_w", &d_w), ("D_w", &d_w, "S_1", &self.s1)]
                } else {
                    vec![("S_2", &self.s2, "S_3", &s3), ("S_3", &s3, "S_1", &self.s1)]
                };
                for (a, first, b, then) in pairs {
                    separations.push(claim(format!("level {w}: {a} < {b} in {name}"), j, first, then));
                }
            }
        }

        let core: BTreeSet<ElementId> = self.s1.union(&self.s2).copied().collect();
        out.push(LevelCertificate {
            width: w,
            stage1: self.s1.clone(),
            stage2: self.s2.clone(),
            stage3: s3,
            c_chains: self.c_chains.clone(),
            d_chains: self.d_chains.clone(),
            report,
            separations,
            realizing_families: vec![(
                format!("level {w}: presented extensions on S_1 ∪ S_2"),
                hosts.iter().map(|h| h.restrict(&core)).collect(),
            )],
        });
        if let Some(c) = &self.child {
            c.certificates(hosts, out)?;
        }
        Ok(())
    }
}

/// The index k of the α(k,k) order in slot `j`; the last slot holds the β order, index `w + 1`.
fn slot_index(d: u32, w: u32, j: usize) -> i64 {
    if j + 1 < d as usize {
        i64::from(w) - i64::from(d) + 2 + j as i64
    } else {
        i64::from(w) + 1
    }
}

#[derive(Debug, Clone)]
pub struct Theorem2Strategy {
    d: u32,
    w: u32,
    hosts: Vec<LinearOrder>,
    root: Level,
}

impl Theorem2Strategy {
    pub fn new(d: u32, w: u32) -> Result<Self, StrategyError> {
        if d < 2 {
            return Err(StrategyError::BadParameters(format!("dimension must be at least 2, got {d}")));
        }
        if w == 0 {
            return Err(StrategyError::BadParameters("width must be positive".into()));
        }
        let hosts = vec![LinearOrder::new(); d as usize];
        let root = Level::new(d, w, vec![Region::WHOLE; d as usize], &hosts)?;
        Ok(Theorem2Strategy { d, w, hosts, root })
    }

    pub fn extensions(&self) -> &[LinearOrder] {
        &self.hosts
    }

    /// The stage-one algorithm of every slot at the top level.
    pub fn stage1_specs(&self) -> Vec<BuilderSpec> {
        self.root.stage1.iter().map(Builder::spec).collect()
    }

    pub fn level_reports(&self) -> Vec<LevelReport> {
        let mut out = Vec::new();
        let mut cur = Some(&self.root);
        while let Some(l) = cur {
            out.extend(l.report.clone());
            cur = l.child.as_deref();
        }
        out
    }
}

impl Adversary for Theorem2Strategy {
    fn spec(&self) -> StrategySpec {
        StrategySpec::Theorem2 { w: self.w, d: self.d }
    }

    fn next_move(&mut self, e: ElementId, _: &Poset, _: &ChainPartition) -> Result<Option<Move>, StrategyError> {
        let Some((anchors, level, stage)) = self.root.next_move(e, &mut self.hosts)? else {
            return Ok(None);
        };
        let refs: Vec<&LinearOrder> = self.hosts.iter().collect();
        let (below, above) = relations_in(&refs, e);
        Ok(Some(Move {
            element: e,
            below,
            above,
            extension_positions: Some(anchors.into_iter().enumerate().collect()),
            level,
            stage,
        }))
    }

    fn observe(&mut self, e: ElementId, color: Color, p: &Poset, part: &ChainPartition) -> Result<(), StrategyError> {
        self.root.observe(e, color, &self.hosts, p, part)
    }

    fn presented_extensions(&self) -> Option<&[LinearOrder]> {
        Some(&self.hosts)
    }

    fn is_done(&self) -> bool {
        self.root.is_done()
    }

    fn certificate(&self, _: &Poset, _: &ChainPartition) -> Result<Certificate, StrategyError> {
        let mut levels = Vec::new();
        self.root.certificates(&self.hosts, &mut levels)?;
        Ok(Certificate::Theorem2 { d: self.d, levels, extensions: self.hosts.clone() })
    }
}
