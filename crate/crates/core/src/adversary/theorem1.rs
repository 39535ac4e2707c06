//! `S(w)`: forces many colors on a two-dimensional poset while keeping its
//! realizer private.
//!
//! Stage one grows `2w` orders at once, `A_k = L_alpha(k, w)` and
//! `B_k = L_beta(k, w)` for every `k`, which all present the same poset.
//! Stage two runs the dual pair (`L_beta*` in every `A_k`, `L_alpha*` in every
//! `B_k`) entirely below stage one. Stage three picks the chain `C_t` with the
//! most colors outside `D_w` and plays `S(w - 1)` between `S_2 \ D_w` and
//! `S_1 \ C_t`, incomparable to `C_t ∪ D_w`. Only `A_t` and `B_t` are needed
//! for the final two-element realizer.

use std::collections::BTreeSet;

use super::rainbow::{chains_from_builder, choose_t_theorem1};
use super::{
    relations_in, Adversary, Certificate, LevelCertificate, LevelReport, Move, RainbowChains, SeparationClaim,
    StrategyError, StrategySpec,
};
use crate::builder::{Bound, Builder, BuilderSpec, Family, Region};
use crate::order::{LinearOrder, Realizer};
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
    w: u32,
    a_hosts: Vec<LinearOrder>,
    b_hosts: Vec<LinearOrder>,
    a_builders: Vec<Builder>,
    b_builders: Vec<Builder>,
    a_duals: Vec<Builder>,
    b_duals: Vec<Builder>,
    phase: Phase,
    s1: BTreeSet<ElementId>,
    s2: BTreeSet<ElementId>,
    c_chains: RainbowChains,
    d_chains: RainbowChains,
    report: Option<LevelReport>,
    fixed_below: BTreeSet<ElementId>,
    fixed_above: BTreeSet<ElementId>,
    child: Option<Box<Level>>,
}

fn place_all(
    builders: &mut [Builder],
    hosts: &mut [LinearOrder],
    e: ElementId,
) -> Result<(), StrategyError> {
    for (b, h) in builders.iter_mut().zip(hosts.iter_mut()) {
        b.place_next(h, e)?;
    }
    Ok(())
}

fn observe_all(
    builders: &mut [Builder],
    hosts: &[LinearOrder],
    e: ElementId,
    color: Color,
) -> Result<bool, StrategyError> {
    let mut first_events = None;
    for (b, h) in builders.iter_mut().zip(hosts) {
        let ev = b.observe_color(h, e, color)?;
        match &first_events {
            None => first_events = Some(ev),
            Some(f) if *f != ev => {
                return Err(StrategyError::InvariantViolated(format!(
                    "builders diverged after element {e}: {f:?} vs {ev:?}"
                )))
            }
            _ => {}
        }
    }
    Ok(builders.iter().all(Builder::is_done))
}

impl Level {
    fn new(w: u32) -> Result<Self, StrategyError> {
        let hosts = vec![LinearOrder::new(); w as usize];
        let a_builders = (1..=w)
            .map(|k| Builder::new(BuilderSpec::primal(Family::Alpha, i64::from(k), w)?, Region::WHOLE, &hosts[0]))
            .collect::<Result<Vec<_>, _>>()?;
        let b_builders = (1..=w)
            .map(|k| Builder::new(BuilderSpec::primal(Family::Beta, i64::from(k), w)?, Region::WHOLE, &hosts[0]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Level {
            w,
            a_hosts: hosts.clone(),
            b_hosts: hosts,
            a_builders,
            b_builders,
            a_duals: Vec::new(),
            b_duals: Vec::new(),
            phase: Phase::One,
            s1: BTreeSet::new(),
            s2: BTreeSet::new(),
            c_chains: RainbowChains::default(),
            d_chains: RainbowChains::default(),
            report: None,
            fixed_below: BTreeSet::new(),
            fixed_above: BTreeSet::new(),
            child: None,
        })
    }

    fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// Relations of `e` read off `(A_1, B_1)`; every other pair must agree.
    fn presented_relations(&self, e: ElementId) -> Result<(BTreeSet<ElementId>, BTreeSet<ElementId>), StrategyError> {
        let rel = relations_in(&[&self.a_hosts[0], &self.b_hosts[0]], e);
        for k in 1..self.w as usize {
            if relations_in(&[&self.a_hosts[k], &self.b_hosts[k]], e) != rel {
                return Err(StrategyError::InvariantViolated(format!(
                    "A_{} and B_{} present different relations for element {e}",
                    k + 1,
                    k + 1
                )));
            }
        }
        Ok(rel)
    }

    fn next_move(&mut self, e: ElementId) -> Result<Option<Move>, StrategyError> {
        let stage = match self.phase {
            Phase::Done => return Ok(None),
            Phase::Three => {
                let child = self.child.as_mut().expect("stage three has a child");
                return Ok(child.next_move(e)?.map(|mut m| {
                    m.below.extend(self.fixed_below.iter().copied());
                    m.above.extend(self.fixed_above.iter().copied());
                    m
                }));
            }
            Phase::One => {
                place_all(&mut self.a_builders, &mut self.a_hosts, e)?;
                place_all(&mut self.b_builders, &mut self.b_hosts, e)?;
                self.s1.insert(e);
                1
            }
            Phase::Two => {
                place_all(&mut self.a_duals, &mut self.a_hosts, e)?;
                place_all(&mut self.b_duals, &mut self.b_hosts, e)?;
                self.s2.insert(e);
                2
            }
        };
        let (below, above) = self.presented_relations(e)?;
        Ok(Some(Move { element: e, below, above, extension_positions: None, level: self.w, stage }))
    }

    fn observe(&mut self, e: ElementId, color: Color, p: &Poset, part: &ChainPartition) -> Result<(), StrategyError> {
        match self.phase {
            Phase::Done => Err(StrategyError::Exhausted),
            Phase::One => {
                let a_done = observe_all(&mut self.a_builders, &self.a_hosts, e, color)?;
                let b_done = observe_all(&mut self.b_builders, &self.b_hosts, e, color)?;
                if a_done != b_done {
                    return Err(StrategyError::InvariantViolated("A and B builders end stage one apart".into()));
                }
                if a_done {
                    self.start_stage_two()?;
                }
                Ok(())
            }
            Phase::Two => {
                let a_done = observe_all(&mut self.a_duals, &self.a_hosts, e, color)?;
                let b_done = observe_all(&mut self.b_duals, &self.b_hosts, e, color)?;
                if a_done != b_done {
                    return Err(StrategyError::InvariantViolated("dual builders end stage two apart".into()));
                }
                if a_done {
                    self.start_stage_three(p, part)?;
                }
                Ok(())
            }
            Phase::Three => {
                let child = self.child.as_mut().expect("stage three has a child");
                child.observe(e, color, p, part)?;
                if child.is_done() {
                    self.phase = Phase::Done;
                }
                Ok(())
            }
        }
    }

    fn start_stage_two(&mut self) -> Result<(), StrategyError> {
        let w = self.w;
        let under_s1 = |h: &LinearOrder| Region::new(Bound::Bottom, Bound::Elem(h.first().expect("stage one placed")));
        self.a_duals = self
            .a_hosts
            .iter()
            .map(|h| Builder::new(BuilderSpec::dual(Family::Beta, i64::from(w), w)?, under_s1(h), h))
            .collect::<Result<_, _>>()?;
        self.b_duals = self
            .b_hosts
            .iter()
            .map(|h| Builder::new(BuilderSpec::dual(Family::Alpha, i64::from(w), w)?, under_s1(h), h))
            .collect::<Result<_, _>>()?;
        self.phase = Phase::Two;
        Ok(())
    }

    fn start_stage_three(&mut self, p: &Poset, part: &ChainPartition) -> Result<(), StrategyError> {
        let w = self.w as usize;
        self.c_chains = chains_from_builder(&self.a_builders[w - 1], p, false)?;
        if chains_from_builder(&self.b_builders[0], p, false)? != self.c_chains {
            return Err(StrategyError::InvariantViolated("stage-one builders disagree on C chains".into()));
        }
        self.d_chains = chains_from_builder(&self.b_duals[0], p, true)?;
        if chains_from_builder(&self.a_duals[0], p, true)? != self.d_chains {
            return Err(StrategyError::InvariantViolated("stage-two builders disagree on D chains".into()));
        }
        let d_w = self.d_chains.get(self.w).cloned().unwrap_or_default();
        let (t, report) = choose_t_theorem1(&self.c_chains, &d_w, part)?;
        let c_t = self.c_chains.get(t).cloned().unwrap_or_default();
        self.fixed_below = self.s2.difference(&d_w).copied().collect();
        self.fixed_above = self.s1.difference(&c_t).copied().collect();
        self.report = Some(report);
        if self.w == 1 {
            self.phase = Phase::Done;
        } else {
            self.child = Some(Box::new(Level::new(self.w - 1)?));
            self.phase = Phase::Three;
        }
        Ok(())
    }

    fn t(&self) -> u32 {
        self.report.as_ref().map_or(0, |r| r.t)
    }

    fn all_points(&self) -> BTreeSet<ElementId> {
        let mut out: BTreeSet<ElementId> = self.s1.union(&self.s2).copied().collect();
        if let Some(c) = &self.child {
            out.extend(c.all_points());
        }
        out
    }

    /// `L_1 = A_t` with the child's `L_1` spliced in right above `C_t`, and
    /// `L_2 = B_t` with the child's `L_2` spliced in right below `D_w`.
    fn realizer(&self) -> (Vec<ElementId>, Vec<ElementId>) {
        let t = self.t() as usize;
        let a = self.a_hosts[t - 1].as_slice();
        let b = self.b_hosts[t - 1].as_slice();
        let Some(child) = &self.child else {
            return (a.to_vec(), b.to_vec());
        };
        let (c1, c2) = child.realizer();
        let c_t = self.c_chains.get(t as u32).expect("chosen chain");
        let d_w = self.d_chains.get(self.w).expect("dual chain");
        let cut_a = a.iter().rposition(|x| c_t.contains(x)).expect("C_t in A_t") + 1;
        let cut_b = b.iter().position(|x| d_w.contains(x)).expect("D_w in B_t");
        let splice = |base: &[ElementId], cut: usize, mid: Vec<ElementId>| {
            let mut v = base[..cut].to_vec();
            v.extend(mid);
            v.extend_from_slice(&base[cut..]);
            v
        };
        (splice(a, cut_a, c1), splice(b, cut_b, c2))
    }

    fn certificates(&self, out: &mut Vec<LevelCertificate>) -> Result<(), StrategyError> {
        let report = self.report.clone().ok_or(StrategyError::NotDone)?;
        let w = self.w;
        let d_w = self.d_chains.get(w).cloned().unwrap_or_default();
        let mut separations = Vec::new();
        let mut realizing_families = Vec::new();
        for k in 1..=w {
            let c_k = self.c_chains.get(k).cloned().unwrap_or_default();
            let (a, b) = (&self.a_hosts[k as usize - 1], &self.b_hosts[k as usize - 1]);
            separations.push(SeparationClaim {
                label: format!("level {w}: C_{k} first among S_1 in A_{k}"),
                order: a.clone(),
                first: c_k.clone(),
                then: self.s1.difference(&c_k).copied().collect(),
            });
            separations.push(SeparationClaim {
                label: format!("level {w}: D_{w} last among S_2 in B_{k}"),
                order: b.clone(),
                first: self.s2.difference(&d_w).copied().collect(),
                then: d_w.clone(),
            });
            realizing_families.push((format!("level {w}: A_{k}, B_{k}"), vec![a.clone(), b.clone()]));
        }
        out.push(LevelCertificate {
            width: w,
            stage1: self.s1.clone(),
            stage2: self.s2.clone(),
            stage3: self.child.as_ref().map(|c| c.all_points()).unwrap_or_default(),
            c_chains: self.c_chains.clone(),
            d_chains: self.d_chains.clone(),
            report,
            separations,
            realizing_families,
        });
        if let Some(c) = &self.child {
            c.certificates(out)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Theorem1Strategy {
    w: u32,
    root: Level,
}

impl Theorem1Strategy {
    pub fn new(w: u32) -> Result<Self, StrategyError> {
        if w == 0 {
            return Err(StrategyError::BadParameters("width must be positive".into()));
        }
        Ok(Theorem1Strategy { w, root: Level::new(w)? })
    }

    /// The two-order realizer assembled from `A_t`, `B_t` at every level.
    pub fn extract_realizer(&self) -> Result<Realizer, StrategyError> {
        if !self.root.is_done() {
            return Err(StrategyError::NotDone);
        }
        let (l1, l2) = self.root.realizer();
        Ok(Realizer::new(vec![LinearOrder::from_vec(l1)?, LinearOrder::from_vec(l2)?])?)
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

impl Adversary for Theorem1Strategy {
    fn spec(&self) -> StrategySpec {
        StrategySpec::Theorem1 { w: self.w }
    }

    fn next_move(&mut self, e: ElementId, _: &Poset, _: &ChainPartition) -> Result<Option<Move>, StrategyError> {
        self.root.next_move(e)
    }

    fn observe(&mut self, e: ElementId, color: Color, p: &Poset, part: &ChainPartition) -> Result<(), StrategyError> {
        self.root.observe(e, color, p, part)
    }

    fn is_done(&self) -> bool {
        self.root.is_done()
    }

    fn certificate(&self, _: &Poset, _: &ChainPartition) -> Result<Certificate, StrategyError> {
        let realizer = self.extract_realizer()?;
        let mut levels = Vec::new();
        self.root.certificates(&mut levels)?;
        Ok(Certificate::Theorem1 { levels, realizer })
    }
}
