//! `R(k, w)`: the poset is the intersection of an `L_alpha(k, w)` order and
//! an `L_beta(k, w)` order grown on the same points.

use std::collections::BTreeSet;

use super::rainbow::chains_from_builder;
use super::{relations_in, Adversary, Certificate, Move, RainbowChains, SeparationClaim, StrategyError, StrategySpec};
use crate::builder::{Builder, BuilderSpec, Family, Region};
use crate::order::LinearOrder;
use crate::partition::{ChainPartition, Color};
use crate::poset::{ElementId, Poset};

#[derive(Debug, Clone)]
pub struct SzemerediStrategy {
    k: u32,
    w: u32,
    host_a: LinearOrder,
    host_b: LinearOrder,
    builder_a: Builder,
    builder_b: Builder,
}

impl SzemerediStrategy {
    /// `k < 1` plays `R(w, w)`.
    pub fn new(k: i64, w: u32) -> Result<Self, StrategyError> {
        if w == 0 {
            return Err(StrategyError::BadParameters("width must be positive".into()));
        }
        let spec_a = BuilderSpec::primal(Family::Alpha, k, w)?;
        let spec_b = BuilderSpec::primal(Family::Beta, k, w)?;
        let host_a = LinearOrder::new();
        let host_b = LinearOrder::new();
        Ok(SzemerediStrategy {
            k: spec_a.k as u32,
            w,
            builder_a: Builder::new(spec_a, Region::WHOLE, &host_a)?,
            builder_b: Builder::new(spec_b, Region::WHOLE, &host_b)?,
            host_a,
            host_b,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn host_alpha(&self) -> &LinearOrder {
        &self.host_a
    }

    pub fn host_beta(&self) -> &LinearOrder {
        &self.host_b
    }

    pub fn builder_alpha(&self) -> &Builder {
        &self.builder_a
    }

    pub fn r_next(&mut self, e: ElementId) -> Result<Move, StrategyError> {
        if self.builder_a.is_done() {
            return Err(StrategyError::Exhausted);
        }
        let level = self.builder_a.active().spec().w;
        self.builder_a.place_next(&mut self.host_a, e)?;
        self.builder_b.place_next(&mut self.host_b, e)?;
        let (below, above) = relations_in(&[&self.host_a, &self.host_b], e);
        Ok(Move { element: e, below, above, extension_positions: None, level, stage: 1 })
    }

    pub fn r_observe(&mut self, e: ElementId, color: Color) -> Result<(), StrategyError> {
        let ea = self.builder_a.observe_color(&self.host_a, e, color)?;
        let eb = self.builder_b.observe_color(&self.host_b, e, color)?;
        if ea != eb {
            return Err(StrategyError::InvariantViolated(format!(
                "alpha and beta builders diverged after element {e}: {ea:?} vs {eb:?}"
            )));
        }
        Ok(())
    }

    /// `C_1, ..., C_w` once the game is over.
    pub fn extract_chains(&self, p: &Poset) -> Result<RainbowChains, StrategyError> {
        if !self.builder_a.is_done() {
            return Err(StrategyError::NotDone);
        }
        let from_a = chains_from_builder(&self.builder_a, p, false)?;
        let from_b = chains_from_builder(&self.builder_b, p, false)?;
        if from_a != from_b {
            return Err(StrategyError::InvariantViolated("alpha and beta levels disagree".into()));
        }
        Ok(from_a)
    }
}

impl Adversary for SzemerediStrategy {
    fn spec(&self) -> StrategySpec {
        StrategySpec::Szemeredi { w: self.w, k: self.k }
    }

    fn next_move(&mut self, e: ElementId, _: &Poset, _: &ChainPartition) -> Result<Option<Move>, StrategyError> {
        if self.builder_a.is_done() {
            return Ok(None);
        }
        self.r_next(e).map(Some)
    }

    fn observe(&mut self, e: ElementId, color: Color, _: &Poset, _: &ChainPartition) -> Result<(), StrategyError> {
        self.r_observe(e, color)
    }

    fn is_done(&self) -> bool {
        self.builder_a.is_done()
    }

    fn certificate(&self, p: &Poset, _: &ChainPartition) -> Result<Certificate, StrategyError> {
        let chains = self.extract_chains(p)?;
        let c_k = chains.get(self.k).cloned().unwrap_or_default();
        let rest: BTreeSet<ElementId> = p.elements().iter().copied().filter(|x| !c_k.contains(x)).collect();
        let separations = vec![SeparationClaim {
            label: format!("C_{} first in L_alpha({},{})", self.k, self.k, self.w),
            order: self.host_a.clone(),
            first: c_k,
            then: rest,
        }];
        Ok(Certificate::Szemeredi {
            w: self.w,
            k: self.k,
            chains,
            separations,
            hosts: vec![self.host_a.clone(), self.host_b.clone()],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: u32) -> ElementId {
        ElementId(i)
    }

    /// Plays R(2) against the First-Fit colors worked out by hand.
    #[test]
    fn two_against_first_fit_by_hand() {
        let mut s = SzemerediStrategy::new(2, 2).unwrap();
        let mut p = Poset::new();
        let colors = [1, 1, 2, 3];
        let mut moves = Vec::new();
        for (i, &c) in colors.iter().enumerate() {
            let x = e(i as u32 + 1);
            let m = s.r_next(x).unwrap();
            assert_eq!(p.insert_element(&m.below, &m.above).unwrap(), x);
            s.r_observe(x, Color(c)).unwrap();
            moves.push(m);
        }
        assert!(s.is_done());
        assert_eq!(moves[2].below, [e(1)].into());
        assert!(moves[2].above.is_empty());
        assert!(moves[3].below.is_empty());
        assert_eq!(moves[3].above, [e(2)].into());
        assert_eq!(s.r_next(e(5)).unwrap_err(), StrategyError::Exhausted);
        let chains = s.extract_chains(&p).unwrap();
        assert_eq!(chains.chains, vec![[e(4)].into(), [e(1), e(3)].into()]);
    }

    #[test]
    fn width_one_is_a_single_point() {
        let mut s = SzemerediStrategy::new(1, 1).unwrap();
        let m = s.r_next(e(1)).unwrap();
        assert!(m.below.is_empty() && m.above.is_empty());
        assert_eq!(s.extract_chains(&Poset::new()).unwrap_err(), StrategyError::NotDone);
        s.r_observe(e(1), Color(1)).unwrap();
        assert!(s.is_done());
        let p = Poset::antichain(&[e(1)]);
        assert_eq!(s.extract_chains(&p).unwrap().chains, vec![BTreeSet::from([e(1)])]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SzemerediStrategy::new(1, 0).is_err());
        assert!(SzemerediStrategy::new(3, 2).is_err());
        assert_eq!(SzemerediStrategy::new(0, 3).unwrap().k(), 3);
    }
}
