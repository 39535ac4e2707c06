//! On-line construction of one linear order by the two-stage recursive
//! algorithms `L_alpha(k, w)` and `L_beta(k, w)`, and their duals.
//!
//! A builder owns a region `(low, high)` of a host [`LinearOrder`] and places
//! every point it is handed strictly inside that region. Stage one places
//! points by either the *top rule* (straight to the top of the region) or the
//! *scan rule* (walk up the builder's own points and stop just below the first
//! one whose color already occurred lower down). Stage one ends once the
//! builder's own points carry `w` distinct colors; stage two hands the rest of
//! the game to a child builder of width `w - 1` in a sub-region. Dual builders
//! mirror every direction.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::LinearOrder;
use crate::partition::Color;
use crate::poset::{ElementId, PosetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Primal,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuilderError {
    #[error("k = {k} exceeds w = {w}")]
    KExceedsW { k: i64, w: u32 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("builder is done")]
    Done,
    #[error("element {0} is already placed in the host")]
    AlreadyPlaced(ElementId),
    #[error("still waiting for the color of element {0}")]
    AwaitingColor(ElementId),
    #[error("element {0} is not the active point of this builder")]
    NotActive(ElementId),
    #[error(transparent)]
    Host(#[from] PosetError),
}

/// Which algorithm a builder runs. `k < 1` is normalized to `k = w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuilderSpec {
    pub family: Family,
    pub k: i64,
    pub w: u32,
    pub orientation: Orientation,
}

impl BuilderSpec {
    pub fn new(family: Family, k: i64, w: u32, orientation: Orientation) -> Result<Self, BuilderError> {
        let k = if k < 1 { i64::from(w) } else { k };
        if w > 0 && k > i64::from(w) {
            return Err(BuilderError::KExceedsW { k, w });
        }
        Ok(BuilderSpec { family, k, w, orientation })
    }

    pub fn primal(family: Family, k: i64, w: u32) -> Result<Self, BuilderError> {
        Self::new(family, k, w, Orientation::Primal)
    }

    pub fn dual(family: Family, k: i64, w: u32) -> Result<Self, BuilderError> {
        Self::new(family, k, w, Orientation::Dual)
    }

    fn k_is_w(&self) -> bool {
        self.k == i64::from(self.w)
    }

    /// Stage one puts every point on top of the region (bottom, for duals).
    pub fn uses_top_rule(&self) -> bool {
        match self.family {
            Family::Alpha => !self.k_is_w(),
            Family::Beta => self.k_is_w(),
        }
    }

    /// The algorithm stage two runs, and whether it goes under the first
    /// stage-one point (`true`) or right above the last one (`false`).
    fn child(&self) -> (BuilderSpec, bool) {
        let w = self.w - 1;
        let (k, under_first) = match (self.family, self.k_is_w()) {
            (Family::Alpha, false) => (self.k, true),
            (Family::Alpha, true) => (i64::from(w), false),
            (Family::Beta, false) => (self.k, false),
            (Family::Beta, true) => (i64::from(w), true),
        };
        let spec = BuilderSpec { family: self.family, k: if w == 0 { 0 } else { k }, w, orientation: self.orientation };
        (spec, under_first)
    }
}

/// A position marker in a host order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Bottom,
    Top,
    Elem(ElementId),
}

impl Bound {
    pub fn from_low(e: Option<ElementId>) -> Bound {
        e.map_or(Bound::Bottom, Bound::Elem)
    }

    pub fn from_high(e: Option<ElementId>) -> Bound {
        e.map_or(Bound::Top, Bound::Elem)
    }
}

/// Open interval `(low, high)` of a host order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub low: Bound,
    pub high: Bound,
}

impl Region {
    pub const WHOLE: Region = Region { low: Bound::Bottom, high: Bound::Top };

    pub fn new(low: Bound, high: Bound) -> Self {
        Region { low, high }
    }

    pub fn validate(&self, host: &LinearOrder) -> Result<(), BuilderError> {
        let low = match self.low {
            Bound::Bottom => None,
            Bound::Elem(e) => Some(host.position(e).ok_or(BuilderError::InvalidRegion(format!("{e} not in host")))?),
            Bound::Top => return Err(BuilderError::InvalidRegion("low bound is TOP".into())),
        };
        let high = match self.high {
            Bound::Top => None,
            Bound::Elem(e) => Some(host.position(e).ok_or(BuilderError::InvalidRegion(format!("{e} not in host")))?),
            Bound::Bottom => return Err(BuilderError::InvalidRegion("high bound is BOTTOM".into())),
        };
        if let (Some(l), Some(h)) = (low, high) {
            if l >= h {
                return Err(BuilderError::InvalidRegion("low does not precede high".into()));
            }
        }
        Ok(())
    }

    /// The element directly under `high`, or `None` for the host bottom.
    fn anchor_at_top(&self, host: &LinearOrder) -> Option<ElementId> {
        match self.high {
            Bound::Elem(h) => host.cover_below(h).expect("region bound in host"),
            _ => host.last(),
        }
    }

    fn anchor_at_bottom(&self) -> Option<ElementId> {
        match self.low {
            Bound::Elem(l) => Some(l),
            _ => None,
        }
    }

    /// Elements of `host` strictly inside the region, bottom to top.
    pub fn contents(&self, host: &LinearOrder) -> Vec<ElementId> {
        let start = match self.low {
            Bound::Elem(l) => host.position(l).map_or(0, |i| i + 1),
            _ => 0,
        };
        let end = match self.high {
            Bound::Elem(h) => host.position(h).unwrap_or(host.len()),
            _ => host.len(),
        };
        host.as_slice()[start..end.max(start)].to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    One,
    Two,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuilderEvent {
    /// Stage one of the instance of width `width` ended with `terminal`.
    Stage1Ended { width: u32, terminal: ElementId },
    Done,
}

/// Stage-one record of one recursion level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub spec: BuilderSpec,
    pub region: Region,
    pub points: Vec<ElementId>,
    pub terminal: Option<ElementId>,
}

#[derive(Debug, Clone)]
pub struct Builder {
    spec: BuilderSpec,
    region: Region,
    stage: Stage,
    points: Vec<ElementId>,
    colors: Vec<Color>,
    colors_seen: BTreeSet<Color>,
    terminal: Option<ElementId>,
    pending: Option<ElementId>,
    child: Option<Box<Builder>>,
}

impl Builder {
    pub fn new(spec: BuilderSpec, region: Region, host: &LinearOrder) -> Result<Self, BuilderError> {
        region.validate(host)?;
        Ok(Builder {
            spec,
            region,
            stage: if spec.w == 0 { Stage::Done } else { Stage::One },
            points: Vec::new(),
            colors: Vec::new(),
            colors_seen: BTreeSet::new(),
            terminal: None,
            pending: None,
            child: None,
        })
    }

    pub fn spec(&self) -> BuilderSpec {
        self.spec
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn is_done(&self) -> bool {
        self.stage == Stage::Done
    }

    pub fn stage1_points(&self) -> &[ElementId] {
        &self.points
    }

    pub fn colors_seen(&self) -> &BTreeSet<Color> {
        &self.colors_seen
    }

    /// The last stage-one point, once stage one has ended.
    pub fn stage1_terminal(&self) -> Option<ElementId> {
        self.terminal
    }

    pub fn child(&self) -> Option<&Builder> {
        self.child.as_deref()
    }

    /// The innermost instance that is still placing points.
    pub fn active(&self) -> &Builder {
        match (&self.stage, &self.child) {
            (Stage::Two, Some(c)) => c.active(),
            _ => self,
        }
    }

    /// One record per recursion level, outermost first.
    pub fn instances(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        let mut cur = Some(self);
        while let Some(b) = cur {
            if b.spec.w > 0 {
                out.push(Instance { spec: b.spec, region: b.region, points: b.points.clone(), terminal: b.terminal });
            }
            cur = b.child.as_deref();
        }
        out
    }

    /// Every point this builder or its descendants placed.
    pub fn all_points(&self) -> Vec<ElementId> {
        let mut out = self.points.clone();
        if let Some(c) = &self.child {
            out.extend(c.all_points());
        }
        out
    }

    /// Places `e` in `host` and returns the element it now sits directly
    /// above (`None`: bottom of the host).
    pub fn place_next(&mut self, host: &mut LinearOrder, e: ElementId) -> Result<Option<ElementId>, BuilderError> {
        match self.stage {
            Stage::Done => return Err(BuilderError::Done),
            Stage::Two => return self.child.as_mut().expect("stage two has a child").place_next(host, e),
            Stage::One => {}
        }
        if let Some(p) = self.pending {
            return Err(BuilderError::AwaitingColor(p));
        }
        if host.contains(e) {
            return Err(BuilderError::AlreadyPlaced(e));
        }
        let primal = self.spec.orientation == Orientation::Primal;
        let anchor = if self.spec.uses_top_rule() {
            if primal {
                self.region.anchor_at_top(host)
            } else {
                self.region.anchor_at_bottom()
            }
        } else {
            match self.first_repeat(host) {
                Some(y) if primal => host.cover_below(y)?,
                Some(y) => Some(y),
                None if primal => self.region.anchor_at_top(host),
                None => self.region.anchor_at_bottom(),
            }
        };
        host.insert_above(anchor, e)?;
        self.points.push(e);
        self.pending = Some(e);
        Ok(anchor)
    }

    /// Scanning own points in the rule's direction, the first point whose
    /// color already occurred earlier in the scan.
    fn first_repeat(&self, host: &LinearOrder) -> Option<ElementId> {
        let mut own: Vec<(usize, Color, ElementId)> = self
            .points
            .iter()
            .zip(&self.colors)
            .map(|(&p, &c)| (host.position(p).expect("own point in host"), c, p))
            .collect();
        own.sort_unstable();
        if self.spec.orientation == Orientation::Dual {
            own.reverse();
        }
        let mut seen = BTreeSet::new();
        own.into_iter().find(|&(_, c, _)| !seen.insert(c)).map(|(_, _, p)| p)
    }

    /// Records the color of the most recently placed point.
    pub fn observe_color(
        &mut self,
        host: &LinearOrder,
        e: ElementId,
        color: Color,
    ) -> Result<Vec<BuilderEvent>, BuilderError> {
        match self.stage {
            Stage::Done => return Err(BuilderError::Done),
            Stage::Two => {
                let child = self.child.as_mut().expect("stage two has a child");
                let events = child.observe_color(host, e, color)?;
                if child.is_done() {
                    self.stage = Stage::Done;
                }
                return Ok(events);
            }
            Stage::One => {}
        }
        if self.pending != Some(e) {
            return Err(BuilderError::NotActive(e));
        }
        self.pending = None;
        self.colors.push(color);
        self.colors_seen.insert(color);
        if self.colors_seen.len() < self.spec.w as usize {
            return Ok(Vec::new());
        }

        self.terminal = Some(e);
        let mut events = vec![BuilderEvent::Stage1Ended { width: self.spec.w, terminal: e }];
        let (child_spec, under_first) = self.spec.child();
        let primal = self.spec.orientation == Orientation::Primal;
        let first = self.points[0];
        let region = match (under_first, primal) {
            (true, true) => Region::new(self.region.low, Bound::Elem(first)),
            (true, false) => Region::new(Bound::Elem(first), self.region.high),
            (false, true) => Region::new(Bound::Elem(e), Bound::from_high(host.cover_above(e)?)),
            (false, false) => Region::new(Bound::from_low(host.cover_below(e)?), Bound::Elem(e)),
        };
        let child = Builder::new(child_spec, region, host)?;
        if child.is_done() {
            self.stage = Stage::Done;
            events.push(BuilderEvent::Done);
        } else {
            self.stage = Stage::Two;
            self.child = Some(Box::new(child));
        }
        Ok(events)
    }
}
