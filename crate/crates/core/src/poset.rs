//! Finite strict partial orders stored as a transitive-closure bit matrix.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a poset element. Inside one game this is the round in which
/// the element was introduced, so ids run 1, 2, 3, ... without gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
    #[error("element {low} would have to lie below {high}, which is already below or equal to it")]
    Inconsistent { low: ElementId, high: ElementId },
    #[error("adding the element would force {low} < {high}, changing an existing relation")]
    AltersExisting { low: ElementId, high: ElementId },
    #[error("poset is empty")]
    Empty,
    #[error("element {0} occurs in both sets")]
    Overlap(ElementId),
    #[error("element {0} occurs more than once")]
    Duplicate(ElementId),
    #[error("orders are over different element sets")]
    ElementSetMismatch,
    #[error("no orders given")]
    NoOrders,
    #[error("relation is not a strict partial order: {0}")]
    NotAnOrder(String),
}

/// How two disjoint sets sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relatedness {
    /// Every element of the first set is below every element of the second.
    Below,
    /// Every cross pair is comparable, but not uniformly in one direction.
    Comparable,
    /// No cross pair is comparable.
    Incomparable,
    Mixed,
}

#[derive(Clone, Default)]
pub struct Poset {
    ids: Vec<ElementId>,
    index: HashMap<ElementId, usize>,
    // down[i] has bit j set iff ids[j] < ids[i]; up is the transpose.
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pairs = Vec::new();
        for &x in &self.ids {
            for y in self.strictly_above(x) {
                pairs.push((x.0, y.0));
            }
        }
        f.debug_struct("Poset")
            .field("elements", &self.ids.iter().map(|e| e.0).collect::<Vec<_>>())
            .field("less", &pairs)
            .finish()
    }
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() || self.ids.iter().any(|e| !other.contains(*e)) {
            return false;
        }
        self.ids.iter().all(|&x| self.strictly_above(x) == other.strictly_above(x))
    }
}

impl Eq for Poset {}

impl Poset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a poset over `ids` from an arbitrary relation, rejecting anything
    /// that is not irreflexive, antisymmetric and transitive.
    pub fn from_relation(
        ids: impl IntoIterator<Item = ElementId>,
        less: impl Fn(ElementId, ElementId) -> bool,
    ) -> Result<Self, PosetError> {
        let mut p = Poset::new();
        for id in ids {
            if p.index.contains_key(&id) {
                return Err(PosetError::Duplicate(id));
            }
            p.push_row(id);
        }
        let n = p.ids.len();
        for i in 0..n {
            for j in 0..n {
                if less(p.ids[i], p.ids[j]) {
                    p.down[j].insert(i);
                    p.up[i].insert(j);
                }
            }
        }
        match p.axiom_failures().into_iter().next() {
            Some(msg) => Err(PosetError::NotAnOrder(msg)),
            None => Ok(p),
        }
    }

    /// A chain on the given ids, bottom to top.
    pub fn chain(ids: &[ElementId]) -> Self {
        let rank: HashMap<_, _> = ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Self::from_relation(ids.iter().copied(), |a, b| rank[&a] < rank[&b])
            .expect("a chain is a partial order")
    }

    pub fn antichain(ids: &[ElementId]) -> Self {
        Self::from_relation(ids.iter().copied(), |_, _| false).expect("an antichain is a partial order")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Elements in insertion order.
    pub fn elements(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.index.contains_key(&x)
    }

    /// The id the next added element receives.
    pub fn next_id(&self) -> ElementId {
        ElementId(self.ids.iter().map(|e| e.0).max().unwrap_or(0) + 1)
    }

    fn idx(&self, x: ElementId) -> Result<usize, PosetError> {
        self.index.get(&x).copied().ok_or(PosetError::UnknownElement(x))
    }

    fn push_row(&mut self, id: ElementId) -> usize {
        let n = self.ids.len();
        self.ids.push(id);
        self.index.insert(id, n);
        for row in self.down.iter_mut().chain(self.up.iter_mut()) {
            row.grow(n + 1);
        }
        self.down.push(FixedBitSet::with_capacity(n + 1));
        self.up.push(FixedBitSet::with_capacity(n + 1));
        n
    }

    /// `x < y`. Unknown elements are never related.
    pub fn less(&self, x: ElementId, y: ElementId) -> bool {
        match (self.index.get(&x), self.index.get(&y)) {
            (Some(&i), Some(&j)) => self.up[i].contains(j),
            _ => false,
        }
    }

    pub fn comparable(&self, x: ElementId, y: ElementId) -> bool {
        x == y || self.less(x, y) || self.less(y, x)
    }

    pub fn strictly_below(&self, x: ElementId) -> BTreeSet<ElementId> {
        match self.index.get(&x) {
            Some(&i) => self.down[i].ones().map(|j| self.ids[j]).collect(),
            None => BTreeSet::new(),
        }
    }

    pub fn strictly_above(&self, x: ElementId) -> BTreeSet<ElementId> {
        match self.index.get(&x) {
            Some(&i) => self.up[i].ones().map(|j| self.ids[j]).collect(),
            None => BTreeSet::new(),
        }
    }

    /// Closed down-set `{y : y <= x}`.
    pub fn down_set(&self, x: ElementId) -> Result<BTreeSet<ElementId>, PosetError> {
        self.idx(x)?;
        let mut s = self.strictly_below(x);
        s.insert(x);
        Ok(s)
    }

    /// Closed up-set `{y : y >= x}`.
    pub fn up_set(&self, x: ElementId) -> Result<BTreeSet<ElementId>, PosetError> {
        self.idx(x)?;
        let mut s = self.strictly_above(x);
        s.insert(x);
        Ok(s)
    }

    fn closure_bits(&self, seeds: &BTreeSet<ElementId>, upward: bool) -> Result<FixedBitSet, PosetError> {
        let mut bits = FixedBitSet::with_capacity(self.len());
        for &s in seeds {
            let i = self.idx(s)?;
            bits.insert(i);
            bits.union_with(if upward { &self.up[i] } else { &self.down[i] });
        }
        Ok(bits)
    }

    fn check_extension(
        &self,
        below: &BTreeSet<ElementId>,
        above: &BTreeSet<ElementId>,
    ) -> Result<(FixedBitSet, FixedBitSet), PosetError> {
        let down = self.closure_bits(below, false)?;
        let up = self.closure_bits(above, true)?;
        for i in down.ones() {
            if up.contains(i) {
                return Err(PosetError::Inconsistent { low: self.ids[i], high: self.ids[i] });
            }
            // Every element forced below the new one must already lie below
            // everything forced above it.
            let mut missing = up.clone();
            missing.difference_with(&self.up[i]);
            if let Some(j) = missing.ones().next() {
                return Err(if self.up[j].contains(i) {
                    PosetError::Inconsistent { low: self.ids[i], high: self.ids[j] }
                } else {
                    PosetError::AltersExisting { low: self.ids[i], high: self.ids[j] }
                });
            }
        }
        Ok((down, up))
    }

    /// Returns a copy of the poset with one fresh element placed above the
    /// downward closure of `below` and under the upward closure of `above`.
    pub fn add_element(
        &self,
        below: &BTreeSet<ElementId>,
        above: &BTreeSet<ElementId>,
    ) -> Result<(Poset, ElementId), PosetError> {
        let mut p = self.clone();
        let e = p.insert_element(below, above)?;
        Ok((p, e))
    }

    /// In-place form of [`Poset::add_element`]; on error nothing changes.
    pub fn insert_element(
        &mut self,
        below: &BTreeSet<ElementId>,
        above: &BTreeSet<ElementId>,
    ) -> Result<ElementId, PosetError> {
        let (down, up) = self.check_extension(below, above)?;
        let id = self.next_id();
        let e = self.push_row(id);
        for i in down.ones() {
            self.down[e].insert(i);
            self.up[i].insert(e);
        }
        for j in up.ones() {
            self.up[e].insert(j);
            self.down[j].insert(e);
        }
        Ok(id)
    }

    /// The same set with every relation reversed.
    pub fn dual(&self) -> Poset {
        Poset { ids: self.ids.clone(), index: self.index.clone(), down: self.up.clone(), up: self.down.clone() }
    }

    /// The induced subposet on `subset` (ids not in the poset are ignored),
    /// keeping the original insertion order.
    pub fn restrict(&self, subset: &BTreeSet<ElementId>) -> Poset {
        let keep: Vec<ElementId> = self.ids.iter().copied().filter(|e| subset.contains(e)).collect();
        Poset::from_relation(keep, |a, b| self.less(a, b)).expect("restriction of a partial order")
    }

    /// Human-readable descriptions of every axiom failure. Empty for a valid poset.
    pub fn axiom_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            if self.up[i].contains(i) {
                out.push(format!("{} < {}", self.ids[i], self.ids[i]));
            }
            for j in self.up[i].ones() {
                if self.up[j].contains(i) && i < j {
                    out.push(format!("{} < {} and {} < {}", self.ids[i], self.ids[j], self.ids[j], self.ids[i]));
                }
                // transitivity: everything above j is above i
                if !self.up[j].is_subset(&self.up[i]) {
                    let k = self.up[j].difference(&self.up[i]).next().unwrap();
                    if k != i {
                        out.push(format!(
                            "{} < {} < {} but not {} < {}",
                            self.ids[i], self.ids[j], self.ids[k], self.ids[i], self.ids[k]
                        ));
                    }
                }
            }
        }
        out
    }

    /// Classifies the position of `u` relative to `v`. Either side being
    /// empty makes every relation hold vacuously; that case reports `Below`.
    pub fn completely_related(
        &self,
        u: &BTreeSet<ElementId>,
        v: &BTreeSet<ElementId>,
    ) -> Result<Relatedness, PosetError> {
        for &x in u.iter().chain(v.iter()) {
            self.idx(x)?;
        }
        if let Some(&x) = u.intersection(v).next() {
            return Err(PosetError::Overlap(x));
        }
        let mut all_below = true;
        let mut all_comparable = true;
        let mut none_comparable = true;
        for &a in u {
            for &b in v {
                let lt = self.less(a, b);
                let cmp = lt || self.less(b, a);
                all_below &= lt;
                all_comparable &= cmp;
                none_comparable &= !cmp;
            }
        }
        Ok(if all_below {
            Relatedness::Below
        } else if all_comparable {
            Relatedness::Comparable
        } else if none_comparable {
            Relatedness::Incomparable
        } else {
            Relatedness::Mixed
        })
    }

    /// True iff no two elements of `set` are comparable.
    pub fn is_antichain(&self, set: &[ElementId]) -> bool {
        set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| !self.comparable(a, b)))
    }

    pub fn is_chain(&self, set: &[ElementId]) -> bool {
        set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| self.comparable(a, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<ElementId> {
        v.iter().map(|&i| ElementId(i)).collect()
    }

    fn set(v: &[u32]) -> BTreeSet<ElementId> {
        ids(v).into_iter().collect()
    }

    #[test]
    fn add_to_empty_gives_singleton() {
        let (p, e) = Poset::new().add_element(&set(&[]), &set(&[])).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(e, ElementId(1));
        assert!(p.axiom_failures().is_empty());
    }

    #[test]
    fn add_closes_transitively() {
        let p = Poset::chain(&ids(&[1, 2]));
        let (q, e) = p.add_element(&set(&[2]), &set(&[])).unwrap();
        assert_eq!(e, ElementId(3));
        assert!(q.less(ElementId(1), e));
        assert!(q.less(ElementId(2), e));
        assert!(q.axiom_failures().is_empty());
    }

    #[test]
    fn add_rejects_cycle_without_mutation() {
        let mut p = Poset::chain(&ids(&[1, 2]));
        let before = p.clone();
        let err = p.insert_element(&set(&[2]), &set(&[1])).unwrap_err();
        assert!(matches!(err, PosetError::Inconsistent { .. }));
        assert_eq!(p, before);
    }

    #[test]
    fn add_rejects_change_to_existing_relations() {
        let mut p = Poset::antichain(&ids(&[1, 2]));
        let err = p.insert_element(&set(&[1]), &set(&[2])).unwrap_err();
        assert_eq!(err, PosetError::AltersExisting { low: ElementId(1), high: ElementId(2) });
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn add_rejects_unknown() {
        let p = Poset::new();
        assert_eq!(p.add_element(&set(&[4]), &set(&[])).unwrap_err(), PosetError::UnknownElement(ElementId(4)));
    }

    #[test]
    fn down_sets() {
        let p = Poset::chain(&ids(&[1, 2, 3]));
        assert_eq!(p.down_set(ElementId(2)).unwrap(), set(&[1, 2]));
        assert_eq!(p.down_set(ElementId(1)).unwrap(), set(&[1]));
        let a = Poset::antichain(&ids(&[1, 2]));
        assert_eq!(a.down_set(ElementId(1)).unwrap(), set(&[1]));
        assert!(a.down_set(ElementId(9)).is_err());
    }

    #[test]
    fn relatedness_classes() {
        let c = Poset::chain(&ids(&[1, 2, 3, 4]));
        assert_eq!(c.completely_related(&set(&[1, 2]), &set(&[3, 4])).unwrap(), Relatedness::Below);
        assert_eq!(c.completely_related(&set(&[1, 4]), &set(&[2, 3])).unwrap(), Relatedness::Comparable);
        let a = Poset::antichain(&ids(&[1, 2, 3, 4]));
        assert_eq!(a.completely_related(&set(&[1, 2]), &set(&[3, 4])).unwrap(), Relatedness::Incomparable);
        // N: 1<3, 2<3, 2<4
        let n = Poset::from_relation(ids(&[1, 2, 3, 4]), |a, b| {
            matches!((a.0, b.0), (1, 3) | (2, 3) | (2, 4))
        })
        .unwrap();
        assert_eq!(n.completely_related(&set(&[1, 2]), &set(&[3, 4])).unwrap(), Relatedness::Mixed);
        assert_eq!(n.completely_related(&set(&[]), &set(&[3, 4])).unwrap(), Relatedness::Below);
        assert!(matches!(n.completely_related(&set(&[1]), &set(&[1])), Err(PosetError::Overlap(_))));
    }

    #[test]
    fn dual_reverses_and_is_involution() {
        let c = Poset::chain(&ids(&[1, 2, 3]));
        let d = c.dual();
        assert!(d.less(ElementId(3), ElementId(1)));
        assert!(!d.less(ElementId(1), ElementId(3)));
        assert_eq!(d.dual(), c);
        let a = Poset::antichain(&ids(&[1, 2]));
        assert_eq!(a.dual(), a);
    }

    #[test]
    fn from_relation_rejects_non_orders() {
        let r = Poset::from_relation(ids(&[1, 2, 3]), |a, b| matches!((a.0, b.0), (1, 2) | (2, 3)));
        assert!(matches!(r, Err(PosetError::NotAnOrder(_))));
        let r = Poset::from_relation(ids(&[1, 2]), |a, b| a != b);
        assert!(matches!(r, Err(PosetError::NotAnOrder(_))));
    }
}
