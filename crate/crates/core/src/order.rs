//! Linear orders (bottom to top) and realizers.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::poset::{ElementId, Poset, PosetError};

/// A total order on a finite set of elements, stored bottom to top.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ElementId>", into = "Vec<ElementId>")]
pub struct LinearOrder {
    seq: Vec<ElementId>,
    #[serde(skip)]
    pos: HashMap<ElementId, usize>,
}

impl TryFrom<Vec<ElementId>> for LinearOrder {
    type Error = PosetError;
    fn try_from(seq: Vec<ElementId>) -> Result<Self, PosetError> {
        LinearOrder::from_vec(seq)
    }
}

impl From<LinearOrder> for Vec<ElementId> {
    fn from(order: LinearOrder) -> Self {
        order.seq
    }
}

impl LinearOrder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vec(seq: Vec<ElementId>) -> Result<Self, PosetError> {
        let mut pos = HashMap::with_capacity(seq.len());
        for (i, &e) in seq.iter().enumerate() {
            if pos.insert(e, i).is_some() {
                return Err(PosetError::Duplicate(e));
            }
        }
        Ok(LinearOrder { seq, pos })
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.seq
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = ElementId> + '_ {
        self.seq.iter().copied()
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.pos.contains_key(&e)
    }

    pub fn position(&self, e: ElementId) -> Option<usize> {
        self.pos.get(&e).copied()
    }

    pub fn element_set(&self) -> BTreeSet<ElementId> {
        self.seq.iter().copied().collect()
    }

    /// `a` strictly before `b`. False if either is absent.
    pub fn precedes(&self, a: ElementId, b: ElementId) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) => i < j,
            _ => false,
        }
    }

    pub fn first(&self) -> Option<ElementId> {
        self.seq.first().copied()
    }

    pub fn last(&self) -> Option<ElementId> {
        self.seq.last().copied()
    }

    /// The element covering `x`, absent when `x` is on top.
    pub fn cover_above(&self, x: ElementId) -> Result<Option<ElementId>, PosetError> {
        let i = self.position(x).ok_or(PosetError::UnknownElement(x))?;
        Ok(self.seq.get(i + 1).copied())
    }

    /// The element `x` covers, absent when `x` is at the bottom.
    pub fn cover_below(&self, x: ElementId) -> Result<Option<ElementId>, PosetError> {
        let i = self.position(x).ok_or(PosetError::UnknownElement(x))?;
        Ok(if i == 0 { None } else { Some(self.seq[i - 1]) })
    }

    /// Inserts `e` immediately above `anchor`, or at the very bottom when
    /// `anchor` is `None`.
    pub fn insert_above(&mut self, anchor: Option<ElementId>, e: ElementId) -> Result<(), PosetError> {
        if self.contains(e) {
            return Err(PosetError::Duplicate(e));
        }
        let at = match anchor {
            None => 0,
            Some(a) => self.position(a).ok_or(PosetError::UnknownElement(a))? + 1,
        };
        self.seq.insert(at, e);
        for (i, &x) in self.seq.iter().enumerate().skip(at) {
            self.pos.insert(x, i);
        }
        Ok(())
    }

    pub fn push_top(&mut self, e: ElementId) -> Result<(), PosetError> {
        self.insert_above(self.last(), e)
    }

    /// The sub-order on `subset`.
    pub fn restrict(&self, subset: &BTreeSet<ElementId>) -> LinearOrder {
        LinearOrder::from_vec(self.seq.iter().copied().filter(|e| subset.contains(e)).collect())
            .expect("sub-sequence keeps uniqueness")
    }

    pub fn reversed(&self) -> LinearOrder {
        LinearOrder::from_vec(self.seq.iter().rev().copied().collect()).expect("reversal keeps uniqueness")
    }

    /// True when the order contains exactly the poset's elements and respects
    /// every relation of it.
    pub fn is_extension_of(&self, p: &Poset) -> bool {
        self.len() == p.len()
            && p.elements().iter().all(|&x| self.contains(x))
            && p.elements().iter().all(|&x| p.strictly_above(x).into_iter().all(|y| self.precedes(x, y)))
    }
}

/// A nonempty family of linear orders over one common element set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realizer {
    orders: Vec<LinearOrder>,
}

impl Realizer {
    pub fn new(orders: Vec<LinearOrder>) -> Result<Self, PosetError> {
        let first = orders.first().ok_or(PosetError::NoOrders)?;
        let base = first.element_set();
        if orders.iter().any(|o| o.len() != base.len() || o.element_set() != base) {
            return Err(PosetError::ElementSetMismatch);
        }
        Ok(Realizer { orders })
    }

    pub fn orders(&self) -> &[LinearOrder] {
        &self.orders
    }

    pub fn into_orders(self) -> Vec<LinearOrder> {
        self.orders
    }

    pub fn poset(&self) -> Poset {
        intersect(&self.orders).expect("validated at construction")
    }
}

/// The poset in which `x < y` iff `x` precedes `y` in every order. Elements
/// keep the first order's bottom-to-top sequence as insertion order.
pub fn intersect(orders: &[LinearOrder]) -> Result<Poset, PosetError> {
    let first = orders.first().ok_or(PosetError::NoOrders)?;
    let base = first.element_set();
    if orders.iter().any(|o| o.len() != base.len() || o.element_set() != base) {
        return Err(PosetError::ElementSetMismatch);
    }
    let mut ids = first.seq.clone();
    ids.sort();
    Poset::from_relation(ids, |a, b| orders.iter().all(|o| o.precedes(a, b)))
}

/// True iff every order extends `p` and their intersection is `p`.
pub fn verify_realizer(r: &Realizer, p: &Poset) -> Result<bool, PosetError> {
    let base = r.orders[0].element_set();
    if base.len() != p.len() || p.elements().iter().any(|e| !base.contains(e)) {
        return Err(PosetError::ElementSetMismatch);
    }
    if !r.orders.iter().all(|o| o.is_extension_of(p)) {
        return Ok(false);
    }
    Ok(intersect(&r.orders)? == *p)
}
