//! Offline optimum: width and a minimum chain cover via bipartite matching.
//!
//! Split every element into a left and a right copy and join `x` (left) to
//! `y` (right) whenever `x < y`. Each matched edge glues two elements into
//! one chain, so a maximum matching of size `m` yields a cover by `n - m`
//! chains, which equals the width.

use std::collections::BTreeSet;

use crate::partition::{ChainPartition, Color};
use crate::poset::{ElementId, Poset, PosetError};

struct Matching {
    // successor[i] = j when left copy of i is matched to right copy of j
    successor: Vec<Option<usize>>,
    size: usize,
}

fn max_matching(ids: &[ElementId], p: &Poset) -> Matching {
    let n = ids.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| p.less(ids[i], ids[j])).collect())
        .collect();
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut successor = vec![None; n];
    let mut size = 0;

    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        pred: &mut [Option<usize>],
        successor: &mut [Option<usize>],
    ) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            let free = match pred[j] {
                None => true,
                Some(k) => augment(k, adj, seen, pred, successor),
            };
            if free {
                pred[j] = Some(i);
                successor[i] = Some(j);
                return true;
            }
        }
        false
    }

    for i in 0..n {
        let mut seen = vec![false; n];
        if augment(i, &adj, &mut seen, &mut pred, &mut successor) {
            size += 1;
        }
    }
    Matching { successor, size }
}

fn sorted_ids(p: &Poset) -> Vec<ElementId> {
    let mut ids = p.elements().to_vec();
    ids.sort();
    ids
}

impl Poset {
    /// Size of a largest antichain.
    pub fn width(&self) -> Result<usize, PosetError> {
        if self.is_empty() {
            return Err(PosetError::Empty);
        }
        let ids = sorted_ids(self);
        Ok(ids.len() - max_matching(&ids, self).size)
    }

    /// A partition into exactly `width()` chains. Chains are colored 1, 2, ...
    /// in order of their least element; round stamps are the element ids.
    pub fn min_chain_cover(&self) -> Result<ChainPartition, PosetError> {
        if self.is_empty() {
            return Err(PosetError::Empty);
        }
        let ids = sorted_ids(self);
        let m = max_matching(&ids, self);
        let has_pred: BTreeSet<usize> = m.successor.iter().flatten().copied().collect();
        let mut part = ChainPartition::new();
        let mut color = 0;
        for start in (0..ids.len()).filter(|i| !has_pred.contains(i)) {
            color += 1;
            let mut cur = Some(start);
            while let Some(i) = cur {
                part.assign(ids[i], Color(color), ids[i].0).expect("each element lies on one chain");
                cur = m.successor[i];
            }
        }
        Ok(part)
    }
}
