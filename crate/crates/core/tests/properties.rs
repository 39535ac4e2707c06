use std::collections::BTreeSet;

use olcp::adversary::{Adversary, StrategySpec, SzemerediStrategy};
use olcp::arena::{play, run_spec, Header};
use olcp::partitioner::RandomValid;
use olcp::{ElementId, Poset};
use proptest::prelude::*;

/// A random order on `n` points: `i < j` whenever the pair is drawn and
/// `i < j` as integers, then closed transitively.
fn random_poset() -> impl Strategy<Value = Poset> {
    (1usize..=12).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let mut less = vec![vec![false; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    less[i][j] = bits[i * n + j];
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if less[i][k] && less[k][j] {
                            less[i][j] = true;
                        }
                    }
                }
            }
            let ids: Vec<ElementId> = (1..=n as u32).map(ElementId).collect();
            Poset::from_relation(ids, |a, b| less[a.0 as usize - 1][b.0 as usize - 1]).unwrap()
        })
    })
}

fn brute_width(p: &Poset) -> usize {
    let els = p.elements();
    let n = els.len();
    (0u32..1 << n)
        .filter(|mask| {
            let set: Vec<ElementId> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| els[i]).collect();
            p.is_antichain(&set)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn width_matches_antichain_enumeration(p in random_poset()) {
        let w = p.width().unwrap();
        prop_assert_eq!(w, brute_width(&p));
        let cover = p.min_chain_cover().unwrap();
        prop_assert_eq!(cover.color_count(), w);
        prop_assert!(cover.verify(&p).unwrap().is_empty());
    }

    #[test]
    fn duality(p in random_poset()) {
        let d = p.dual();
        prop_assert_eq!(d.width().unwrap(), p.width().unwrap());
        prop_assert_eq!(d.dual(), p.clone());
        for &x in p.elements() {
            prop_assert_eq!(d.down_set(x).unwrap(), p.up_set(x).unwrap());
        }
        prop_assert!(p.axiom_failures().is_empty());
    }

    #[test]
    fn growth_keeps_old_relations(p in random_poset(), pick in any::<u64>()) {
        let els = p.elements().to_vec();
        let x = els[(pick as usize) % els.len()];
        let below: BTreeSet<ElementId> = p.down_set(x).unwrap();
        let (q, e) = p.add_element(&below, &BTreeSet::new()).unwrap();
        prop_assert_eq!(q.restrict(&els.iter().copied().collect()), p.clone());
        prop_assert_eq!(q.strictly_below(e), below);
    }

    #[test]
    fn random_r_games_verify(w in 1u32..=5, seed in any::<u64>()) {
        let (_, report) = run_spec(StrategySpec::Szemeredi { w, k: w }, &mut RandomValid::new(seed)).unwrap();
        prop_assert!(report.is_ok(), "{}", report);
        prop_assert!(report.colors as u32 >= w * (w + 1) / 2);
    }

    #[test]
    fn every_k_builds_the_same_poset(w in 1u32..=5, seed in any::<u64>()) {
        let mut reference: Option<Poset> = None;
        for k in 1..=w {
            // the colors come from a fixed seed, so every k faces the same partitioner
            let mut s = SzemerediStrategy::new(i64::from(k), w).unwrap();
            let header = Header::new(s.spec(), "random", Some(seed));
            let (_, p, _) = play(&mut s, &mut RandomValid::new(seed), header).unwrap();
            match &reference {
                None => reference = Some(p),
                Some(r) => prop_assert_eq!(r, &p),
            }
        }
    }
}
