//! Replays a transcript and checks every structural claim of the strategy
//! that produced it.
//!
//! Pass one rebuilds the poset, the coloring and (for `theorem2`) the
//! presented extensions from the recorded rows alone. Relations between old
//! elements never change, so checking each new element against the earlier
//! ones is the same as checking everything after every round. Pass two
//! re-runs the named strategy against the recorded colors and compares its
//! moves with the record, which catches extension positions that differ from
//! the ones the strategy assigns. Pass three audits the strategy's
//! certificate; it is skipped once an earlier pass has found a problem,
//! since a strategy fed broken input diverges from the record anyway.

use std::collections::BTreeSet;

use super::game::play;
use super::transcript::{Round, Transcript};
use super::{ArenaError, Violation, ViolationKind as K};
use crate::adversary::rainbow::{choose_t_theorem1, choose_t_theorem2, separation_failures};
use crate::adversary::{bounds, Adversary, Certificate, LevelCertificate, LevelReport, SeparationClaim, StrategySpec};
use crate::order::{intersect, LinearOrder};
use crate::partition::{ChainPartition, Color};
use crate::partitioner::Replay;
use crate::poset::{ElementId, Poset, Relatedness};

/// Everything the verifier learned about a transcript.
#[derive(Debug, Clone, Default)]
pub struct Audit {
    pub points: usize,
    /// Distinct colors counted from the rounds.
    pub colors: usize,
    pub width: usize,
    pub levels: Vec<LevelReport>,
    pub realizer_ok: Option<bool>,
    pub violations: Vec<Violation>,
}

pub fn verify_transcript(t: &Transcript) -> Vec<Violation> {
    audit(t).violations
}

pub fn audit(t: &Transcript) -> Audit {
    let mut out = Audit::default();
    let spec = match t.header.strategy_spec() {
        Ok(s) => s,
        Err(msg) => {
            out.violations.push(Violation::new(K::Header, None, msg));
            return out;
        }
    };
    if let Err(e) = spec.build() {
        out.violations.push(Violation::new(K::Header, None, e.to_string()));
        return out;
    }
    let Some((p, part, exts)) = replay_rows(t, spec, &mut out.violations) else {
        return out;
    };
    out.points = p.len();
    out.colors = t.rounds.iter().map(|r| r.color).collect::<BTreeSet<Color>>().len();
    match p.width() {
        Ok(w) => out.width = w,
        Err(e) => out.violations.push(Violation::new(K::Width, None, e.to_string())),
    }
    check_chain_cover(&p, out.width, &mut out.violations);
    let clean = out.violations.is_empty();
    if let Some(cert) = rerun(t, spec, clean, &mut out.violations) {
        if clean {
            audit_certificate(t, spec, &cert, &p, &part, exts.as_deref(), &mut out);
        }
    }
    out
}

fn replay_rows(
    t: &Transcript,
    spec: StrategySpec,
    v: &mut Vec<Violation>,
) -> Option<(Poset, ChainPartition, Option<Vec<LinearOrder>>)> {
    let mut p = Poset::new();
    let mut part = ChainPartition::new();
    let mut exts = spec.dim().map(|d| vec![LinearOrder::new(); d as usize]);
    for (i, r) in t.rounds.iter().enumerate() {
        let round = Some(r.round);
        if r.round as usize != i + 1 {
            v.push(Violation::new(K::Sequence, round, format!("expected round {}", i + 1)));
            return None;
        }
        let e = p.next_id();
        if r.element != e {
            v.push(Violation::new(K::Sequence, round, format!("element {} should be {e}", r.element)));
            return None;
        }
        if let Err(err) = p.insert_element(&r.below, &r.above) {
            v.push(Violation::new(K::Poset, round, err.to_string()));
            return None;
        }
        if r.color.0 == 0 {
            v.push(Violation::new(K::ChainPartition, round, format!("element {e} has color 0")));
        } else {
            if let Some(members) = part.classes().get(&r.color) {
                for &x in members {
                    if !p.comparable(x, e) {
                        v.push(Violation::new(
                            K::ChainPartition,
                            round,
                            format!("elements {x} and {e} share color {} but are incomparable", r.color),
                        ));
                    }
                }
            }
            part.assign(e, r.color, r.round).expect("fresh element");
        }
        match (&mut exts, &r.ext) {
            (None, None) => {}
            (None, Some(_)) => v.push(Violation::new(K::Sequence, round, "extension positions in a game without presented extensions")),
            (Some(_), None) => {
                v.push(Violation::new(K::ExtensionGrowth, round, "no extension positions"));
                exts = None;
            }
            (Some(orders), Some(_)) => {
                if !grow_extensions(orders, r, &p, v) {
                    exts = None;
                }
            }
        }
    }
    for msg in p.axiom_failures() {
        v.push(Violation::new(K::Poset, None, msg));
    }
    Some((p, part, exts))
}

/// Inserts the round's element into every extension and checks the new
/// pairs. Returns false once the extensions can no longer be tracked.
fn grow_extensions(orders: &mut [LinearOrder], r: &Round, p: &Poset, v: &mut Vec<Violation>) -> bool {
    let round = Some(r.round);
    let e = r.element;
    let rows = r.positions().unwrap_or_default();
    if rows.len() != orders.len() {
        v.push(Violation::new(K::ExtensionGrowth, round, format!("{} extension rows for {} extensions", rows.len(), orders.len())));
        return false;
    }
    for (j, &(slot, anchor)) in rows.iter().enumerate() {
        if slot != j {
            v.push(Violation::new(K::ExtensionGrowth, round, format!("row {j} names extension {slot}")));
            return false;
        }
        if let Err(err) = orders[j].insert_above(anchor, e) {
            v.push(Violation::new(K::ExtensionGrowth, round, format!("extension {j}: {err}")));
            return false;
        }
    }
    for (j, o) in orders.iter().enumerate() {
        let pos = o.position(e).expect("just inserted");
        let misplaced = p
            .strictly_below(e)
            .into_iter()
            .find(|&x| o.position(x).is_some_and(|q| q > pos))
            .or_else(|| p.strictly_above(e).into_iter().find(|&x| o.position(x).is_some_and(|q| q < pos)));
        if let Some(x) = misplaced {
            v.push(Violation::new(
                K::ExtensionGrowth,
                round,
                format!("extension {j} puts {e} on the wrong side of comparable {x}"),
            ));
        }
    }
    for &x in p.elements() {
        if x == e || p.comparable(x, e) {
            continue;
        }
        if orders.iter().all(|o| o.precedes(x, e)) || orders.iter().all(|o| o.precedes(e, x)) {
            v.push(Violation::new(
                K::Realizer,
                round,
                format!("{x} and {e} are incomparable but ordered alike in every extension"),
            ));
        }
    }
    true
}

fn check_chain_cover(p: &Poset, width: usize, v: &mut Vec<Violation>) {
    match p.min_chain_cover() {
        Ok(cover) => {
            if cover.color_count() != width {
                v.push(Violation::new(K::Width, None, format!("{} chains cover a poset of width {width}", cover.color_count())));
            }
            match cover.verify(p) {
                Ok(bad) if bad.is_empty() => {}
                Ok(bad) => v.push(Violation::new(K::Width, None, format!("minimum chain cover: {}", bad[0]))),
                Err(e) => v.push(Violation::new(K::Width, None, e.to_string())),
            }
        }
        Err(e) => v.push(Violation::new(K::Width, None, e.to_string())),
    }
}

/// Plays `spec` against `colors` and compares each move with `rows`.
fn compare_replay(
    spec: StrategySpec,
    t: &Transcript,
    colors: Vec<Color>,
    check_ext: bool,
    clean: bool,
    kind: K,
    v: &mut Vec<Violation>,
) -> Option<(Box<dyn Adversary>, Poset, ChainPartition)> {
    let mut adv = match spec.build() {
        Ok(a) => a,
        Err(e) => {
            v.push(Violation::new(K::Header, None, e.to_string()));
            return None;
        }
    };
    let n = colors.len();
    // With broken rows the replay may stop at a color the first pass has
    // already reported.
    let quiet = !clean;
    let mut replay = Replay::new(t.header.partitioner.clone(), colors);
    let (played, p, part) = match play(adv.as_mut(), &mut replay, t.header.clone()) {
        Ok(x) => x,
        Err(_) if quiet => return None,
        Err(ArenaError::Partitioner(_)) => {
            v.push(Violation::new(kind, None, format!("{spec} is not done after the {n} recorded rounds")));
            return None;
        }
        Err(e) => {
            v.push(Violation::new(K::Strategy, None, format!("{spec}: {e}")));
            return None;
        }
    };
    let before = v.len();
    if played.rounds.len() != t.rounds.len() {
        v.push(Violation::new(
            kind,
            None,
            format!("{spec} ends after {} rounds, the record has {}", played.rounds.len(), t.rounds.len()),
        ));
    }
    for (a, b) in played.rounds.iter().zip(&t.rounds) {
        let round = Some(b.round);
        if a.below != b.below || a.above != b.above {
            v.push(Violation::new(kind, round, format!("{spec} presents different relations for {}", b.element)));
        }
        if !check_ext {
            continue;
        }
        if a.ext != b.ext {
            v.push(Violation::new(K::ExtensionGrowth, round, "extension positions differ from the strategy's"));
        }
        if (a.level, a.stage) != (b.level, b.stage) {
            v.push(Violation::new(
                K::Replay,
                round,
                format!("annotated level {} stage {}, strategy says level {} stage {}", b.level, b.stage, a.level, a.stage),
            ));
        }
    }
    (v.len() == before).then_some((adv, p, part))
}

fn rerun(t: &Transcript, spec: StrategySpec, clean: bool, v: &mut Vec<Violation>) -> Option<Certificate> {
    let (adv, p, part) = compare_replay(spec, t, t.colors(), true, clean, K::Replay, v)?;
    match adv.certificate(&p, &part) {
        Ok(cert) => Some(cert),
        Err(_) if !clean => None,
        Err(e) => {
            v.push(Violation::new(K::Strategy, None, e.to_string()));
            None
        }
    }
}

fn check_separation(claim: &SeparationClaim, v: &mut Vec<Violation>) {
    if let Some((x, y)) = separation_failures(&claim.order, &claim.first, &claim.then).first() {
        v.push(Violation::new(K::Separation, None, format!("{}: {y} comes before {x}", claim.label)));
    }
}

fn audit_certificate(
    t: &Transcript,
    spec: StrategySpec,
    cert: &Certificate,
    p: &Poset,
    part: &ChainPartition,
    exts: Option<&[LinearOrder]>,
    out: &mut Audit,
) {
    let v = &mut out.violations;
    let w = spec.width();
    if out.width != w as usize {
        v.push(Violation::new(K::Width, None, format!("presented width {} for a width-{w} strategy", out.width)));
    }
    match cert {
        Certificate::Szemeredi { w, k, chains, separations, hosts } => {
            let all: BTreeSet<ElementId> = p.elements().iter().copied().collect();
            for msg in chains.property_failures(p, part, &all) {
                v.push(Violation::new(K::Rainbow, None, msg));
            }
            let union = chains.union();
            let target = bounds::szemeredi_bound(*w) as usize;
            if union.len() != target || chains.width() != *w {
                v.push(Violation::new(K::ColorAccounting, None, format!("rainbow union has {} points, expected {target}", union.len())));
            }
            for c in separations {
                check_separation(c, v);
            }
            let ok = intersect(hosts).is_ok_and(|q| q == *p);
            if !ok {
                v.push(Violation::new(K::Realizer, None, "the two hosts do not intersect to the presented poset"));
            }
            out.realizer_ok = Some(ok);
            for k2 in 1..=*w {
                if k2 != *k {
                    compare_replay(StrategySpec::Szemeredi { w: *w, k: k2 }, t, t.colors(), false, true, K::SamePoset, v);
                }
            }
        }
        Certificate::Theorem1 { levels, realizer } => {
            audit_levels(levels, p, part, None, out);
            let ok = crate::order::verify_realizer(realizer, p).unwrap_or(false);
            if !ok {
                out.violations.push(Violation::new(K::Realizer, None, "assembled two-order realizer does not realize the poset"));
            }
            out.realizer_ok = Some(ok);
        }
        Certificate::Theorem2 { d, levels, extensions } => {
            audit_levels(levels, p, part, Some(*d), out);
            if exts.is_some_and(|e| e != extensions.as_slice()) {
                out.violations.push(Violation::new(K::ExtensionGrowth, None, "final extensions differ from the replayed ones"));
            }
            let ok = intersect(extensions).is_ok_and(|q| q == *p) && extensions.iter().all(|o| o.is_extension_of(p));
            if !ok {
                out.violations.push(Violation::new(K::Realizer, None, "presented extensions do not realize the poset"));
            }
            out.realizer_ok = Some(ok);
        }
    }
}

fn audit_levels(levels: &[LevelCertificate], p: &Poset, part: &ChainPartition, d: Option<u32>, out: &mut Audit) {
    let v = &mut out.violations;
    let dual = p.dual();
    let mut used_colors: BTreeSet<Color> = BTreeSet::new();
    let mut total = 0;
    for l in levels {
        let w = l.width;
        let tag = |s: String| format!("level {w}: {s}");
        for msg in l.c_chains.property_failures(p, part, &l.stage1) {
            v.push(Violation::new(K::Rainbow, None, tag(format!("C chains: {msg}"))));
        }
        for msg in l.d_chains.property_failures(&dual, part, &l.stage2) {
            v.push(Violation::new(K::Rainbow, None, tag(format!("D chains: {msg}"))));
        }
        if l.c_chains.width() != w || l.d_chains.width() != w {
            v.push(Violation::new(K::Rainbow, None, tag("wrong number of chains".into())));
            continue;
        }
        let d_w = l.d_chains.get(w).cloned().unwrap_or_default();
        let recomputed = match d {
            None => choose_t_theorem1(&l.c_chains, &d_w, part),
            Some(d) => choose_t_theorem2(&l.c_chains, &d_w, part, d),
        };
        match recomputed {
            Ok((t, r)) => {
                if t != l.report.t || r != l.report {
                    v.push(Violation::new(K::Threshold, None, tag(format!("reported t = {}, recomputed t = {t}", l.report.t))));
                }
            }
            Err(e) => v.push(Violation::new(K::Threshold, None, tag(e.to_string()))),
        }
        let expected = match d {
            None => bounds::theorem1_level_threshold(w),
            Some(d) => bounds::theorem2_level_threshold(w, d).unwrap_or(f64::NAN),
        };
        if !l.report.meets_threshold() || l.report.threshold != expected || l.report.strict != d.is_none() {
            v.push(Violation::new(
                K::Threshold,
                None,
                tag(format!("{} separator colors against threshold {expected:.4}", l.report.separator_colors)),
            ));
        }
        for c in &l.separations {
            check_separation(c, v);
        }
        for (label, family) in &l.realizing_families {
            let Some(first) = family.first() else { continue };
            let ok = intersect(family).is_ok_and(|q| q == p.restrict(&first.element_set()));
            if !ok {
                v.push(Violation::new(K::Realizer, None, format!("{label} do not realize the subposet")));
            }
        }
        let t = l.report.t;
        let c_t = l.c_chains.get(t).cloned().unwrap_or_default();
        let separator: BTreeSet<ElementId> = c_t.union(&d_w).copied().collect();
        let mut stage = |u: &BTreeSet<ElementId>, x: &BTreeSet<ElementId>, want: Relatedness, what: &str| {
            if u.is_empty() || x.is_empty() {
                return;
            }
            match p.completely_related(u, x) {
                Ok(r) if r == want => {}
                Ok(r) => v.push(Violation::new(K::Stage, None, tag(format!("{what}: found {r:?}")))),
                Err(e) => v.push(Violation::new(K::Stage, None, tag(format!("{what}: {e}")))),
            }
        };
        stage(&l.stage2, &l.stage1, Relatedness::Below, "S_2 < S_1");
        let s1_rest: BTreeSet<ElementId> = l.stage1.difference(&c_t).copied().collect();
        let s2_rest: BTreeSet<ElementId> = l.stage2.difference(&d_w).copied().collect();
        stage(&l.stage3, &separator, Relatedness::Incomparable, "S_3 against C_t ∪ D_w");
        stage(&l.stage3, &s1_rest, Relatedness::Below, "S_3 < S_1 \\ C_t");
        stage(&s2_rest, &l.stage3, Relatedness::Below, "S_2 \\ D_w < S_3");

        match part.colors_of(&separator) {
            Ok(colors) => {
                if let Some(c) = colors.intersection(&used_colors).next() {
                    v.push(Violation::new(K::ColorAccounting, None, tag(format!("color {c} also separates another level"))));
                }
                if colors.len() != l.report.separator_colors {
                    v.push(Violation::new(K::ColorAccounting, None, tag("separator color count mismatch".into())));
                }
                used_colors.extend(colors);
            }
            Err(e) => v.push(Violation::new(K::ColorAccounting, None, tag(e.to_string()))),
        }
        total += l.report.separator_colors;
        out.levels.push(l.report.clone());
    }
    if out.colors < total {
        v.push(Violation::new(
            K::ColorAccounting,
            None,
            format!("{} colors in the game but levels account for {total}", out.colors),
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Header;
    use crate::partitioner::FirstFit;

    /// A finished game with its certificate, ready to be tampered with.
    fn finished(spec: StrategySpec) -> (Transcript, Certificate, Poset, ChainPartition, Option<Vec<LinearOrder>>) {
        let mut adv = spec.build().unwrap();
        let (t, p, part) = play(adv.as_mut(), &mut FirstFit, Header::new(spec, "first-fit", None)).unwrap();
        let cert = adv.certificate(&p, &part).unwrap();
        let exts = adv.presented_extensions().map(<[LinearOrder]>::to_vec);
        (t, cert, p, part, exts)
    }

    fn kinds(spec: StrategySpec, cert: &Certificate, t: &Transcript, p: &Poset, part: &ChainPartition, exts: Option<&[LinearOrder]>) -> Vec<K> {
        let mut out = Audit { width: p.width().unwrap(), colors: part.color_count(), ..Audit::default() };
        audit_certificate(t, spec, cert, p, part, exts, &mut out);
        out.violations.iter().map(|v| v.kind).collect()
    }

    #[test]
    fn clean_certificates_pass() {
        for spec in [
            StrategySpec::Szemeredi { w: 3, k: 2 },
            StrategySpec::Theorem1 { w: 3 },
            StrategySpec::Theorem2 { w: 3, d: 3 },
        ] {
            let (t, cert, p, part, exts) = finished(spec);
            assert_eq!(kinds(spec, &cert, &t, &p, &part, exts.as_deref()), vec![]);
        }
    }

    #[test]
    fn reversed_separation_order_is_caught() {
        let spec = StrategySpec::Theorem1 { w: 3 };
        let (t, mut cert, p, part, _) = finished(spec);
        let Certificate::Theorem1 { levels, .. } = &mut cert else { unreachable!() };
        let claim = levels[0].separations.iter_mut().find(|c| !c.first.is_empty() && !c.then.is_empty()).unwrap();
        claim.order = claim.order.reversed();
        assert!(kinds(spec, &cert, &t, &p, &part, None).contains(&K::Separation));
    }

    #[test]
    fn broken_chains_and_reports_are_caught() {
        let spec = StrategySpec::Theorem2 { w: 3, d: 3 };
        let (t, cert, p, part, exts) = finished(spec);

        let mut bad = cert.clone();
        let Certificate::Theorem2 { levels, .. } = &mut bad else { unreachable!() };
        let c3 = levels[0].c_chains.chains[2].clone();
        levels[0].c_chains.chains[1] = c3;
        assert!(kinds(spec, &bad, &t, &p, &part, exts.as_deref()).contains(&K::Rainbow));

        let mut bad = cert.clone();
        let Certificate::Theorem2 { levels, .. } = &mut bad else { unreachable!() };
        levels[0].report.separator_colors += 1;
        let k = kinds(spec, &bad, &t, &p, &part, exts.as_deref());
        assert!(k.contains(&K::Threshold) && k.contains(&K::ColorAccounting), "{k:?}");

        let mut bad = cert;
        let Certificate::Theorem2 { extensions, .. } = &mut bad else { unreachable!() };
        extensions[0] = extensions[0].reversed();
        assert!(kinds(spec, &bad, &t, &p, &part, exts.as_deref()).contains(&K::Realizer));
    }

    #[test]
    fn wrong_hosts_are_caught() {
        let spec = StrategySpec::Szemeredi { w: 3, k: 3 };
        let (t, mut cert, p, part, _) = finished(spec);
        let Certificate::Szemeredi { hosts, .. } = &mut cert else { unreachable!() };
        hosts[1] = hosts[0].clone();
        assert!(kinds(spec, &cert, &t, &p, &part, None).contains(&K::Realizer));
    }
}
