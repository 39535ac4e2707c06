use super::transcript::{Header, Round, Transcript};
use super::verify::audit;
use super::{ArenaError, GameReport, BOUND_TOLERANCE};
use crate::adversary::{Adversary, StrategySpec};
use crate::partition::ChainPartition;
use crate::partitioner::{Partitioner, PartitionerView};
use crate::poset::Poset;

/// Alternates moves and colors until the adversary is done. Every color is
/// checked before it is accepted.
pub fn play(
    adversary: &mut dyn Adversary,
    partitioner: &mut dyn Partitioner,
    header: Header,
) -> Result<(Transcript, Poset, ChainPartition), ArenaError> {
    let mut p = Poset::new();
    let mut part = ChainPartition::new();
    let mut rounds = Vec::new();
    loop {
        let e = p.next_id();
        let round = rounds.len() as u32 + 1;
        let Some(m) = adversary.next_move(e, &p, &part)? else { break };
        if m.element != e {
            return Err(ArenaError::Strategy(crate::adversary::StrategyError::InvariantViolated(format!(
                "round {round}: move introduces {} instead of {e}",
                m.element
            ))));
        }
        p.insert_element(&m.below, &m.above).map_err(|source| ArenaError::BadMove { round, source })?;
        let color = {
            let view = PartitionerView {
                round,
                element: e,
                below: &m.below,
                above: &m.above,
                poset: &p,
                partition: &part,
                extensions: adversary.presented_extensions(),
                positions: m.extension_positions.as_deref(),
            };
            let color = partitioner.choose(&view)?;
            if color.0 == 0 {
                return Err(ArenaError::IllegalPartitionMove { round, element: e, color, conflict: "color 0".into() });
            }
            if let Some(x) = part.conflict(&p, e, color) {
                return Err(ArenaError::IllegalPartitionMove {
                    round,
                    element: e,
                    color,
                    conflict: format!("incomparable element {x}"),
                });
            }
            color
        };
        part.assign(e, color, round).map_err(crate::adversary::StrategyError::from)?;
        adversary.observe(e, color, &p, &part)?;
        rounds.push(Round::new(round, &m, color));
    }
    Ok((Transcript { header, rounds }, p, part))
}

/// Plays a game and checks the record by replaying it.
pub fn run_game(
    adversary: &mut dyn Adversary,
    partitioner: &mut dyn Partitioner,
) -> Result<(Transcript, GameReport), ArenaError> {
    let spec = adversary.spec();
    let header = Header::new(spec, partitioner.name(), partitioner.seed());
    let (transcript, _, _) = play(adversary, partitioner, header)?;
    let a = audit(&transcript);
    let bound = spec.bound();
    let report = GameReport {
        strategy: spec,
        partitioner: partitioner.name().to_string(),
        seed: partitioner.seed(),
        points: a.points,
        colors: a.colors,
        width: a.width,
        bound,
        bound_met: a.colors as f64 + BOUND_TOLERANCE >= bound,
        levels: a.levels,
        realizer_ok: a.realizer_ok,
        violations: a.violations,
    };
    Ok((transcript, report))
}

/// [`run_game`] with a fresh adversary for `spec`.
pub fn run_spec(spec: StrategySpec, partitioner: &mut dyn Partitioner) -> Result<(Transcript, GameReport), ArenaError> {
    let mut adversary = spec.build()?;
    run_game(adversary.as_mut(), partitioner)
}
