//! JSON-lines game records: a header line, then one line per round.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ArenaError;
use crate::adversary::{Move, StrategySpec};
use crate::partition::Color;
use crate::poset::ElementId;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub version: u32,
    pub strategy: String,
    pub w: u32,
    pub d: Option<u32>,
    /// Only for `szemeredi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub partitioner: String,
    pub seed: Option<u64>,
}

impl Header {
    pub fn new(spec: StrategySpec, partitioner: &str, seed: Option<u64>) -> Self {
        Header {
            version: FORMAT_VERSION,
            strategy: spec.name().to_string(),
            w: spec.width(),
            d: spec.dim(),
            k: match spec {
                StrategySpec::Szemeredi { k, .. } => Some(k),
                _ => None,
            },
            partitioner: partitioner.to_string(),
            seed,
        }
    }

    pub fn strategy_spec(&self) -> Result<StrategySpec, String> {
        match (self.strategy.as_str(), self.d) {
            ("szemeredi", None) => Ok(StrategySpec::Szemeredi { w: self.w, k: self.k.unwrap_or(self.w) }),
            ("theorem1", None) => Ok(StrategySpec::Theorem1 { w: self.w }),
            ("theorem2", Some(d)) => Ok(StrategySpec::Theorem2 { w: self.w, d }),
            ("theorem2", None) => Err("theorem2 header without d".into()),
            (s, Some(_)) if s == "szemeredi" || s == "theorem1" => Err(format!("{s} header with d")),
            (s, _) => Err(format!("unknown strategy {s:?}")),
        }
    }
}

/// Where a new element went in one extension: directly above an element,
/// or at the bottom. Serialized as the id or `"BOTTOM"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anchor(pub Option<ElementId>);

impl Serialize for Anchor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(e) => s.serialize_u32(e.0),
            None => s.serialize_str("BOTTOM"),
        }
    }
}

impl<'de> Deserialize<'de> for Anchor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Anchor;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an element id or \"BOTTOM\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Anchor, E> {
                u32::try_from(v).map(|v| Anchor(Some(ElementId(v)))).map_err(|_| E::custom("id out of range"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Anchor, E> {
                if v == "BOTTOM" {
                    Ok(Anchor(None))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub round: u32,
    pub element: ElementId,
    pub below: BTreeSet<ElementId>,
    pub above: BTreeSet<ElementId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ext: Option<Vec<(usize, Anchor)>>,
    pub color: Color,
    pub level: u32,
    pub stage: u8,
}

impl Round {
    pub fn new(round: u32, m: &Move, color: Color) -> Self {
        Round {
            round,
            element: m.element,
            below: m.below.clone(),
            above: m.above.clone(),
            ext: m.extension_positions.as_ref().map(|v| v.iter().map(|&(i, a)| (i, Anchor(a))).collect()),
            color,
            level: m.level,
            stage: m.stage,
        }
    }

    pub fn positions(&self) -> Option<Vec<(usize, Option<ElementId>)>> {
        self.ext.as_ref().map(|v| v.iter().map(|&(i, a)| (i, a.0)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub header: Header,
    pub rounds: Vec<Round>,
}

impl Transcript {
    pub fn colors(&self) -> Vec<Color> {
        self.rounds.iter().map(|r| r.color).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for r in &self.rounds {
            out.push_str(&serde_json::to_string(r).expect("round serializes"));
            out.push('\n');
        }
        out
    }

    /// Blank lines are skipped; errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self, ArenaError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, first) = lines.next().ok_or(ArenaError::Parse { line: 1, message: "empty transcript".into() })?;
        let header: Header =
            serde_json::from_str(first).map_err(|e| ArenaError::Parse { line: hl + 1, message: e.to_string() })?;
        if header.version != FORMAT_VERSION {
            return Err(ArenaError::Parse {
                line: hl + 1,
                message: format!("unsupported version {}", header.version),
            });
        }
        let rounds = lines
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| ArenaError::Parse { line: i + 1, message: e.to_string() }))
            .collect::<Result<_, _>>()?;
        Ok(Transcript { header, rounds })
    }

    pub fn write(&self, path: &Path) -> Result<(), ArenaError> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| ArenaError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn read(path: &Path) -> Result<Self, ArenaError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ArenaError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Transcript {
        Transcript {
            header: Header::new(StrategySpec::Theorem2 { w: 2, d: 3 }, "random", Some(5)),
            rounds: vec![
                Round {
                    round: 1,
                    element: ElementId(1),
                    below: BTreeSet::new(),
                    above: BTreeSet::new(),
                    ext: Some(vec![(0, Anchor(None)), (1, Anchor(None)), (2, Anchor(None))]),
                    color: Color(1),
                    level: 2,
                    stage: 1,
                },
                Round {
                    round: 2,
                    element: ElementId(2),
                    below: [ElementId(1)].into(),
                    above: BTreeSet::new(),
                    ext: Some(vec![(0, Anchor(Some(ElementId(1)))), (1, Anchor(None)), (2, Anchor(Some(ElementId(1))))]),
                    color: Color(1),
                    level: 2,
                    stage: 1,
                },
            ],
        }
    }

    #[test]
    fn line_format() {
        let text = sample().to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], r#"{"version":1,"strategy":"theorem2","w":2,"d":3,"partitioner":"random","seed":5}"#);
        assert_eq!(
            lines[2],
            r#"{"round":2,"element":2,"below":[1],"above":[],"ext":[[0,1],[1,"BOTTOM"],[2,1]],"color":1,"level":2,"stage":1}"#
        );
    }

    #[test]
    fn round_trip() {
        let t = sample();
        assert_eq!(Transcript::parse(&t.to_jsonl()).unwrap(), t);
        let mut r = Transcript { header: Header::new(StrategySpec::Szemeredi { w: 3, k: 2 }, "first-fit", None), ..t };
        r.rounds.iter_mut().for_each(|x| x.ext = None);
        assert!(!r.to_jsonl().contains("ext"));
        assert_eq!(Transcript::parse(&r.to_jsonl()).unwrap(), r);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let mut text = sample().to_jsonl();
        text.push_str("{\"round\":3}\n");
        match Transcript::parse(&text) {
            Err(ArenaError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(Transcript::parse(""), Err(ArenaError::Parse { line: 1, .. })));
        let bad = sample().to_jsonl().replace("\"BOTTOM\"", "\"TOP\"");
        // round 1 is the first line after the header
        assert!(matches!(Transcript::parse(&bad), Err(ArenaError::Parse { line: 2, .. })));
    }

    #[test]
    fn header_specs() {
        let h = Header::new(StrategySpec::Szemeredi { w: 3, k: 1 }, "first-fit", None);
        assert_eq!(h.strategy_spec().unwrap(), StrategySpec::Szemeredi { w: 3, k: 1 });
        let h = Header { d: None, ..Header::new(StrategySpec::Theorem2 { w: 3, d: 2 }, "x", None) };
        assert!(h.strategy_spec().is_err());
    }
}
