//! JSON model documents: a finite model with named covers and a self-map, or a
//! circle with arcs and a piecewise-linear map that is sampled into a finite
//! model.
//!
//! ```json
//! { "type": "finite", "vertices": ["a", "b", "c"],
//!   "cover": [["a", "b"], ["b", "c"], ["c", "a"]],
//!   "covers": { "whole": [["a", "b", "c"]] },
//!   "map": ["b", "c", "a"] }
//!
//! { "type": "circle", "samples": 16,
//!   "arcs": { "count": 11, "length": "3/8" },
//!   "pl_map": { "breakpoints": ["0"], "slopes": ["2"] },
//!   "covers": { "pairs": [["31/32", "1/8"], ["1/32", "1/8"], …] } }
//! ```
//!
//! Rationals are `"p/q"` strings. An arc list is either explicit
//! `[[start, length], …]` or `{"count", "length", "offset"}` for equally spaced
//! arcs starting at `offset + k/count`. Circle documents also expose the
//! window covers of the cyclically ordered samples as `window-<w>`.

use std::collections::BTreeMap;
use std::sync::Arc as Shared;

use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{format_rational, serde_q, Q};
use crate::spaces::{sample_circle, window_cover, Arc, CircleSystem, Cover, FiniteModel, PlMap};

#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Int(i64),
    Str(String),
}

impl RawId {
    fn label(&self) -> String {
        match self {
            RawId::Int(i) => i.to_string(),
            RawId::Str(s) => s.clone(),
        }
    }
}

#[derive(Deserialize)]
struct Rat(#[serde(with = "serde_q")] Q);

#[derive(Deserialize)]
#[serde(untagged)]
enum RawArcs {
    List(Vec<(Rat, Rat)>),
    Spaced { count: usize, length: Rat, offset: Option<Rat> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlMap {
    breakpoints: Vec<Rat>,
    slopes: Vec<Rat>,
    offset: Option<Rat>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawDoc {
    Finite {
        vertices: Vec<RawId>,
        cover: Vec<Vec<RawId>>,
        #[serde(default)]
        covers: BTreeMap<String, Vec<Vec<RawId>>>,
        map: Option<Vec<RawId>>,
    },
    Circle {
        arcs: RawArcs,
        pl_map: RawPlMap,
        samples: usize,
        #[serde(default)]
        covers: BTreeMap<String, RawArcs>,
    },
}

/// The circle part of a circle document.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleModel {
    pub system: CircleSystem,
    pub samples: usize,
    pub sample: Vec<Q>,
    pub arc_covers: Vec<(String, Vec<Arc>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelDocument {
    /// The finite model; for circle documents, the sampled model.
    pub finite: FiniteModel,
    pub circle: Option<CircleModel>,
}

fn is_reserved(name: &str) -> bool {
    name == "cover" || name == "default" || name.starts_with("window-")
}

fn arcs_from_raw(raw: RawArcs) -> Result<Vec<Arc>> {
    match raw {
        RawArcs::List(v) => v.into_iter().map(|(s, l)| Arc::new(s.0, l.0)).collect(),
        RawArcs::Spaced { count, length, offset } => {
            if count == 0 {
                return Err(Error::Input("arc count must be positive".into()));
            }
            let offset = offset.map_or_else(|| Q::from_integer(0.into()), |o| o.0);
            (0..count)
                .map(|k| {
                    let start = &offset + Q::new((k as i64).into(), (count as i64).into());
                    Arc::new(start, length.0.clone())
                })
                .collect()
        }
    }
}

fn arc_json(a: &Arc) -> Value {
    let length = if a.is_full() { "1".to_string() } else { format_rational(&a.length) };
    json!([format_rational(&a.start), length])
}

impl ModelDocument {
    /// Parses a document; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDoc = serde_json::from_str(text).map_err(|e| {
            let mut message = e.to_string();
            if let Some(i) = message.rfind(" at line ") {
                message.truncate(i);
            }
            Error::Parse { line: e.line(), column: e.column(), message }
        })?;
        match raw {
            RawDoc::Finite { vertices, cover, covers, map } => {
                let labels: Vec<String> = vertices.iter().map(RawId::label).collect();
                let mut index = BTreeMap::new();
                for (i, l) in labels.iter().enumerate() {
                    if index.insert(l.clone(), i).is_some() {
                        return Err(Error::Input(format!("duplicate vertex {l:?}")));
                    }
                }
                let lookup = |id: &RawId| {
                    let l = id.label();
                    index.get(&l).copied().ok_or_else(|| Error::Input(format!("unknown vertex {l:?}")))
                };
                let sets = |raw: &[Vec<RawId>]| -> Result<Cover> {
                    let sets = raw.iter().map(|e| e.iter().map(lookup).collect()).collect::<Result<_>>()?;
                    Cover::new(labels.len(), sets).map_err(|e| match e {
                        Error::NotACover { vertex } => {
                            Error::NotACover { vertex: vertex.parse::<usize>().map_or(vertex, |v| labels[v].clone()) }
                        }
                        e => e,
                    })
                };
                let primary = sets(&cover)?;
                let map = map.map(|m| m.iter().map(lookup).collect::<Result<Vec<_>>>()).transpose()?;
                let mut model = FiniteModel::new(labels.clone(), primary, map)?;
                for (name, raw) in &covers {
                    if is_reserved(name) {
                        return Err(Error::Input(format!("cover name {name:?} is reserved")));
                    }
                    model = model.with_cover(name, sets(raw)?)?;
                }
                Ok(ModelDocument { finite: model, circle: None })
            }
            RawDoc::Circle { arcs, pl_map, samples, covers } => {
                let arcs = arcs_from_raw(arcs)?;
                let offset = pl_map.offset.map_or_else(|| Q::from_integer(0.into()), |o| o.0);
                let pl = PlMap::new(
                    pl_map.breakpoints.into_iter().map(|r| r.0).collect(),
                    pl_map.slopes.into_iter().map(|r| r.0).collect(),
                    offset,
                )?;
                let system = CircleSystem::new(arcs, pl)?;
                let plan = sample_circle(&system, samples)?;
                let mut model = plan.model;
                let mut arc_covers = Vec::new();
                for (name, raw) in covers {
                    if is_reserved(&name) {
                        return Err(Error::Input(format!("cover name {name:?} is reserved")));
                    }
                    let arcs = arcs_from_raw(raw)?;
                    let sub = CircleSystem::new(arcs.clone(), system.pl_map.clone())?;
                    let sampled = sample_circle(&sub, samples)?;
                    model = model.with_cover(&name, sampled.model.cover)?;
                    arc_covers.push((name, arcs));
                }
                let circle = CircleModel { system, samples, sample: plan.sample, arc_covers };
                Ok(ModelDocument { finite: model, circle: Some(circle) })
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        if self.circle.is_some() {
            "circle"
        } else {
            "finite"
        }
    }

    /// Canonical JSON value: explicit arcs, labels as strings, sorted keys.
    pub fn to_value(&self) -> Value {
        match &self.circle {
            Some(c) => {
                let covers: serde_json::Map<String, Value> = c
                    .arc_covers
                    .iter()
                    .map(|(n, arcs)| (n.clone(), Value::Array(arcs.iter().map(arc_json).collect())))
                    .collect();
                json!({
                    "type": "circle",
                    "samples": c.samples,
                    "arcs": c.system.arcs.iter().map(arc_json).collect::<Vec<_>>(),
                    "pl_map": {
                        "breakpoints": c.system.pl_map.breakpoints.iter().map(format_rational).collect::<Vec<_>>(),
                        "slopes": c.system.pl_map.slopes.iter().map(format_rational).collect::<Vec<_>>(),
                        "offset": format_rational(&c.system.pl_map.offset),
                    },
                    "covers": covers,
                })
            }
            None => {
                let m = &self.finite;
                let sets = |c: &Cover| -> Value {
                    c.elements()
                        .iter()
                        .map(|e| e.members.iter().map(|&v| m.labels[v].clone()).collect::<Vec<_>>())
                        .collect()
                };
                let covers: serde_json::Map<String, Value> =
                    m.extra_covers.iter().map(|(n, c)| (n.clone(), sets(c))).collect();
                let mut doc = json!({
                    "type": "finite",
                    "vertices": m.labels,
                    "cover": sets(&m.cover),
                    "covers": covers,
                });
                if let Some(f) = &m.map {
                    doc["map"] = f.iter().map(|&v| m.labels[v].clone()).collect();
                }
                doc
            }
        }
    }

    /// Compact canonical serialization; parsing it gives back an equal document.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("serializable")
    }

    /// `sha256:<hex>` of the canonical serialization.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_canonical_json().as_bytes());
        let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }

    /// Looks up a cover: `None`, `"cover"` or `"default"` give the primary cover.
    pub fn cover(&self, name: Option<&str>) -> Result<Shared<Cover>> {
        let name = name.unwrap_or("cover");
        if let Some(c) = self.finite.named_cover(name) {
            return Ok(Shared::new(c.clone()));
        }
        if let (Some(c), Some(w)) = (&self.circle, name.strip_prefix("window-")) {
            if let Ok(w) = w.parse::<usize>() {
                if (1..=c.samples).contains(&w) {
                    return Ok(Shared::new(window_cover(c.samples, w)));
                }
            }
        }
        Err(Error::Input(format!("no cover named {name:?} in the model")))
    }

    /// Cover names in a fixed order: the primary cover, the named covers, then
    /// for circle documents the sample windows of width 2 up to half the samples.
    pub fn cover_names(&self) -> Vec<String> {
        let mut names = vec!["cover".to_string()];
        names.extend(self.finite.extra_covers.iter().map(|(n, _)| n.clone()));
        if let Some(c) = &self.circle {
            names.extend((2..=c.samples / 2).map(|w| format!("window-{w}")));
        }
        names
    }

    pub fn map(&self) -> Result<&Vec<usize>> {
        self.finite.map()
    }

    pub fn labels(&self) -> &[String] {
        &self.finite.labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::qf;

    const TRIANGLE: &str = r#"{
        "type": "finite", "vertices": ["a", "b", "c"],
        "cover": [["a", "b"], ["b", "c"], ["c", "a"]],
        "covers": { "whole": [["a", "b", "c"]] },
        "map": ["b", "c", "a"]
    }"#;

    const DOUBLING: &str = r#"{
        "type": "circle", "samples": 8,
        "arcs": { "count": 4, "length": "3/8" },
        "pl_map": { "breakpoints": ["0"], "slopes": ["2"] },
        "covers": { "pairs": { "count": 8, "length": "1/4", "offset": "-1/16" } }
    }"#;

    #[test]
    fn finite_document() {
        let d = ModelDocument::parse(TRIANGLE).unwrap();
        assert_eq!(d.kind(), "finite");
        assert_eq!(d.map().unwrap(), &vec![1, 2, 0]);
        assert_eq!(d.cover(Some("whole")).unwrap().len(), 1);
        assert_eq!(d.cover(None).unwrap().len(), 3);
        assert!(d.cover(Some("missing")).is_err());
        assert_eq!(d.cover_names(), vec!["cover", "whole"]);
    }

    #[test]
    fn circle_document() {
        let d = ModelDocument::parse(DOUBLING).unwrap();
        let c = d.circle.as_ref().unwrap();
        assert_eq!(c.system.arcs[1].start, qf(1, 4));
        assert_eq!(d.map().unwrap(), &vec![0, 2, 4, 6, 0, 2, 4, 6]);
        let pairs = d.cover(Some("pairs")).unwrap();
        assert_eq!(pairs.element(0), &[0, 1]);
        assert_eq!(d.cover(Some("window-3")).unwrap().element(7), &[0, 1, 7]);
        assert_eq!(d.cover_names().len(), 2 + 3);
    }

    #[test]
    fn canonical_round_trip() {
        for text in [TRIANGLE, DOUBLING] {
            let d = ModelDocument::parse(text).unwrap();
            let canon = d.to_canonical_json();
            let again = ModelDocument::parse(&canon).unwrap();
            assert_eq!(again, d);
            assert_eq!(again.to_canonical_json(), canon);
            assert_eq!(again.digest(), d.digest());
        }
    }

    #[test]
    fn errors() {
        match ModelDocument::parse("{\n  \"type\": \"finite\",\n  oops\n}") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
        let uncovered = r#"{"type":"finite","vertices":["a","b"],"cover":[["a"]]}"#;
        assert!(matches!(ModelDocument::parse(uncovered), Err(Error::NotACover { vertex }) if vertex == "b"));
        let unknown = r#"{"type":"finite","vertices":["a"],"cover":[["z"]]}"#;
        assert!(matches!(ModelDocument::parse(unknown), Err(Error::Input(_))));
        let reserved = r#"{"type":"finite","vertices":["a"],"cover":[["a"]],"covers":{"window-2":[["a"]]}}"#;
        assert!(matches!(ModelDocument::parse(reserved), Err(Error::Input(_))));
    }
}
