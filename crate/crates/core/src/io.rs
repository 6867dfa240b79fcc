//! The JSON workspace format: one self-describing document that can hold
//! ground sets, families, entourages, metrics, chains, group descriptors,
//! decompositions, functions and exhaustions. ∞ is serialized as the
//! string "inf" so fixtures stay valid JSON and diffable.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupOracle;
use crate::higson::{Exhaustion, RealFunction};
use crate::metric::{ExtMetric, ScaleChain};
use crate::sets::{Family, GroundSet, PointSet, Universe};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroundSetDoc {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricDoc {
    pub size: usize,
    /// Row-major distance matrix; ∞ entries are the string "inf".
    pub dist: Vec<ExtReal>,
}

/// A JSON-safe extended real: a number, or the string "inf".
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal(v)),
            Raw::Str(s) if s == "inf" => Ok(ExtReal(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionDoc {
    /// Named built-in: "linear", "log1p" or "sin" of the point index.
    Builtin(String),
    /// Explicit value table.
    Values(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupDoc {
    Zn { rank: usize },
    Free { rank: usize },
    Bs12,
    Table { mul: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Workspace {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_set: Option<GroundSetDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub families: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub entourages: BTreeMap<String, Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricDoc>,
    /// Chain levels, outermost list indexed by level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDoc>,
    /// Free-form parameters for group subcommands (element lists, radii,
    /// search boxes), interpreted per group kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_params: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub decompositions: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, FunctionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<serde_json::Value>,
}

impl Workspace {
    pub fn from_str(text: &str) -> Result<Workspace> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Workspace> {
        Workspace::from_str(&std::fs::read_to_string(path)?)
    }

    /// Deterministic rendering: maps are ordered, keys fixed, so equal
    /// workspaces serialize byte-identically.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("workspace serializes") + "\n"
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    /// The universe declared by ground_set, or inferred from the metric
    /// size, or from the largest index in use.
    pub fn resolve_universe(&self) -> Result<Universe> {
        if let Some(gs) = &self.ground_set {
            return match &gs.labels {
                Some(labels) => {
                    if labels.len() != gs.size {
                        return Err(Error::Schema(format!(
                            "{} labels for a {}-point ground set",
                            labels.len(),
                            gs.size
                        )));
                    }
                    GroundSet::with_labels(labels.clone())
                }
                None => Ok(GroundSet::new(gs.size)),
            };
        }
        if let Some(m) = &self.metric {
            return Ok(GroundSet::new(m.size));
        }
        let max_index = self
            .families
            .values()
            .flatten()
            .flatten()
            .copied()
            .chain(
                self.entourages
                    .values()
                    .flatten()
                    .flat_map(|&(x, y)| [x, y]),
            )
            .chain(self.decompositions.values().flatten().flatten().copied())
            .chain(self.exhaustion.iter().flatten().flatten().copied())
            .max();
        match max_index {
            Some(m) => Ok(GroundSet::new(m + 1)),
            None => Err(Error::Schema(
                "workspace declares no ground set and none can be inferred".into(),
            )),
        }
    }

    pub fn family(&self, name: &str, u: &Universe) -> Result<Family> {
        let members = self
            .families
            .get(name)
            .ok_or_else(|| Error::Schema(format!("no family named {name:?}")))?;
        family_from_doc(members, u)
    }

    /// The lexicographically first family, for subcommands that accept an
    /// anonymous input.
    pub fn first_family(&self, u: &Universe) -> Result<(String, Family)> {
        let (name, members) = self
            .families
            .iter()
            .next()
            .ok_or_else(|| Error::Schema("workspace holds no families".into()))?;
        Ok((name.clone(), family_from_doc(members, u)?))
    }

    pub fn entourage(&self, name: &str, u: &Universe) -> Result<crate::entourage::Entourage> {
        let pairs = self
            .entourages
            .get(name)
            .ok_or_else(|| Error::Schema(format!("no entourage named {name:?}")))?;
        crate::entourage::Entourage::from_pairs(u, pairs.iter().copied())
    }

    pub fn first_entourage(&self, u: &Universe) -> Result<(String, crate::entourage::Entourage)> {
        let (name, pairs) = self
            .entourages
            .iter()
            .next()
            .ok_or_else(|| Error::Schema("workspace holds no entourages".into()))?;
        Ok((
            name.clone(),
            crate::entourage::Entourage::from_pairs(u, pairs.iter().copied())?,
        ))
    }

    pub fn ext_metric(&self, u: &Universe) -> Result<ExtMetric> {
        let doc = self
            .metric
            .as_ref()
            .ok_or_else(|| Error::Schema("workspace holds no metric".into()))?;
        if doc.size != u.size() {
            return Err(Error::Schema(format!(
                "metric size {} does not match the {}-point ground set",
                doc.size,
                u.size()
            )));
        }
        ExtMetric::from_matrix(u, doc.dist.iter().map(|v| v.0).collect())
    }

    pub fn scale_chain(&self, u: &Universe) -> Result<ScaleChain> {
        let levels = self
            .chain
            .as_ref()
            .ok_or_else(|| Error::Schema("workspace holds no chain".into()))?;
        ScaleChain::new(
            u,
            levels
                .iter()
                .map(|l| family_from_doc(l, u))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn function(&self, name: &str, u: &Universe) -> Result<RealFunction> {
        let doc = self
            .functions
            .get(name)
            .ok_or_else(|| Error::Schema(format!("no function named {name:?}")))?;
        match doc {
            FunctionDoc::Values(vs) => RealFunction::new(u, vs.clone()),
            FunctionDoc::Builtin(name) => match name.as_str() {
                "linear" => RealFunction::from_fn(u, |x| x as f64),
                "log1p" => RealFunction::from_fn(u, |x| (1.0 + x as f64).ln()),
                "sin" => RealFunction::from_fn(u, |x| (x as f64).sin()),
                other => Err(Error::Schema(format!("unknown built-in function {other:?}"))),
            },
        }
    }

    pub fn exhaustion_of(&self, u: &Universe) -> Result<Exhaustion> {
        let stages = self
            .exhaustion
            .as_ref()
            .ok_or_else(|| Error::Schema("workspace holds no exhaustion".into()))?;
        Exhaustion::new(
            u,
            stages
                .iter()
                .map(|s| PointSet::from_indices(u, s.iter().copied()))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn group_oracle(&self) -> Result<GroupOracle> {
        let doc = self
            .group
            .as_ref()
            .ok_or_else(|| Error::Schema("workspace holds no group descriptor".into()))?;
        Ok(match doc {
            GroupDoc::Zn { rank } => GroupOracle::zn(*rank),
            GroupDoc::Free { rank } => GroupOracle::free(*rank),
            GroupDoc::Bs12 => GroupOracle::bs12(),
            GroupDoc::Table { mul } => GroupOracle::table(mul.clone())?,
        })
    }

    pub fn put_family(&mut self, name: &str, f: &Family) {
        self.families.insert(name.to_string(), family_to_doc(f));
    }

    pub fn put_entourage(&mut self, name: &str, e: &crate::entourage::Entourage) {
        self.entourages
            .insert(name.to_string(), e.iter_pairs().collect());
    }

    pub fn put_metric(&mut self, d: &ExtMetric) {
        self.metric = Some(MetricDoc {
            size: d.universe().size(),
            dist: d.matrix().iter().map(|&v| ExtReal(v)).collect(),
        });
    }

    pub fn put_chain(&mut self, chain: &ScaleChain) {
        self.chain = Some(chain.levels().iter().map(family_to_doc).collect());
    }

    pub fn put_ground_set(&mut self, u: &Universe) {
        self.ground_set = Some(GroundSetDoc {
            size: u.size(),
            labels: u.labels().map(|l| l.to_vec()),
        });
    }

    pub fn put_report(&mut self, report: serde_json::Value) {
        self.report = Some(report);
    }
}

pub fn family_from_doc(members: &[Vec<usize>], u: &Universe) -> Result<Family> {
    Family::new(
        u,
        members
            .iter()
            .map(|m| PointSet::from_indices(u, m.iter().copied()))
            .collect::<Result<Vec<_>>>()?,
    )
}

pub fn family_to_doc(f: &Family) -> Vec<Vec<usize>> {
    f.members().iter().map(|m| m.iter().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_inf() {
        let u = GroundSet::new(2);
        let d = ExtMetric::from_matrix(
            &u,
            vec![0.0, f64::INFINITY, f64::INFINITY, 0.0],
        )
        .unwrap();
        let mut ws = Workspace::default();
        ws.put_ground_set(&u);
        ws.put_metric(&d);
        let text = ws.to_json();
        assert!(text.contains("\"inf\""));
        let back = Workspace::from_str(&text).unwrap();
        let u2 = back.resolve_universe().unwrap();
        let d2 = back.ext_metric(&u2).unwrap();
        assert!(d2.dist(0, 1).is_infinite());
        // byte-identical re-render
        assert_eq!(text, back.to_json());
    }

    #[test]
    fn family_and_entourage_round_trip() {
        let u = GroundSet::new(4);
        let f = family_from_doc(&[vec![0, 1], vec![2]], &u).unwrap();
        let mut ws = Workspace::default();
        ws.put_ground_set(&u);
        ws.put_family("B", &f);
        let back = Workspace::from_str(&ws.to_json()).unwrap();
        let u2 = back.resolve_universe().unwrap();
        assert!(back.family("B", &u2).unwrap().same_members(&f));
        assert!(back.family("missing", &u2).is_err());
    }

    #[test]
    fn builtin_functions() {
        let mut ws = Workspace::default();
        ws.ground_set = Some(GroundSetDoc { size: 3, labels: None });
        ws.functions
            .insert("f".into(), FunctionDoc::Builtin("log1p".into()));
        let u = ws.resolve_universe().unwrap();
        let f = ws.function("f", &u).unwrap();
        assert_eq!(f.value(0), 0.0);
        ws.functions
            .insert("g".into(), FunctionDoc::Builtin("nope".into()));
        assert!(ws.function("g", &u).is_err());
    }

    #[test]
    fn universe_inference() {
        let ws = Workspace::from_str(r#"{"families":{"B":[[0,5]]}}"#).unwrap();
        assert_eq!(ws.resolve_universe().unwrap().size(), 6);
        let empty = Workspace::from_str("{}").unwrap();
        assert!(empty.resolve_universe().is_err());
    }

    #[test]
    fn malformed_json_is_schema_error() {
        assert!(matches!(
            Workspace::from_str("{nope"),
            Err(Error::Schema(_))
        ));
    }
}
