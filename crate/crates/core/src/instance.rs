//! JSON instance files: a groupoid, a ring, and exactly one of a grading, a
//! partial action or a groupoid-ring marker.
//!
//! Syntax errors carry line and column; structural problems are schema
//! errors. The digest is the SHA-256 of the canonical (sorted-key, compact)
//! JSON text, so it ignores whitespace and key order.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graded::Grading;
use crate::groupoid::{named, validate_groupoid, FiniteGroupoid, RawGroupoid};
use crate::partial_action::{build_groupoid_ring, build_skew_ring, validate_partial_action, PartialAction, RawMap, RawPartialAction};
use crate::primeness::Bounds;
use crate::ring::{direct_sum, parse_group, parse_ring, subring, CayleyRing, FiniteRing};

/// Instance format version understood by this build.
pub const INSTANCE_VERSION: u64 = 1;

/// Which ring structure the instance describes.
#[derive(Clone, Debug)]
pub enum Structure {
    Grading(BTreeMap<String, Vec<String>>),
    PartialAction(RawPartialAction),
    GroupoidRing,
}

impl Structure {
    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Grading(_) => "grading",
            Structure::PartialAction(_) => "partial_action",
            Structure::GroupoidRing => "groupoid_ring",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub description: Option<String>,
    pub digest: String,
    pub groupoid: FiniteGroupoid,
    /// The graded ring, the ambient ring of the action, or the coefficient
    /// ring of the groupoid ring.
    pub ring: FiniteRing,
    pub structure: Structure,
    pub bounds: Bounds,
}

/// Short facts about an instance, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct InstanceSummary {
    pub digest: String,
    pub description: Option<String>,
    pub structure: &'static str,
    pub ring: String,
    pub ring_size: usize,
    pub objects: Vec<String>,
    pub morphisms: Vec<String>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// Label-resolution failures inside a file are schema errors.
fn as_schema(e: Error) -> Error {
    match e {
        Error::MalformedInput(m) => Error::Schema(m),
        Error::UnknownMorphism(m) => Error::Schema(format!("unknown morphism `{m}`")),
        Error::UnknownObject(m) => Error::Schema(format!("unknown object `{m}`")),
        e => e,
    }
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(format!("{what} must be an object")))
}

fn string<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(format!("{what} must be a string")))
}

fn strings(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be an array of strings")))?
        .iter()
        .map(|x| string(x, what).map(str::to_string))
        .collect()
}

fn only_keys(m: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    match m.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(format!("unexpected key `{k}` in {what}"))),
        None => Ok(()),
    }
}

fn one_key<'a>(m: &'a Map<String, Value>, what: &str) -> Result<(&'a str, &'a Value)> {
    let mut it = m.iter();
    match (it.next(), it.next()) {
        (Some((k, v)), None) => Ok((k.as_str(), v)),
        _ => Err(schema(format!("{what} must have exactly one key"))),
    }
}

fn groupoid_section(v: &Value) -> Result<FiniteGroupoid> {
    let m = object(v, "groupoid")?;
    if m.contains_key("objects") {
        only_keys(m, &["objects", "morphisms", "compose", "inverse"], "groupoid")?;
        let raw: RawGroupoid =
            serde_json::from_value(v.clone()).map_err(|e| schema(format!("groupoid: {e}")))?;
        return validate_groupoid(&raw).map_err(as_schema);
    }
    if m.contains_key("group") {
        only_keys(m, &["group", "object"], "groupoid")?;
        let (group, _) = parse_group(string(&m["group"], "groupoid.group")?).map_err(as_schema)?;
        let obj = match m.get("object") {
            Some(o) => string(o, "groupoid.object")?,
            None => "e",
        };
        return Ok(FiniteGroupoid::from_group(&group, obj));
    }
    let (key, val) = one_key(m, "groupoid")?;
    match key {
        "named" => match string(val, "groupoid.named")? {
            "p2" => Ok(named::p2()),
            "p3" => Ok(named::p3()),
            "g8" => Ok(named::g8()),
            "two_points" => Ok(named::two_points()),
            other => Err(schema(format!("unknown named groupoid `{other}` (p2, p3, g8, two_points)"))),
        },
        "pair" => {
            let objs = strings(val, "groupoid.pair")?;
            if objs.is_empty() {
                return Err(schema("groupoid.pair needs at least one object"));
            }
            let refs: Vec<&str> = objs.iter().map(String::as_str).collect();
            Ok(FiniteGroupoid::pair(&refs))
        }
        "discrete" => {
            let objs = strings(val, "groupoid.discrete")?;
            let refs: Vec<&str> = objs.iter().map(String::as_str).collect();
            validate_groupoid(&RawGroupoid {
                objects: objs.clone(),
                ..Default::default()
            })
            .map_err(as_schema)
            .map(|_| FiniteGroupoid::discrete(&refs))
        }
        "union" => {
            let parts = val
                .as_array()
                .ok_or_else(|| schema("groupoid.union must be an array"))?
                .iter()
                .map(groupoid_section)
                .collect::<Result<Vec<_>>>()?;
            FiniteGroupoid::disjoint_union(&parts).map_err(as_schema)
        }
        other => Err(schema(format!(
            "unknown groupoid form `{other}` (objects, named, pair, discrete, group, union)"
        ))),
    }
}

fn usize_table(v: &Value, what: &str) -> Result<Vec<Vec<usize>>> {
    serde_json::from_value(v.clone()).map_err(|e| schema(format!("{what}: {e}")))
}

fn ring_section(v: &Value, gr: &FiniteGroupoid) -> Result<FiniteRing> {
    if let Some(s) = v.as_str() {
        return parse_ring(s).map_err(as_schema);
    }
    let m = object(v, "ring")?;
    let (key, val) = one_key(m, "ring")?;
    match key {
        "subring" => {
            let s = object(val, "ring.subring")?;
            only_keys(s, &["parent", "generators"], "ring.subring")?;
            let parent = ring_section(s.get("parent").ok_or_else(|| schema("ring.subring needs `parent`"))?, gr)?;
            let gens = strings(s.get("generators").unwrap_or(&Value::Array(vec![])), "ring.subring.generators")?;
            let elems = gens
                .iter()
                .map(|g| parent.parse_element(g))
                .collect::<Result<Vec<_>>>()
                .map_err(as_schema)?;
            Ok(subring(&parent, elems))
        }
        "cayley" => {
            let c = object(val, "ring.cayley")?;
            only_keys(c, &["elements", "add", "mul"], "ring.cayley")?;
            let need = |k: &str| c.get(k).ok_or_else(|| schema(format!("ring.cayley needs `{k}`")));
            let labels = strings(need("elements")?, "ring.cayley.elements")?;
            let add = usize_table(need("add")?, "ring.cayley.add")?;
            let mul = usize_table(need("mul")?, "ring.cayley.mul")?;
            CayleyRing::build(labels, add, mul).map_err(as_schema)
        }
        "by_object" => {
            let parts = object(val, "ring.by_object")?;
            for k in parts.keys() {
                gr.object_by_label(k).map_err(as_schema)?;
            }
            let mut rings = Vec::new();
            let mut labels = Vec::new();
            for e in gr.object_ids() {
                let label = gr.object_label(e);
                let part = parts
                    .get(label)
                    .ok_or_else(|| schema(format!("ring.by_object has no summand for object `{label}`")))?;
                rings.push(ring_section(part, gr)?);
                labels.push(label.to_string());
            }
            direct_sum(&rings, Some(labels)).map_err(as_schema)
        }
        other => Err(schema(format!("unknown ring form `{other}` (subring, cayley, by_object)"))),
    }
}

fn pairs(v: &Value, what: &str) -> Result<Vec<(String, String)>> {
    let arr = v.as_array().ok_or_else(|| schema(format!("{what} must be an array of pairs")))?;
    arr.iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((string(a, what)?.to_string(), string(b, what)?.to_string())),
            _ => Err(schema(format!("{what} entries must be [element, image]"))),
        })
        .collect()
}

fn map_section(v: &Value, label: &str) -> Result<RawMap> {
    let what = format!("partial_action.maps.{label}");
    if v.as_str() == Some("identity") {
        return Ok(RawMap::Identity);
    }
    let m = object(v, &what)?;
    let (key, val) = one_key(m, &what)?;
    match key {
        "table" => Ok(RawMap::Table(pairs(val, &what)?)),
        "additive" => Ok(RawMap::Additive(pairs(val, &what)?)),
        other => Err(schema(format!("unknown map form `{other}` in {what} (identity, table, additive)"))),
    }
}

fn labelled_lists(v: &Value, what: &str, gr: &FiniteGroupoid) -> Result<BTreeMap<String, Vec<String>>> {
    let m = object(v, what)?;
    let mut out = BTreeMap::new();
    for (k, gens) in m {
        gr.morphism_by_label(k).map_err(as_schema)?;
        out.insert(k.clone(), strings(gens, &format!("{what}.{k}"))?);
    }
    Ok(out)
}

fn bounds_section(v: Option<&Value>) -> Result<Bounds> {
    let mut b = Bounds::default();
    let Some(v) = v else { return Ok(b) };
    let m = object(v, "bounds")?;
    only_keys(m, &["ring", "enumeration", "group"], "bounds")?;
    for (k, x) in m {
        let n = x
            .as_u64()
            .filter(|&n| n > 0)
            .ok_or_else(|| schema(format!("bounds.{k} must be a positive integer")))? as usize;
        match k.as_str() {
            "ring" => b.ring = n,
            "enumeration" => b.enumeration = n,
            _ => b.group = n,
        }
    }
    Ok(b)
}

/// Canonical text: sorted keys, no whitespace.
pub fn canonical_json(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

pub fn digest_of(v: &Value) -> String {
    hex::encode(Sha256::digest(canonical_json(v).as_bytes()))
}

/// Parses instance text.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let top = object(&value, "an instance")?;
    only_keys(
        top,
        &["version", "description", "groupoid", "ring", "grading", "partial_action", "groupoid_ring", "bounds"],
        "the instance",
    )?;
    if let Some(v) = top.get("version") {
        if v.as_u64() != Some(INSTANCE_VERSION) {
            return Err(schema(format!("unsupported instance version {v}; this build reads version {INSTANCE_VERSION}")));
        }
    }
    let description = top.get("description").map(|d| string(d, "description").map(str::to_string)).transpose()?;
    let groupoid = groupoid_section(top.get("groupoid").ok_or_else(|| schema("missing `groupoid` section"))?)?;
    let ring = ring_section(top.get("ring").ok_or_else(|| schema("missing `ring` section"))?, &groupoid)?;
    let present: Vec<&str> = ["grading", "partial_action", "groupoid_ring"]
        .into_iter()
        .filter(|k| top.contains_key(*k))
        .collect();
    if present.len() != 1 {
        return Err(schema(format!(
            "exactly one of `grading`, `partial_action`, `groupoid_ring` is required (found {})",
            if present.is_empty() { "none".to_string() } else { present.join(", ") }
        )));
    }
    let structure = match present[0] {
        "grading" => Structure::Grading(labelled_lists(&top["grading"], "grading", &groupoid)?),
        "partial_action" => {
            let pa = object(&top["partial_action"], "partial_action")?;
            only_keys(pa, &["ideals", "maps"], "partial_action")?;
            let ideals = match pa.get("ideals") {
                Some(v) => labelled_lists(v, "partial_action.ideals", &groupoid)?,
                None => BTreeMap::new(),
            };
            let mut maps = BTreeMap::new();
            if let Some(v) = pa.get("maps") {
                for (k, m) in object(v, "partial_action.maps")? {
                    groupoid.morphism_by_label(k).map_err(as_schema)?;
                    maps.insert(k.clone(), map_section(m, k)?);
                }
            }
            Structure::PartialAction(RawPartialAction {
                groupoid: groupoid.clone(),
                ambient: ring.clone(),
                ideals,
                maps,
            })
        }
        _ => {
            let g = object(&top["groupoid_ring"], "groupoid_ring")?;
            only_keys(g, &[], "groupoid_ring")?;
            Structure::GroupoidRing
        }
    };
    Ok(Instance {
        description,
        digest: digest_of(&value),
        groupoid,
        ring,
        structure,
        bounds: bounds_section(top.get("bounds"))?,
    })
}

pub fn parse_instance_file(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text)
}

impl Instance {
    pub fn summary(&self) -> InstanceSummary {
        let gr = &self.groupoid;
        InstanceSummary {
            digest: self.digest.clone(),
            description: self.description.clone(),
            structure: self.structure.kind(),
            ring: self.ring.describe(),
            ring_size: self.ring.size(),
            objects: gr.object_ids().map(|e| gr.object_label(e).to_string()).collect(),
            morphisms: gr.morphism_ids().map(|m| gr.morphism_label(m).to_string()).collect(),
        }
    }

    /// The validated partial action, for `partial_action` and `groupoid_ring`
    /// instances.
    pub fn action(&self) -> Result<Option<PartialAction>> {
        match &self.structure {
            Structure::PartialAction(raw) => validate_partial_action(raw).map(Some),
            Structure::GroupoidRing => crate::partial_action::groupoid_ring_action(&self.ring, &self.groupoid).map(Some),
            Structure::Grading(_) => Ok(None),
        }
    }

    /// The graded ring the instance denotes.
    pub fn grading(&self) -> Result<Grading> {
        match &self.structure {
            Structure::Grading(g) => Grading::from_labels(&self.groupoid, &self.ring, g).map_err(|e| match e {
                Error::UnknownMorphism(m) => Error::Schema(format!("unknown morphism `{m}`")),
                e => e,
            }),
            Structure::PartialAction(raw) => build_skew_ring(&validate_partial_action(raw)?, self.bounds.ring),
            Structure::GroupoidRing => build_groupoid_ring(&self.ring, &self.groupoid, self.bounds.ring),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M3: &str = r#"{
        "version": 1,
        "groupoid": {"named": "p3"},
        "ring": "M(3, F2)",
        "grading": {
            "f1": ["e(1,1)"], "f2": ["e(2,2)"], "f3": ["e(3,3)"],
            "g": ["e(1,2)"], "g^-1": ["e(2,1)"], "h": ["e(3,2)"], "h^-1": ["e(2,3)"],
            "gh^-1": ["e(1,3)"], "hg^-1": ["e(3,1)"]
        }
    }"#;

    #[test]
    fn parses_grading() {
        let inst = parse_instance(M3).unwrap();
        assert_eq!(inst.structure.kind(), "grading");
        let s = inst.grading().unwrap();
        assert_eq!(s.ring().size(), 512);
        assert!(s.is_nearly_epsilon_strong().unwrap());
    }

    #[test]
    fn digest_ignores_layout() {
        let a = parse_instance(M3).unwrap();
        let compact: Value = serde_json::from_str(M3).unwrap();
        let b = parse_instance(&serde_json::to_string_pretty(&compact).unwrap()).unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(a.digest.len(), 64);
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_instance("") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse_instance("{\n  \"ring\": F2\n}") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 11)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors() {
        let unknown_src = r#"{"groupoid": {"objects": ["e"], "morphisms": [{"name": "g", "src": "x", "rng": "e"}]},
                              "ring": "F2", "groupoid_ring": {}}"#;
        assert!(matches!(parse_instance(unknown_src), Err(Error::Schema(_))));
        let two = r#"{"groupoid": {"named": "p2"}, "ring": "F2", "groupoid_ring": {}, "grading": {}}"#;
        assert!(matches!(parse_instance(two), Err(Error::Schema(_))));
        let none = r#"{"groupoid": {"named": "p2"}, "ring": "F2"}"#;
        assert!(matches!(parse_instance(none), Err(Error::Schema(_))));
        let bad_label = r#"{"groupoid": {"named": "p2"}, "ring": "M(2, F2)", "grading": {"k": ["e(1,1)"]}}"#;
        assert!(matches!(parse_instance(bad_label), Err(Error::Schema(_))));
        let extra = r#"{"groupoid": {"named": "p2"}, "ring": "F2", "groupoid_ring": {}, "colour": 1}"#;
        assert!(matches!(parse_instance(extra), Err(Error::Schema(_))));
    }

    #[test]
    fn ring_forms() {
        let by_obj = r#"{"groupoid": {"named": "p2"}, "ring": {"by_object": {"f": "F3", "e": "F2"}},
                         "partial_action": {"ideals": {"g": [], "g^-1": []}, "maps": {"g": "identity"}}}"#;
        let inst = parse_instance(by_obj).unwrap();
        assert_eq!(inst.ring.describe(), "by_object(e: F2, f: F3)");
        assert_eq!(inst.grading().unwrap().ring().size(), 6);
        let sub = r#"{"groupoid": {"group": "C(1)"}, "ring": {"subring": {"parent": "M(2, F2)", "generators": ["e(1,1)"]}},
                      "grading": {"e": ["e(1,1)"]}}"#;
        assert_eq!(parse_instance(sub).unwrap().ring.size(), 2);
        let cayley = r#"{"groupoid": {"group": "trivial"}, "ring": {"cayley": {"elements": ["0", "u"],
                         "add": [[0, 1], [1, 0]], "mul": [[0, 0], [0, 1]]}}, "grading": {"e": ["u"]}}"#;
        assert_eq!(parse_instance(cayley).unwrap().ring.size(), 2);
    }
}
