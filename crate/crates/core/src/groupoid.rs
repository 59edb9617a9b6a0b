//! Finite groupoids given by explicit composition tables, together with the
//! combinatorial queries the graded-ring machinery needs: isotropy groups,
//! orbits, connectedness, subgroupoids and subgroup enumeration.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of an object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Obj(pub usize);

/// Dense index of a morphism. Identity morphisms come first, in object order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Morph(pub usize);

/// One non-identity arrow of a raw groupoid description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMorphism {
    pub name: String,
    pub src: String,
    pub rng: String,
}

/// Unvalidated groupoid description, as it appears in instance files.
///
/// `compose` entries are `[g, h, gh]` and mean `g ∘ h = gh` (h first). Products
/// with identity morphisms are implied and may be omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGroupoid {
    pub objects: Vec<String>,
    #[serde(default)]
    pub morphisms: Vec<RawMorphism>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
    #[serde(default)]
    pub inverse: Vec<[String; 2]>,
}

/// A validated finite groupoid. Immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    morphisms: Vec<String>,
    src: Vec<Obj>,
    rng: Vec<Obj>,
    comp: Vec<Option<Morph>>,
    inv: Vec<Morph>,
}

impl fmt::Debug for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroupoid")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms)
            .finish()
    }
}

struct Violations(Vec<(String, String)>);

impl Violations {
    fn push(&mut self, axiom: &str, detail: String) {
        if self.0.len() < 32 {
            self.0.push((axiom.to_string(), detail));
        }
    }

    fn into_result(self) -> Result<()> {
        match self.0.first() {
            None => Ok(()),
            Some((axiom, _)) => Err(Error::axiom(
                axiom.clone(),
                self.0
                    .iter()
                    .map(|(a, d)| format!("[{a}] {d}"))
                    .collect::<Vec<_>>()
                    .join("; "),
            )),
        }
    }
}

/// Validates a raw description against the groupoid axioms.
pub fn validate_groupoid(raw: &RawGroupoid) -> Result<FiniteGroupoid> {
    if raw.objects.is_empty() {
        return Err(Error::MalformedInput("groupoid has no objects".into()));
    }
    let mut obj_index = HashMap::new();
    for (i, o) in raw.objects.iter().enumerate() {
        if obj_index.insert(o.clone(), Obj(i)).is_some() {
            return Err(Error::MalformedInput(format!("duplicate object `{o}`")));
        }
    }
    let lookup_obj = |name: &str, ctx: &str| {
        obj_index.get(name).copied().ok_or_else(|| {
            Error::MalformedInput(format!("{ctx} refers to unknown object `{name}`"))
        })
    };

    let mut morphisms: Vec<String> = raw.objects.clone();
    let mut src: Vec<Obj> = (0..raw.objects.len()).map(Obj).collect();
    let mut rng = src.clone();
    let mut morph_index: HashMap<String, Morph> = raw
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.clone(), Morph(i)))
        .collect();
    for m in &raw.morphisms {
        let s = lookup_obj(&m.src, &format!("source of `{}`", m.name))?;
        let r = lookup_obj(&m.rng, &format!("range of `{}`", m.name))?;
        if let Some(&Obj(i)) = obj_index.get(&m.name) {
            if s == Obj(i) && r == Obj(i) {
                continue;
            }
            return Err(Error::MalformedInput(format!(
                "morphism `{}` shares its label with an object but is not its identity",
                m.name
            )));
        }
        if morph_index.contains_key(&m.name) {
            return Err(Error::MalformedInput(format!(
                "duplicate morphism `{}`",
                m.name
            )));
        }
        morph_index.insert(m.name.clone(), Morph(morphisms.len()));
        morphisms.push(m.name.clone());
        src.push(s);
        rng.push(r);
    }
    let n = morphisms.len();
    let lookup = |name: &str| {
        morph_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::MalformedInput(format!("unknown morphism `{name}`")))
    };

    let mut violations = Violations(Vec::new());
    let mut comp: Vec<Option<Morph>> = vec![None; n * n];
    for [g, h, gh] in &raw.compose {
        let (g, h, gh) = (lookup(g)?, lookup(h)?, lookup(gh)?);
        if src[g.0] != rng[h.0] {
            violations.push(
                "composable pairs",
                format!(
                    "composition ({}, {}) given but src({}) != rng({})",
                    morphisms[g.0], morphisms[h.0], morphisms[g.0], morphisms[h.0]
                ),
            );
            continue;
        }
        let slot = &mut comp[g.0 * n + h.0];
        if let Some(prev) = *slot {
            if prev != gh {
                violations.push(
                    "composition",
                    format!(
                        "composition ({}, {}) given twice with different results",
                        morphisms[g.0], morphisms[h.0]
                    ),
                );
            }
        }
        *slot = Some(gh);
    }
    let nobj = raw.objects.len();
    for x in 0..n {
        // identity products are implied; explicit ones must agree
        for (l, r) in [(rng[x].0, x), (x, src[x].0)] {
            let slot = &mut comp[l * n + r];
            match *slot {
                Some(m) if m != Morph(x) => violations.push(
                    "identity",
                    format!(
                        "{} ∘ {} should be {}",
                        morphisms[l], morphisms[r], morphisms[x]
                    ),
                ),
                _ => *slot = Some(Morph(x)),
            }
        }
    }
    for g in 0..n {
        for h in 0..n {
            if src[g] == rng[h] {
                match comp[g * n + h] {
                    None => {
                        return Err(Error::MalformedInput(format!(
                            "composition ({}, {}) is missing",
                            morphisms[g], morphisms[h]
                        )))
                    }
                    Some(gh) => {
                        if src[gh.0] != src[h] || rng[gh.0] != rng[g] {
                            violations.push(
                                "composition endpoints",
                                format!(
                                    "{} ∘ {} = {} has the wrong source or range",
                                    morphisms[g], morphisms[h], morphisms[gh.0]
                                ),
                            );
                        }
                    }
                }
            }
        }
    }

    let mut inv: Vec<Option<Morph>> = vec![None; n];
    for (i, slot) in inv.iter_mut().enumerate().take(nobj) {
        *slot = Some(Morph(i));
    }
    for [a, b] in &raw.inverse {
        let (a, b) = (lookup(a)?, lookup(b)?);
        for (x, y) in [(a, b), (b, a)] {
            match inv[x.0] {
                Some(prev) if prev != y => violations.push(
                    "inverse",
                    format!("`{}` given two different inverses", morphisms[x.0]),
                ),
                _ => inv[x.0] = Some(y),
            }
        }
    }
    let mut inverses = Vec::with_capacity(n);
    for g in 0..n {
        match inv[g] {
            None => {
                violations.push("inverse", format!("`{}` has no inverse", morphisms[g]));
                inverses.push(Morph(g));
            }
            Some(gi) => {
                let left = if src[gi.0] == rng[g] {
                    comp[gi.0 * n + g]
                } else {
                    None
                };
                let right = if src[g] == rng[gi.0] {
                    comp[g * n + gi.0]
                } else {
                    None
                };
                if left != Some(Morph(src[g].0)) || right != Some(Morph(rng[g].0)) {
                    violations.push(
                        "inverse",
                        format!(
                            "`{}` is not an inverse of `{}`",
                            morphisms[gi.0], morphisms[g]
                        ),
                    );
                }
                inverses.push(gi);
            }
        }
    }
    violations.into_result()?;

    let groupoid = FiniteGroupoid {
        objects: raw.objects.clone(),
        morphisms,
        src,
        rng,
        comp,
        inv: inverses,
    };
    groupoid.check_associativity()?;
    Ok(groupoid)
}

impl FiniteGroupoid {
    fn check_associativity(&self) -> Result<()> {
        let mut violations = Violations(Vec::new());
        for g in self.morphism_ids() {
            for h in self.morphism_ids() {
                let Some(gh) = self.compose(g, h) else {
                    continue;
                };
                for k in self.morphism_ids() {
                    let Some(hk) = self.compose(h, k) else {
                        continue;
                    };
                    let left = self.compose(gh, k);
                    let right = self.compose(g, hk);
                    if left != right {
                        violations.push(
                            "associativity",
                            format!(
                                "({} {} {}) associates differently",
                                self.morphism_label(g),
                                self.morphism_label(h),
                                self.morphism_label(k)
                            ),
                        );
                    }
                }
            }
        }
        violations.into_result()
    }

    /// Connected groupoid `P_n × H` on the given objects. `label(i, j, h)` names the
    /// arrow from object `i` to object `j` carrying group element `h`; identities
    /// always carry the object label.
    pub fn connected(
        objects: &[&str],
        group: &FiniteGroup,
        label: impl Fn(usize, usize, usize) -> String,
    ) -> FiniteGroupoid {
        let nobj = objects.len();
        let ng = group.order();
        let mut raw = RawGroupoid {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        };
        let name = |i: usize, j: usize, h: usize| {
            if i == j && h == 0 {
                objects[i].to_string()
            } else {
                label(i, j, h)
            }
        };
        for i in 0..nobj {
            for j in 0..nobj {
                for h in 0..ng {
                    if i == j && h == 0 {
                        continue;
                    }
                    raw.morphisms.push(RawMorphism {
                        name: name(i, j, h),
                        src: objects[i].to_string(),
                        rng: objects[j].to_string(),
                    });
                    raw.inverse
                        .push([name(i, j, h), name(j, i, group.inverse(h))]);
                }
            }
        }
        for i in 0..nobj {
            for j in 0..nobj {
                for k in 0..nobj {
                    for a in 0..ng {
                        for b in 0..ng {
                            // (j→k, b) ∘ (i→j, a) = (i→k, b·a)
                            raw.compose.push([
                                name(j, k, b),
                                name(i, j, a),
                                name(i, k, group.mul(b, a)),
                            ]);
                        }
                    }
                }
            }
        }
        validate_groupoid(&raw).expect("product groupoid is valid by construction")
    }

    /// The pair groupoid on the given objects, arrows labelled `i>j`.
    pub fn pair(objects: &[&str]) -> FiniteGroupoid {
        let names: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
        Self::connected(objects, &FiniteGroup::trivial(), |i, j, _| {
            format!("{}>{}", names[i], names[j])
        })
    }

    /// A group viewed as a one-object groupoid.
    pub fn from_group(group: &FiniteGroup, object: &str) -> FiniteGroupoid {
        let labels = group.labels.clone();
        Self::connected(&[object], group, |_, _, h| labels[h].clone())
    }

    /// Objects with identity morphisms only.
    pub fn discrete(objects: &[&str]) -> FiniteGroupoid {
        validate_groupoid(&RawGroupoid {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        })
        .expect("discrete groupoid is valid")
    }

    /// Disjoint union. Labels must not collide.
    pub fn disjoint_union(parts: &[FiniteGroupoid]) -> Result<FiniteGroupoid> {
        let mut raw = RawGroupoid::default();
        for p in parts {
            let r = p.to_raw();
            raw.objects.extend(r.objects);
            raw.morphisms.extend(r.morphisms);
            raw.compose.extend(r.compose);
            raw.inverse.extend(r.inverse);
        }
        validate_groupoid(&raw)
    }

    /// Round-trips to the raw description (full composition table).
    pub fn to_raw(&self) -> RawGroupoid {
        let mut raw = RawGroupoid {
            objects: self.objects.clone(),
            ..Default::default()
        };
        for m in self.morphism_ids().skip(self.objects.len()) {
            raw.morphisms.push(RawMorphism {
                name: self.morphism_label(m).to_string(),
                src: self.object_label(self.src(m)).to_string(),
                rng: self.object_label(self.rng(m)).to_string(),
            });
            raw.inverse.push([
                self.morphism_label(m).to_string(),
                self.morphism_label(self.inv(m)).to_string(),
            ]);
        }
        for g in self.morphism_ids() {
            for h in self.morphism_ids() {
                if let Some(gh) = self.compose(g, h) {
                    if self.is_identity(g) || self.is_identity(h) {
                        continue;
                    }
                    raw.compose.push([
                        self.morphism_label(g).to_string(),
                        self.morphism_label(h).to_string(),
                        self.morphism_label(gh).to_string(),
                    ]);
                }
            }
        }
        raw
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_ids(&self) -> impl Iterator<Item = Obj> + '_ {
        (0..self.objects.len()).map(Obj)
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = Morph> + '_ {
        (0..self.morphisms.len()).map(Morph)
    }

    pub fn object_label(&self, o: Obj) -> &str {
        &self.objects[o.0]
    }

    pub fn morphism_label(&self, m: Morph) -> &str {
        &self.morphisms[m.0]
    }

    pub fn object_by_label(&self, label: &str) -> Result<Obj> {
        self.objects
            .iter()
            .position(|o| o == label)
            .map(Obj)
            .ok_or_else(|| Error::UnknownObject(label.to_string()))
    }

    pub fn morphism_by_label(&self, label: &str) -> Result<Morph> {
        self.morphisms
            .iter()
            .position(|m| m == label)
            .map(Morph)
            .ok_or_else(|| Error::UnknownMorphism(label.to_string()))
    }

    pub fn src(&self, m: Morph) -> Obj {
        self.src[m.0]
    }

    pub fn rng(&self, m: Morph) -> Obj {
        self.rng[m.0]
    }

    pub fn inv(&self, m: Morph) -> Morph {
        self.inv[m.0]
    }

    pub fn identity(&self, o: Obj) -> Morph {
        Morph(o.0)
    }

    pub fn is_identity(&self, m: Morph) -> bool {
        m.0 < self.objects.len()
    }

    /// `g ∘ h`, defined exactly when `src(g) = rng(h)`.
    pub fn compose(&self, g: Morph, h: Morph) -> Option<Morph> {
        self.comp[g.0 * self.morphisms.len() + h.0]
    }

    pub fn composable(&self, g: Morph, h: Morph) -> bool {
        self.src(g) == self.rng(h)
    }

    pub fn check_object(&self, e: Obj) -> Result<()> {
        if e.0 < self.objects.len() {
            Ok(())
        } else {
            Err(Error::UnknownObject(format!("#{}", e.0)))
        }
    }

    /// Morphisms with source and range `e`, in morphism order.
    pub fn isotropy_morphisms(&self, e: Obj) -> Vec<Morph> {
        self.morphism_ids()
            .filter(|&m| self.src(m) == e && self.rng(m) == e)
            .collect()
    }

    /// The isotropy group at `e` with its own Cayley table.
    pub fn isotropy(&self, e: Obj) -> Result<FiniteGroup> {
        self.check_object(e)?;
        let members = self.isotropy_morphisms(e);
        let pos: HashMap<Morph, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let n = members.len();
        let mut table = vec![0; n * n];
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                let ab = self.compose(a, b).expect("isotropy arrows compose");
                table[i * n + j] = pos[&ab];
            }
        }
        let group = FiniteGroup::from_table(
            members
                .iter()
                .map(|&m| self.morphism_label(m).to_string())
                .collect(),
            table,
        )?;
        Ok(group.with_embedding(e, members))
    }

    /// Objects reachable from `e` (targets of arrows with source `e`), in object order.
    pub fn orbit(&self, e: Obj) -> Result<Vec<Obj>> {
        self.check_object(e)?;
        let reach: BTreeSet<Obj> = self
            .morphism_ids()
            .filter(|&m| self.src(m) == e)
            .map(|m| self.rng(m))
            .collect();
        Ok(reach.into_iter().collect())
    }

    /// Orbit partition of the objects, each class in object order.
    pub fn orbits(&self) -> Vec<Vec<Obj>> {
        let mut seen = vec![false; self.objects.len()];
        let mut classes = Vec::new();
        for e in self.object_ids() {
            if seen[e.0] {
                continue;
            }
            let class = self.orbit(e).expect("known object");
            for o in &class {
                seen[o.0] = true;
            }
            classes.push(class);
        }
        classes
    }

    pub fn is_connected(&self) -> bool {
        self.object_ids()
            .all(|e| self.object_ids().all(|f| self.hom(e, f).next().is_some()))
    }

    /// Arrows with source `e` and range `f`.
    pub fn hom(&self, e: Obj, f: Obj) -> impl Iterator<Item = Morph> + '_ {
        self.morphism_ids()
            .filter(move |&m| self.src(m) == e && self.rng(m) == f)
    }

    pub fn whole(&self) -> Subgroupoid {
        let mut members = FixedBitSet::with_capacity(self.num_morphisms());
        members.insert_range(..);
        Subgroupoid { members }
    }
}

/// A subset of morphisms closed under inverses and defined composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroupoid {
    members: FixedBitSet,
}

impl Subgroupoid {
    pub fn new(groupoid: &FiniteGroupoid, members: impl IntoIterator<Item = Morph>) -> Result<Self> {
        let mut set = FixedBitSet::with_capacity(groupoid.num_morphisms());
        for m in members {
            if m.0 >= groupoid.num_morphisms() {
                return Err(Error::UnknownMorphism(format!("#{}", m.0)));
            }
            set.insert(m.0);
        }
        if set.is_clear() {
            return Err(Error::axiom("subgroupoid", "empty subset"));
        }
        for g in set.ones().map(Morph) {
            if !set.contains(groupoid.inv(g).0) {
                return Err(Error::axiom(
                    "subgroupoid",
                    format!("not closed under inverse at `{}`", groupoid.morphism_label(g)),
                ));
            }
            for h in set.ones().map(Morph) {
                if let Some(gh) = groupoid.compose(g, h) {
                    if !set.contains(gh.0) {
                        return Err(Error::axiom(
                            "subgroupoid",
                            format!(
                                "not closed under composition at ({}, {})",
                                groupoid.morphism_label(g),
                                groupoid.morphism_label(h)
                            ),
                        ));
                    }
                }
            }
        }
        Ok(Subgroupoid { members: set })
    }

    pub fn isotropy(groupoid: &FiniteGroupoid, e: Obj) -> Result<Self> {
        groupoid.check_object(e)?;
        Self::new(groupoid, groupoid.isotropy_morphisms(e))
    }

    pub fn contains(&self, m: Morph) -> bool {
        self.members.contains(m.0)
    }

    pub fn members(&self) -> impl Iterator<Item = Morph> + '_ {
        self.members.ones().map(Morph)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// Objects whose identity arrow belongs to the subgroupoid.
    pub fn objects(&self, groupoid: &FiniteGroupoid) -> Vec<Obj> {
        groupoid
            .object_ids()
            .filter(|&o| self.contains(groupoid.identity(o)))
            .collect()
    }

    /// Connected as a groupoid in its own right.
    pub fn is_connected(&self, groupoid: &FiniteGroupoid) -> bool {
        let objs = self.objects(groupoid);
        objs.iter().all(|&e| {
            objs.iter().all(|&f| {
                groupoid
                    .hom(e, f)
                    .any(|m| self.contains(m))
            })
        })
    }
}

/// A finite group with its own Cayley table. Element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<usize>,
    inverse: Vec<usize>,
    /// Set for isotropy groups: the base object and the morphism behind each element.
    base: Option<(Obj, Vec<Morph>)>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication table, checking the group axioms.
    /// The identity is moved to index 0 only if it already is there.
    pub fn from_table(labels: Vec<String>, table: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || table.len() != n * n || table.iter().any(|&x| x >= n) {
            return Err(Error::MalformedInput("group table has wrong shape".into()));
        }
        let m = |a: usize, b: usize| table[a * n + b];
        if (0..n).any(|a| m(0, a) != a || m(a, 0) != a) {
            return Err(Error::axiom("group identity", "element 0 is not an identity"));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::axiom(
                            "group associativity",
                            format!("({}, {}, {})", labels[a], labels[b], labels[c]),
                        ));
                    }
                }
            }
        }
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| m(a, b) == 0 && m(b, a) == 0) {
                Some(b) => inverse.push(b),
                None => {
                    return Err(Error::axiom(
                        "group inverse",
                        format!("`{}` has no inverse", labels[a]),
                    ))
                }
            }
        }
        Ok(FiniteGroup {
            labels,
            table,
            inverse,
            base: None,
        })
    }

    fn with_embedding(mut self, e: Obj, members: Vec<Morph>) -> Self {
        self.base = Some((e, members));
        self
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z/n`, elements labelled `1, a, a^2, ...`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let labels = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "a".to_string(),
                _ => format!("a^{k}"),
            })
            .collect();
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        Self::from_table(labels, table).expect("cyclic group")
    }

    /// Symmetric group on `k` points (k ≤ 4), permutations in lexicographic order.
    pub fn symmetric(k: usize) -> Self {
        assert!((1..=4).contains(&k));
        let mut perms: Vec<Vec<usize>> = Vec::new();
        permutations(&mut (0..k).collect::<Vec<_>>(), 0, &mut perms);
        perms.sort();
        let pos: HashMap<Vec<usize>, usize> =
            perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let n = perms.len();
        let mut table = vec![0; n * n];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                // (p·q)(x) = p(q(x))
                let pq: Vec<usize> = (0..k).map(|x| p[q[x]]).collect();
                table[i * n + j] = pos[&pq];
            }
        }
        let labels = perms
            .iter()
            .map(|p| {
                if p.iter().enumerate().all(|(i, &x)| i == x) {
                    "1".to_string()
                } else {
                    format!("p{}", p.iter().map(|x| (x + 1).to_string()).collect::<String>())
                }
            })
            .collect();
        Self::from_table(labels, table).expect("symmetric group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Base object of an isotropy group.
    pub fn base(&self) -> Option<Obj> {
        self.base.as_ref().map(|(e, _)| *e)
    }

    /// The morphism behind element `a` of an isotropy group.
    pub fn morphism(&self, a: usize) -> Option<Morph> {
        self.base.as_ref().map(|(_, ms)| ms[a])
    }

    /// Order of element `a`.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn closure(&self, seed: &FixedBitSet) -> FixedBitSet {
        let mut set = seed.clone();
        set.insert(0);
        let mut queue: VecDeque<usize> = set.ones().collect();
        let mut elems: Vec<usize> = set.ones().collect();
        while let Some(a) = queue.pop_front() {
            let snapshot = elems.clone();
            for b in snapshot {
                for c in [self.mul(a, b), self.mul(b, a)] {
                    if !set.contains(c) {
                        set.insert(c);
                        elems.push(c);
                        queue.push_back(c);
                    }
                }
            }
        }
        set
    }

    /// All subgroups, by closing generated subsets until nothing new appears.
    /// Sorted by order, then by element set.
    pub fn subgroups(&self, bound: usize) -> Result<Vec<Subgroup>> {
        if self.order() > bound {
            return Err(Error::bound("group", self.order(), bound));
        }
        let n = self.order();
        let mut trivial = FixedBitSet::with_capacity(n);
        trivial.insert(0);
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier = vec![trivial];
        found.insert(vec![0]);
        while let Some(k) = frontier.pop() {
            for x in 0..n {
                if k.contains(x) {
                    continue;
                }
                let mut seed = k.clone();
                seed.insert(x);
                let closed = self.closure(&seed);
                let key: Vec<usize> = closed.ones().collect();
                if found.insert(key) {
                    frontier.push(closed);
                }
            }
        }
        let mut subgroups: Vec<Subgroup> = found
            .into_iter()
            .map(|elements| Subgroup { elements })
            .collect();
        subgroups.sort_by(|a, b| {
            a.elements
                .len()
                .cmp(&b.elements.len())
                .then_with(|| a.elements.cmp(&b.elements))
        });
        Ok(subgroups)
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        let set: BTreeSet<usize> = sub.elements.iter().copied().collect();
        (0..self.order()).all(|g| {
            sub.elements
                .iter()
                .all(|&x| set.contains(&self.mul(self.mul(g, x), self.inverse(g))))
        })
    }

    pub fn conjugate(&self, sub: &Subgroup, g: usize) -> Subgroup {
        let mut elements: Vec<usize> = sub
            .elements
            .iter()
            .map(|&x| self.mul(self.mul(g, x), self.inverse(g)))
            .collect();
        elements.sort_unstable();
        Subgroup { elements }
    }

    /// First non-trivial normal subgroup in enumeration order, if any. Every
    /// subgroup of a finite group is finite, so this is the finite-normal test.
    pub fn nontrivial_finite_normal_subgroup(&self, bound: usize) -> Result<Option<Subgroup>> {
        Ok(self
            .subgroups(bound)?
            .into_iter()
            .find(|s| s.order() > 1 && self.is_normal(s)))
    }

    /// A finite group has no elements of infinite order, so it is torsion-free
    /// exactly when it is trivial.
    pub fn is_torsion_free(&self) -> bool {
        self.order() == 1
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// A subgroup as a sorted list of element indices of its parent group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    pub elements: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Named groupoids used by the fixtures and tests.
pub mod named {
    use super::*;

    /// `e ← g — f`: two objects, `s(g)=f`, `r(g)=e`.
    pub fn p2() -> FiniteGroupoid {
        FiniteGroupoid::connected(&["e", "f"], &FiniteGroup::trivial(), |i, j, _| {
            match (i, j) {
                (1, 0) => "g".into(),
                (0, 1) => "g^-1".into(),
                _ => unreachable!(),
            }
        })
    }

    /// Three objects `f1, f2, f3` with arrows `g: f2→f1`, `h: f2→f3` and their
    /// composites, as in the 3×3 matrix-unit grading.
    pub fn p3() -> FiniteGroupoid {
        FiniteGroupoid::connected(&["f1", "f2", "f3"], &FiniteGroup::trivial(), |i, j, _| {
            match (i, j) {
                (1, 0) => "g".into(),
                (0, 1) => "g^-1".into(),
                (1, 2) => "h".into(),
                (2, 1) => "h^-1".into(),
                (0, 2) => "hg^-1".into(),
                (2, 0) => "gh^-1".into(),
                _ => unreachable!(),
            }
        })
    }

    /// Two objects `e, f`; `G_e^e = {e, g}`, `G_f^f = {f, h}`, `l, m: e → f`
    /// with `lg = m = hl`.
    pub fn g8() -> FiniteGroupoid {
        FiniteGroupoid::connected(&["e", "f"], &FiniteGroup::cyclic(2), |i, j, h| {
            match (i, j, h) {
                (0, 0, 1) => "g".into(),
                (1, 1, 1) => "h".into(),
                (0, 1, 0) => "l".into(),
                (0, 1, 1) => "m".into(),
                (1, 0, 0) => "l^-1".into(),
                (1, 0, 1) => "m^-1".into(),
                _ => unreachable!(),
            }
        })
    }

    /// Two objects with no arrows between them.
    pub fn two_points() -> FiniteGroupoid {
        FiniteGroupoid::discrete(&["e", "f"])
    }

    pub fn group(group: &FiniteGroup) -> FiniteGroupoid {
        FiniteGroupoid::from_group(group, "e")
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn p2_is_valid_and_connected() {
        let g = p2();
        assert_eq!(g.num_morphisms(), 4);
        let gm = g.morphism_by_label("g").unwrap();
        assert_eq!(g.object_label(g.src(gm)), "f");
        assert_eq!(g.object_label(g.rng(gm)), "e");
        assert!(g.is_connected());
        assert_eq!(g.orbit(Obj(0)).unwrap(), vec![Obj(0), Obj(1)]);
    }

    #[test]
    fn trivial_groupoid_is_valid() {
        let g = validate_groupoid(&RawGroupoid {
            objects: vec!["e".into()],
            ..Default::default()
        })
        .unwrap();
        assert_eq!(g.num_morphisms(), 1);
        assert!(g.is_connected());
    }

    #[test]
    fn composition_outside_composable_pairs_is_rejected() {
        let mut raw = p2().to_raw();
        raw.compose.push(["g".into(), "g".into(), "g".into()]);
        match validate_groupoid(&raw) {
            Err(Error::AxiomViolation { axiom, .. }) => assert_eq!(axiom, "composable pairs"),
            other => panic!("expected axiom violation, got {other:?}"),
        }
    }

    #[test]
    fn unknown_source_is_malformed() {
        let raw = RawGroupoid {
            objects: vec!["e".into()],
            morphisms: vec![RawMorphism {
                name: "g".into(),
                src: "nowhere".into(),
                rng: "e".into(),
            }],
            ..Default::default()
        };
        assert!(matches!(validate_groupoid(&raw), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn missing_inverse_is_reported() {
        let mut raw = p2().to_raw();
        raw.inverse.clear();
        assert!(matches!(
            validate_groupoid(&raw),
            Err(Error::AxiomViolation { .. })
        ));
    }

    #[test]
    fn associativity_failure_is_reported() {
        // Z/3 with a corrupted product a∘a = 1 (still has inverses, breaks associativity)
        let z3 = named::group(&FiniteGroup::cyclic(3));
        let mut raw = z3.to_raw();
        for entry in raw.compose.iter_mut() {
            if entry[0] == "a" && entry[1] == "a" {
                entry[2] = "a".into();
            }
        }
        assert!(validate_groupoid(&raw).is_err());
    }

    #[test]
    fn isotropy_examples() {
        let p3 = p3();
        let f1 = p3.object_by_label("f1").unwrap();
        assert_eq!(p3.isotropy(f1).unwrap().order(), 1);
        let g8 = g8();
        let e = g8.object_by_label("e").unwrap();
        let iso = g8.isotropy(e).unwrap();
        assert_eq!(iso.order(), 2);
        assert_eq!(iso.labels(), &["e".to_string(), "g".to_string()]);
        let s3 = FiniteGroup::symmetric(3);
        let one = named::group(&s3);
        assert_eq!(one.isotropy(Obj(0)).unwrap().order(), 6);
        assert!(matches!(p3.isotropy(Obj(7)), Err(Error::UnknownObject(_))));
    }

    #[test]
    fn g8_relations() {
        let g = g8();
        let m = |s: &str| g.morphism_by_label(s).unwrap();
        assert_eq!(g.compose(m("l"), m("g")), Some(m("m")));
        assert_eq!(g.compose(m("h"), m("l")), Some(m("m")));
        assert_eq!(g.compose(m("g"), m("g")), Some(m("e")));
        assert_eq!(g.compose(m("h"), m("h")), Some(m("f")));
        assert_eq!(g.object_label(g.src(m("l"))), "e");
        assert_eq!(g.object_label(g.rng(m("l"))), "f");
    }

    #[test]
    fn connectedness_and_orbits() {
        assert!(!two_points().is_connected());
        assert_eq!(two_points().orbit(Obj(0)).unwrap(), vec![Obj(0)]);
        let p3 = p3();
        // exhaustive pair check, independent of is_connected
        for e in p3.object_ids() {
            for f in p3.object_ids() {
                assert!(p3.morphism_ids().any(|m| p3.src(m) == e && p3.rng(m) == f));
            }
        }
        assert!(p3.is_connected());
        let f2 = p3.object_by_label("f2").unwrap();
        assert_eq!(p3.orbit(f2).unwrap().len(), 3);
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(FiniteGroup::trivial().subgroups(24).unwrap().len(), 1);
        assert_eq!(FiniteGroup::cyclic(2).subgroups(24).unwrap().len(), 2);
        // Z/4: {0}, {0,2}, Z/4; brute force over all subsets
        let z4 = FiniteGroup::cyclic(4);
        let brute = (1u32..16)
            .filter(|mask| {
                let els: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
                els.contains(&0)
                    && els
                        .iter()
                        .all(|&a| els.iter().all(|&b| els.contains(&z4.mul(a, z4.inverse(b)))))
            })
            .count();
        assert_eq!(brute, 3);
        assert_eq!(z4.subgroups(24).unwrap().len(), 3);
        // S_3 has 6 subgroups
        assert_eq!(FiniteGroup::symmetric(3).subgroups(24).unwrap().len(), 6);
        assert_eq!(FiniteGroup::symmetric(4).subgroups(24).unwrap().len(), 30);
        assert!(matches!(
            FiniteGroup::symmetric(4).subgroups(10),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn finite_normal_subgroups() {
        assert!(FiniteGroup::trivial()
            .nontrivial_finite_normal_subgroup(24)
            .unwrap()
            .is_none());
        let z2 = FiniteGroup::cyclic(2);
        assert_eq!(
            z2.nontrivial_finite_normal_subgroup(24).unwrap().unwrap().elements,
            vec![0, 1]
        );
        let s3 = FiniteGroup::symmetric(3);
        let w = s3.nontrivial_finite_normal_subgroup(24).unwrap().unwrap();
        assert_eq!(w.order(), 3);
        assert!(w.elements.iter().all(|&x| s3.element_order(x) != 2));
    }

    #[test]
    fn torsion_free_is_triviality() {
        assert!(FiniteGroup::trivial().is_torsion_free());
        assert!(!FiniteGroup::cyclic(2).is_torsion_free());
        assert!(!FiniteGroup::cyclic(6).is_torsion_free());
    }

    #[test]
    fn subgroupoid_checks() {
        let g = p3();
        let iso = Subgroupoid::isotropy(&g, Obj(0)).unwrap();
        assert_eq!(iso.len(), 1);
        let gm = g.morphism_by_label("g").unwrap();
        assert!(Subgroupoid::new(&g, [gm]).is_err());
        assert!(g.whole().is_connected(&g));
    }

    #[test]
    fn disjoint_union_is_disconnected() {
        let a = FiniteGroupoid::pair(&["a", "b"]);
        let c = FiniteGroupoid::pair(&["c", "d"]);
        let u = FiniteGroupoid::disjoint_union(&[a, c]).unwrap();
        assert_eq!(u.num_morphisms(), 8);
        assert!(!u.is_connected());
        assert_eq!(u.orbits().len(), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_groupoid() -> impl Strategy<Value = FiniteGroupoid> {
            (1usize..=3, 0usize..3, 1usize..=2).prop_map(|(n, gk, comps)| {
                let group = match gk {
                    0 => FiniteGroup::trivial(),
                    1 => FiniteGroup::cyclic(2),
                    _ => FiniteGroup::cyclic(3),
                };
                let parts: Vec<FiniteGroupoid> = (0..comps)
                    .map(|c| {
                        let names: Vec<String> = (0..n).map(|i| format!("o{c}_{i}")).collect();
                        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                        FiniteGroupoid::connected(&refs, &group, |i, j, h| {
                            format!("m{c}_{i}_{j}_{h}")
                        })
                    })
                    .collect();
                FiniteGroupoid::disjoint_union(&parts).unwrap()
            })
        }

        proptest! {
            #[test]
            fn inverse_is_involutive(g in arb_groupoid()) {
                for m in g.morphism_ids() {
                    prop_assert_eq!(g.inv(g.inv(m)), m);
                    prop_assert_eq!(g.src(g.inv(m)), g.rng(m));
                }
            }

            #[test]
            fn orbits_partition_objects(g in arb_groupoid()) {
                let classes = g.orbits();
                let total: usize = classes.iter().map(|c| c.len()).sum();
                prop_assert_eq!(total, g.num_objects());
                prop_assert_eq!(g.is_connected(), classes.len() == 1);
            }

            #[test]
            fn raw_round_trip(g in arb_groupoid()) {
                prop_assert_eq!(validate_groupoid(&g.to_raw()).unwrap(), g);
            }

            #[test]
            fn subgroups_closed_under_conjugation(k in 1usize..=4) {
                let h = FiniteGroup::symmetric(k);
                let subs = h.subgroups(24).unwrap();
                for s in &subs {
                    for g in 0..h.order() {
                        prop_assert!(subs.contains(&h.conjugate(s, g)));
                    }
                }
            }
        }
    }
}
