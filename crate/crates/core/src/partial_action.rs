//! Partial actions of groupoids on finite rings, the partial skew groupoid
//! rings they define, and groupoid rings `R[G]` as the trivial global case.
//!
//! The ambient ring `A` is always the external direct sum of one summand `A_e`
//! per object. Every map `σ_g: A_{g^-1} → A_g` is stored as an element table.

use std::any::Any;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{quote_label, Expr};
use crate::graded::Grading;
use crate::groupoid::{FiniteGroupoid, Morph, Obj, Subgroupoid};
use crate::primeness::Bounds;
use crate::ring::{
    direct_sum, ideal_generated, is_maximal_commutative, is_prime_bruteforce, is_s_unital, join_terms,
    AdditiveSubgroup, Closure, DirectSumRing, Elem, FiniteRing, PrimeVerdict, RingArith,
};

const NONE: u32 = u32::MAX;

/// How `σ_g` is supplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawMap {
    /// `x ↦ x`; requires `A_{g^-1} = A_g`.
    Identity,
    /// Every element of `A_{g^-1}` with its image (`0 ↦ 0` may be omitted).
    Table(Vec<(String, String)>),
    /// Images of elements that generate `A_{g^-1}` additively; extended
    /// additively, with a consistency check.
    Additive(Vec<(String, String)>),
}

/// Unvalidated partial action, with elements as expressions in the ambient ring.
#[derive(Clone, Debug)]
pub struct RawPartialAction {
    pub groupoid: FiniteGroupoid,
    pub ambient: FiniteRing,
    /// Generators of the ideal `A_g`, by morphism label. Missing entries mean
    /// `A_{r(g)}`, so a global action only needs its maps.
    pub ideals: BTreeMap<String, Vec<String>>,
    /// `σ_g` by morphism label. Missing entries are the identity on objects and
    /// the inverse of `σ_{g^-1}` otherwise.
    pub maps: BTreeMap<String, RawMap>,
}

/// A validated partial action.
#[derive(Clone)]
pub struct PartialAction {
    groupoid: FiniteGroupoid,
    ambient: FiniteRing,
    /// Summand of each object in the ambient sum; `None` when the single
    /// object owns the whole ambient ring.
    slots: Option<Vec<usize>>,
    parts: Vec<FiniteRing>,
    ideals: Vec<AdditiveSubgroup>,
    /// `sigma[g][x]` for `x ∈ A_{g^-1}`, `NONE` elsewhere.
    sigma: Vec<Vec<u32>>,
}

impl std::fmt::Debug for PartialAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PartialAction")
            .field("ambient", &self.ambient)
            .field("groupoid", &self.groupoid)
            .finish()
    }
}

fn object_layout(gr: &FiniteGroupoid, a: &FiniteRing) -> Result<(Option<Vec<usize>>, Vec<FiniteRing>)> {
    let n = gr.num_objects();
    if let Some(ds) = a.downcast::<DirectSumRing>() {
        if let Some(labels) = ds.labels() {
            let slots: Option<Vec<usize>> = gr
                .object_ids()
                .map(|e| labels.iter().position(|l| l == gr.object_label(e)))
                .collect();
            if let (Some(slots), true) = (slots, labels.len() == n) {
                let parts = slots.iter().map(|&i| ds.parts()[i].clone()).collect();
                return Ok((Some(slots), parts));
            }
        } else if n > 1 && ds.parts().len() == n {
            return Ok((Some((0..n).collect()), ds.parts().to_vec()));
        }
    }
    if n == 1 {
        return Ok((None, vec![a.clone()]));
    }
    Err(Error::axiom(
        "direct sum",
        format!(
            "the ambient ring {} is not a direct sum with one summand per object; use by_object(...)",
            a.describe()
        ),
    ))
}

fn label_of(gr: &FiniteGroupoid, g: Morph) -> String {
    quote_label(gr.morphism_label(g))
}

impl PartialAction {
    /// Builds and validates an action from its ideals (indexed by morphism) and
    /// a function giving `σ_g(x)` for `x ∈ A_{g^-1}`.
    pub fn new(
        groupoid: &FiniteGroupoid,
        ambient: &FiniteRing,
        ideals: Vec<AdditiveSubgroup>,
        sigma: impl Fn(Morph, Elem) -> Elem,
    ) -> Result<Self> {
        if ideals.len() != groupoid.num_morphisms() {
            return Err(Error::MalformedInput(format!(
                "{} ideals given for {} morphisms",
                ideals.len(),
                groupoid.num_morphisms()
            )));
        }
        let mut tables = Vec::with_capacity(ideals.len());
        for g in groupoid.morphism_ids() {
            let mut t = vec![NONE; ambient.size()];
            for &x in ideals[groupoid.inv(g).0].elements() {
                t[x] = sigma(g, x) as u32;
            }
            tables.push(t);
        }
        Self::from_tables(groupoid, ambient, ideals, tables)
    }

    fn from_tables(
        groupoid: &FiniteGroupoid,
        ambient: &FiniteRing,
        ideals: Vec<AdditiveSubgroup>,
        sigma: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let (slots, parts) = object_layout(groupoid, ambient)?;
        if ideals.iter().any(|i| !i.ring().same(ambient)) {
            return Err(Error::RingMismatch);
        }
        let action = PartialAction {
            groupoid: groupoid.clone(),
            ambient: ambient.clone(),
            slots,
            parts,
            ideals,
            sigma,
        };
        action.validate()?;
        Ok(action)
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn ambient(&self) -> &FiniteRing {
        &self.ambient
    }

    /// `A_g`.
    pub fn ideal(&self, g: Morph) -> &AdditiveSubgroup {
        &self.ideals[g.0]
    }

    /// `A_e`.
    pub fn object_ideal(&self, e: Obj) -> &AdditiveSubgroup {
        &self.ideals[self.groupoid.identity(e).0]
    }

    /// `σ_g(x)`, or `None` outside `A_{g^-1}`.
    pub fn sigma(&self, g: Morph, x: Elem) -> Option<Elem> {
        match self.sigma[g.0][x] {
            NONE => None,
            y => Some(y as Elem),
        }
    }

    /// `A_e` as a ring of its own.
    pub fn part_ring(&self, e: Obj) -> &FiniteRing {
        &self.parts[e.0]
    }

    fn sum(&self) -> Option<&DirectSumRing> {
        self.ambient.downcast::<DirectSumRing>()
    }

    /// The `A_e` coordinate of `x`, as an element of `part_ring(e)`.
    pub fn to_part(&self, e: Obj, x: Elem) -> Elem {
        match &self.slots {
            None => x,
            Some(s) => self.sum().expect("direct sum").project(x, s[e.0]),
        }
    }

    /// Embeds an element of `part_ring(e)` into the ambient ring.
    pub fn from_part(&self, e: Obj, y: Elem) -> Elem {
        match &self.slots {
            None => y,
            Some(s) => self.sum().expect("direct sum").inject(s[e.0], y),
        }
    }

    fn summand(&self, e: Obj) -> AdditiveSubgroup {
        let part = &self.parts[e.0];
        AdditiveSubgroup::closure(
            &self.ambient,
            part.additive_generators().iter().map(|&y| self.from_part(e, y)),
        )
    }

    /// Objects with `A_e ≠ 0`.
    pub fn support_objects(&self) -> Vec<Obj> {
        self.groupoid
            .object_ids()
            .filter(|&e| !self.object_ideal(e).is_zero())
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let a = &self.ambient;
        let gr = &self.groupoid;
        let name = |g: Morph| label_of(gr, g);
        for e in gr.object_ids() {
            if self.object_ideal(e) != &self.summand(e) {
                return Err(Error::axiom(
                    "direct sum",
                    format!("A_{} is not the summand of the ambient ring at that object", gr.object_label(e)),
                ));
            }
        }
        let mut inverse = Vec::with_capacity(gr.num_morphisms());
        for g in gr.morphism_ids() {
            let ar = self.object_ideal(gr.rng(g));
            let ag = self.ideal(g);
            if !ar.is_ideal() {
                return Err(Error::axiom("i", format!("A_{} is not an ideal of A", gr.object_label(gr.rng(g)))));
            }
            if let Some(&x) = ag.generators().iter().find(|&&x| !ar.contains(x)) {
                return Err(Error::axiom(
                    "i",
                    format!("{} ∈ A_{} lies outside A_{}", a.render(x), name(g), gr.object_label(gr.rng(g))),
                ));
            }
            for &x in ag.generators() {
                for &y in ar.generators() {
                    for p in [a.mul(x, y), a.mul(y, x)] {
                        if !ag.contains(p) {
                            return Err(Error::axiom(
                                "i",
                                format!("A_{} is not an ideal of A_r(g): product {} escapes", name(g), a.render(p)),
                            ));
                        }
                    }
                }
            }
            let dom = self.ideal(gr.inv(g));
            let t = &self.sigma[g.0];
            if let Some(x) = a.elements().find(|&x| dom.contains(x) != (t[x] != NONE)) {
                return Err(Error::axiom(
                    "i",
                    format!("σ_{} is not defined exactly on A_{} (at {})", name(g), name(gr.inv(g)), a.render(x)),
                ));
            }
            let mut inv = vec![NONE; a.size()];
            for &x in dom.elements() {
                let y = t[x] as Elem;
                if !ag.contains(y) {
                    return Err(Error::axiom(
                        "i",
                        format!("σ_{}({}) = {} is not in A_{}", name(g), a.render(x), a.render(y), name(g)),
                    ));
                }
                if inv[y] != NONE {
                    return Err(Error::axiom(
                        "i",
                        format!("σ_{} is not injective: two elements map to {}", name(g), a.render(y)),
                    ));
                }
                inv[y] = x as u32;
            }
            if dom.len() != ag.len() {
                return Err(Error::axiom(
                    "i",
                    format!("σ_{} is not onto A_{}: |A_{}| = {} but |A_{}| = {}", name(g), name(g), name(gr.inv(g)), dom.len(), name(g), ag.len()),
                ));
            }
            for &x in dom.elements() {
                for &u in dom.generators() {
                    if t[a.add(x, u)] as Elem != a.add(t[x] as Elem, t[u] as Elem) {
                        return Err(Error::axiom(
                            "i",
                            format!("σ_{} is not additive at {}, {}", name(g), a.render(x), a.render(u)),
                        ));
                    }
                }
            }
            for &u in dom.generators() {
                for &v in dom.generators() {
                    if t[a.mul(u, v)] as Elem != a.mul(t[u] as Elem, t[v] as Elem) {
                        return Err(Error::axiom(
                            "i",
                            format!("σ_{} is not multiplicative at {}, {}", name(g), a.render(u), a.render(v)),
                        ));
                    }
                }
            }
            inverse.push(inv);
        }
        for e in gr.object_ids() {
            let id = gr.identity(e);
            if let Some(&x) = self.object_ideal(e).elements().iter().find(|&&x| self.sigma[id.0][x] as Elem != x) {
                return Err(Error::axiom(
                    "ii",
                    format!("σ_{} moves {}", gr.object_label(e), a.render(x)),
                ));
            }
        }
        for g in gr.morphism_ids() {
            let dom_g = self.ideal(gr.inv(g));
            for h in gr.morphism_ids() {
                let Some(gh) = gr.compose(g, h) else { continue };
                let target = self.ideal(gr.inv(gh));
                for &y in self.ideal(h).elements() {
                    if !dom_g.contains(y) {
                        continue;
                    }
                    let x = inverse[h.0][y] as Elem;
                    if !target.contains(x) {
                        return Err(Error::axiom(
                            "iii",
                            format!(
                                "σ_{}^-1({}) = {} is not in A_({})^-1 for the pair ({}, {})",
                                name(h), a.render(y), a.render(x), name(gh), name(g), name(h)
                            ),
                        ));
                    }
                    if self.sigma[g.0][y] != self.sigma[gh.0][x] {
                        return Err(Error::axiom(
                            "iv",
                            format!(
                                "σ_{}(σ_{}({})) differs from σ_{}({})",
                                name(g), name(h), a.render(x), name(gh), a.render(x)
                            ),
                        ));
                    }
                }
            }
        }
        for g in gr.morphism_ids() {
            if let Some(m) = is_s_unital(self.ideal(g), self.ideal(g))? {
                return Err(Error::axiom(
                    "s-unital",
                    format!("A_{} has no s-unit for {}", name(g), a.render(m)),
                ));
            }
        }
        Ok(())
    }

    /// `A_g = A_{r(g)}` for every `g`.
    pub fn is_global(&self) -> bool {
        let gr = &self.groupoid;
        gr.morphism_ids().all(|g| self.ideal(g) == self.object_ideal(gr.rng(g)))
    }

    /// A family `h_f: e → f` with `h_e = e`, `A_{h_f^-1} = A_e`, `A_{h_f} = A_f`
    /// anchored at `e`, if one exists.
    pub fn group_type_family(&self, e: Obj) -> Option<Vec<(Obj, Morph)>> {
        let gr = &self.groupoid;
        let ae = self.object_ideal(e);
        let mut family = Vec::new();
        for f in gr.object_ids() {
            let h = if f == e {
                gr.identity(e)
            } else {
                gr.hom(e, f)
                    .find(|&h| self.ideal(gr.inv(h)) == ae && self.ideal(h) == self.object_ideal(f))?
            };
            family.push((f, h));
        }
        Some(family)
    }

    /// Group-type classification; tries every anchor in object order.
    pub fn group_type(&self) -> GroupTypeReport {
        let gr = &self.groupoid;
        if !gr.is_connected() {
            return GroupTypeReport {
                holds: false,
                anchor: None,
                family: Vec::new(),
                reason: Some("the groupoid is not connected".into()),
            };
        }
        for e in gr.object_ids() {
            if let Some(family) = self.group_type_family(e) {
                return GroupTypeReport {
                    holds: true,
                    anchor: Some(e),
                    family,
                    reason: None,
                };
            }
        }
        GroupTypeReport {
            holds: false,
            anchor: None,
            family: Vec::new(),
            reason: Some("no object anchors a family with A_{h_f^-1} = A_e and A_{h_f} = A_f".into()),
        }
    }

    pub fn is_group_type(&self) -> bool {
        self.group_type().holds
    }

    /// `Π_g |A_g|`, the size of the skew ring; `None` on overflow.
    pub fn skew_size(&self) -> Option<usize> {
        self.ideals.iter().try_fold(1usize, |acc, i| acc.checked_mul(i.len()))
    }

    /// The restriction `σ^e` of the action to the isotropy group at `e`,
    /// acting on `A_e`.
    pub fn restrict_to_isotropy(&self, e: Obj) -> Result<PartialAction> {
        let gr = &self.groupoid;
        let group = gr.isotropy(e)?;
        let members = gr.isotropy_morphisms(e);
        let iso = FiniteGroupoid::from_group(&group, gr.object_label(e));
        let part = self.parts[e.0].clone();
        let mut ideals = vec![AdditiveSubgroup::zero(&part); iso.num_morphisms()];
        let mut origin = vec![Morph(0); iso.num_morphisms()];
        for (k, &g) in members.iter().enumerate() {
            let t = iso.morphism_by_label(if k == 0 { gr.object_label(e) } else { group.label(k) })?;
            ideals[t.0] = AdditiveSubgroup::closure(
                &part,
                self.ideal(g).generators().iter().map(|&x| self.to_part(e, x)),
            );
            origin[t.0] = g;
        }
        PartialAction::new(&iso, &part, ideals, |t, y| {
            let x = self.from_part(e, y);
            self.to_part(e, self.sigma(origin[t.0], x).expect("restricted domain"))
        })
    }

    // ------------------------------------------------------------ invariance

    /// First `(g, x)` with `g ∈ H`, `x ∈ I ∩ A_{g^-1}` and `σ_g(x) ∉ I`.
    pub fn invariance_failure(&self, i: &AdditiveSubgroup, h: Option<&Subgroupoid>) -> Option<(Morph, Elem)> {
        let gr = &self.groupoid;
        for g in gr.morphism_ids() {
            if h.is_some_and(|h| !h.contains(g)) {
                continue;
            }
            let dom = self.ideal(gr.inv(g));
            for &x in i.elements() {
                if dom.contains(x) && !i.contains(self.sigma[g.0][x] as Elem) {
                    return Some((g, x));
                }
            }
        }
        None
    }

    /// `σ_g(I ∩ A_{g^-1}) ⊆ I` for every `g ∈ H` (all of `G` when `None`).
    pub fn is_sigma_invariant(&self, i: &AdditiveSubgroup, h: Option<&Subgroupoid>) -> bool {
        self.invariance_failure(i, h).is_none()
    }

    /// Smallest `G`-invariant ideal of `A` containing `seed`.
    pub fn invariant_closure(&self, seed: &[Elem]) -> AdditiveSubgroup {
        let a = &self.ambient;
        let gr = &self.groupoid;
        let op = Closure::ideal(a);
        let mut i = op.run(a, seed.iter().copied());
        loop {
            let mut extra = Vec::new();
            for g in gr.morphism_ids() {
                let dom = self.ideal(gr.inv(g));
                for &x in i.elements() {
                    if dom.contains(x) {
                        let y = self.sigma[g.0][x] as Elem;
                        if !i.contains(y) {
                            extra.push(y);
                        }
                    }
                }
            }
            if extra.is_empty() {
                return i;
            }
            i = op.run(a, i.generators().iter().copied().chain(extra));
        }
    }

    /// `A` is `G`-prime: no nonzero `G`-invariant ideals `I, J` with `IJ = 0`.
    /// The witness `(a, b)` is the first pair whose invariant closures
    /// multiply to zero.
    pub fn is_a_g_prime(&self, bound: usize) -> Result<PrimeVerdict> {
        let a = &self.ambient;
        if a.size() > bound {
            return Err(Error::bound("ambient ring for the G-primeness search", a.size(), bound));
        }
        if a.is_zero_ring() {
            return Ok(PrimeVerdict::degenerate());
        }
        let mut memo: BTreeMap<Elem, AdditiveSubgroup> = BTreeMap::new();
        for x in 1..a.size() {
            let jx = self.invariant_closure(&[x]);
            // J(c) ⊆ J(x) for c ∈ J(x); an earlier c already passed.
            if jx.elements().iter().any(|&c| c != 0 && c < x) {
                continue;
            }
            for y in 1..a.size() {
                let jy = memo.entry(y).or_insert_with(|| self.invariant_closure(&[y]));
                if jx.annihilates(jy) {
                    return Ok(PrimeVerdict::not_prime(x, y));
                }
            }
            memo.insert(x, jx);
        }
        Ok(PrimeVerdict::prime())
    }
}

/// Outcome of the group-type search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupTypeReport {
    pub holds: bool,
    pub anchor: Option<Obj>,
    /// `(f, h_f)` for every object `f`.
    pub family: Vec<(Obj, Morph)>,
    pub reason: Option<String>,
}

fn parse_in(ring: &FiniteRing, src: &str) -> Result<Elem> {
    ring.parse_element(src)
}

fn map_table(
    a: &FiniteRing,
    gr: &FiniteGroupoid,
    g: Morph,
    dom: &AdditiveSubgroup,
    raw: &RawMap,
) -> Result<Vec<u32>> {
    let name = label_of(gr, g);
    let mut t = vec![NONE; a.size()];
    match raw {
        RawMap::Identity => {
            for &x in dom.elements() {
                t[x] = x as u32;
            }
        }
        RawMap::Table(pairs) => {
            t[0] = 0;
            for (xs, ys) in pairs {
                let (x, y) = (parse_in(a, xs)?, parse_in(a, ys)?);
                if !dom.contains(x) {
                    return Err(Error::axiom(
                        "i",
                        format!("σ_{name} is given at {} outside its domain", a.render(x)),
                    ));
                }
                if t[x] != NONE && t[x] as Elem != y {
                    return Err(Error::axiom("i", format!("σ_{name} has two values at {}", a.render(x))));
                }
                t[x] = y as u32;
            }
            if let Some(&x) = dom.elements().iter().find(|&&x| t[x] == NONE) {
                return Err(Error::axiom("i", format!("σ_{name} is not defined at {}", a.render(x))));
            }
        }
        RawMap::Additive(pairs) => {
            let mut gens = Vec::with_capacity(pairs.len());
            for (xs, ys) in pairs {
                let x = parse_in(a, xs)?;
                if !dom.contains(x) {
                    return Err(Error::axiom(
                        "i",
                        format!("σ_{name} is given at {} outside its domain", a.render(x)),
                    ));
                }
                gens.push((x, parse_in(a, ys)?));
            }
            t[0] = 0;
            let mut queue = vec![0];
            while let Some(x) = queue.pop() {
                for &(u, v) in &gens {
                    let s = a.add(x, u);
                    let img = a.add(t[x] as Elem, v) as u32;
                    if t[s] == NONE {
                        t[s] = img;
                        queue.push(s);
                    } else if t[s] != img {
                        return Err(Error::axiom(
                            "i",
                            format!("σ_{name} is not additive: the given images force two values at {}", a.render(s)),
                        ));
                    }
                }
            }
            if let Some(&x) = dom.elements().iter().find(|&&x| t[x] == NONE) {
                return Err(Error::axiom(
                    "i",
                    format!("the given images do not determine σ_{name} at {}", a.render(x)),
                ));
            }
        }
    }
    Ok(t)
}

/// Resolves labels and expressions, then checks every axiom: (i)–(iv),
/// s-unitality of each `A_g` and `A = ⊕_e A_e`.
pub fn validate_partial_action(raw: &RawPartialAction) -> Result<PartialAction> {
    let gr = &raw.groupoid;
    let a = &raw.ambient;
    let (slots, parts) = object_layout(gr, a)?;
    for label in raw.ideals.keys().chain(raw.maps.keys()) {
        gr.morphism_by_label(label)?;
    }
    let layout = PartialAction {
        groupoid: gr.clone(),
        ambient: a.clone(),
        slots,
        parts,
        ideals: Vec::new(),
        sigma: Vec::new(),
    };
    let summands: Vec<AdditiveSubgroup> = gr.object_ids().map(|e| layout.summand(e)).collect();
    let mut ideals = Vec::with_capacity(gr.num_morphisms());
    for g in gr.morphism_ids() {
        ideals.push(match raw.ideals.get(gr.morphism_label(g)) {
            Some(gens) => {
                let xs = gens.iter().map(|s| parse_in(a, s)).collect::<Result<Vec<_>>>()?;
                ideal_generated(a, xs)
            }
            None => summands[gr.rng(g).0].clone(),
        });
    }
    let mut given: Vec<Option<Vec<u32>>> = vec![None; gr.num_morphisms()];
    for g in gr.morphism_ids() {
        if let Some(m) = raw.maps.get(gr.morphism_label(g)) {
            given[g.0] = Some(map_table(a, gr, g, &ideals[gr.inv(g).0], m)?);
        }
    }
    let mut tables = Vec::with_capacity(gr.num_morphisms());
    for g in gr.morphism_ids() {
        if let Some(t) = &given[g.0] {
            tables.push(t.clone());
        } else if gr.is_identity(g) {
            tables.push(map_table(a, gr, g, &ideals[g.0], &RawMap::Identity)?);
        } else if let Some(t) = &given[gr.inv(g).0] {
            let mut inv = vec![NONE; a.size()];
            for (x, &y) in t.iter().enumerate() {
                if y == NONE {
                    continue;
                }
                if inv[y as usize] != NONE {
                    return Err(Error::axiom(
                        "i",
                        format!("σ_{} is not injective, so σ_{} cannot be derived from it", label_of(gr, gr.inv(g)), label_of(gr, g)),
                    ));
                }
                inv[y as usize] = x as u32;
            }
            tables.push(inv);
        } else {
            return Err(Error::Schema(format!(
                "no map given for {} or its inverse",
                gr.morphism_label(g)
            )));
        }
    }
    let mut action = layout;
    action.ideals = ideals;
    action.sigma = tables;
    action.validate()?;
    Ok(action)
}

// ---------------------------------------------------------------- skew rings

/// Arithmetic of `A ⋊_σ G`. An element is a tuple `(a_g)_g` with `a_g ∈ A_g`,
/// encoded in mixed radix over the sorted elements of each `A_g`.
pub struct SkewRing {
    groupoid: FiniteGroupoid,
    ambient: FiniteRing,
    coords: Vec<Vec<Elem>>,
    pos: Vec<Vec<u32>>,
    sigma: Vec<Vec<u32>>,
    place: Vec<usize>,
    size: usize,
    one: Option<Elem>,
}

impl SkewRing {
    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn ambient(&self) -> &FiniteRing {
        &self.ambient
    }

    /// `a_g`, as an element of the ambient ring.
    pub fn coefficient(&self, x: Elem, g: Morph) -> Elem {
        let c = &self.coords[g.0];
        c[(x / self.place[g.0]) % c.len()]
    }

    pub fn coefficients(&self, x: Elem) -> Vec<Elem> {
        self.groupoid.morphism_ids().map(|g| self.coefficient(x, g)).collect()
    }

    /// `aδ_g`, or `None` when `a ∉ A_g`.
    pub fn delta(&self, g: Morph, a: Elem) -> Option<Elem> {
        match self.pos[g.0][a] {
            NONE => None,
            k => Some(k as usize * self.place[g.0]),
        }
    }

    fn encode(&self, cs: &[Elem]) -> Elem {
        cs.iter()
            .enumerate()
            .map(|(g, &c)| {
                let k = self.pos[g][c];
                assert!(k != NONE, "coefficient outside A_g");
                k as usize * self.place[g]
            })
            .sum()
    }

    /// `α_g(α_{g^-1}(a)·b)`, the coefficient of `(aδ_g)(bδ_h)` at `gh`.
    fn term(&self, g: Morph, a: Elem, b: Elem) -> Elem {
        let ginv = self.groupoid.inv(g);
        let back = self.sigma[ginv.0][a] as Elem;
        self.sigma[g.0][self.ambient.mul(back, b)] as Elem
    }
}

impl RingArith for SkewRing {
    fn size(&self) -> usize {
        self.size
    }
    fn add(&self, x: Elem, y: Elem) -> Elem {
        let a = &self.ambient;
        let cs: Vec<Elem> = self
            .groupoid
            .morphism_ids()
            .map(|g| a.add(self.coefficient(x, g), self.coefficient(y, g)))
            .collect();
        self.encode(&cs)
    }
    fn neg(&self, x: Elem) -> Elem {
        let cs: Vec<Elem> = self.coefficients(x).into_iter().map(|c| self.ambient.neg(c)).collect();
        self.encode(&cs)
    }
    fn mul(&self, x: Elem, y: Elem) -> Elem {
        let gr = &self.groupoid;
        let a = &self.ambient;
        let xs = self.coefficients(x);
        let ys = self.coefficients(y);
        let mut acc = vec![0; xs.len()];
        for (g, &ag) in xs.iter().enumerate() {
            if ag == 0 {
                continue;
            }
            for (h, &bh) in ys.iter().enumerate() {
                if bh == 0 {
                    continue;
                }
                if let Some(gh) = gr.compose(Morph(g), Morph(h)) {
                    acc[gh.0] = a.add(acc[gh.0], self.term(Morph(g), ag, bh));
                }
            }
        }
        self.encode(&acc)
    }
    fn one(&self) -> Option<Elem> {
        self.one
    }
    fn describe(&self) -> String {
        format!("skew({})", self.ambient.describe())
    }
    fn render(&self, x: Elem) -> String {
        let gr = &self.groupoid;
        let terms = gr
            .morphism_ids()
            .filter_map(|g| {
                let c = self.coefficient(x, g);
                (c != 0).then(|| format!("delta({}, {})", label_of(gr, g), self.ambient.render(c)))
            })
            .collect();
        join_terms(terms)
    }
    fn atom(&self, ring: &FiniteRing, name: &str, args: &[Expr]) -> Result<Elem> {
        if name == "delta" && args.len() == 2 {
            let label = args[0].as_name().map(str::to_string).unwrap_or_else(|| args[0].to_string());
            let g = self.groupoid.morphism_by_label(&label)?;
            let a = self.ambient.eval(&args[1])?;
            return self.delta(g, a).ok_or_else(|| {
                Error::MalformedInput(format!("{} is not in A_{}", self.ambient.render(a), quote_label(&label)))
            });
        }
        Err(Error::MalformedInput(format!(
            "`{name}` is not an element of {}; use delta(g, a)",
            ring.describe()
        )))
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Materializes `A ⋊_σ G` with its grading `S_g = A_gδ_g`. The grading is
/// validated and checked to be nearly epsilon-strong.
pub fn build_skew_ring(action: &PartialAction, bound: usize) -> Result<Grading> {
    let size = action.skew_size().unwrap_or(usize::MAX);
    if size > bound {
        return Err(Error::bound("partial skew groupoid ring", size, bound));
    }
    let gr = &action.groupoid;
    let a = &action.ambient;
    let coords: Vec<Vec<Elem>> = action.ideals.iter().map(|i| i.sorted()).collect();
    let mut pos = Vec::with_capacity(coords.len());
    let mut place = Vec::with_capacity(coords.len());
    let mut p = 1;
    for c in &coords {
        let mut v = vec![NONE; a.size()];
        for (k, &x) in c.iter().enumerate() {
            v[x] = k as u32;
        }
        pos.push(v);
        place.push(p);
        p *= c.len();
    }
    let one = gr
        .object_ids()
        .map(|e| {
            action.parts[e.0].one().map(|u| {
                let id = gr.identity(e).0;
                pos[id][action.from_part(e, u)] as usize * place[id]
            })
        })
        .sum::<Option<Elem>>();
    let skew = SkewRing {
        groupoid: gr.clone(),
        ambient: a.clone(),
        coords,
        pos,
        sigma: action.sigma.clone(),
        place,
        size,
        one,
    };
    // Products of generators stay in A_{gh}; by bilinearity so does every product.
    for g in gr.morphism_ids() {
        for h in gr.morphism_ids() {
            let Some(gh) = gr.compose(g, h) else { continue };
            for &u in action.ideal(g).generators() {
                for &v in action.ideal(h).generators() {
                    let t = skew.term(g, u, v);
                    if skew.pos[gh.0][t] == NONE {
                        return Err(Error::AssociativityFailure(format!(
                            "(aδ_{})(bδ_{}) has coefficient {} outside A_{}",
                            label_of(gr, g),
                            label_of(gr, h),
                            a.render(t),
                            label_of(gr, gh)
                        )));
                    }
                }
            }
        }
    }
    let gens: Vec<Vec<Elem>> = gr
        .morphism_ids()
        .map(|g| {
            action
                .ideal(g)
                .generators()
                .iter()
                .map(|&u| skew.delta(g, u).expect("generator of A_g"))
                .collect()
        })
        .collect();
    let ring = FiniteRing::new(skew);
    let flat: Vec<Elem> = gens.iter().flatten().copied().collect();
    for &x in &flat {
        for &y in &flat {
            let xy = ring.mul(x, y);
            for &z in &flat {
                if ring.mul(xy, z) != ring.mul(x, ring.mul(y, z)) {
                    return Err(Error::AssociativityFailure(format!(
                        "({})({})({})",
                        ring.render(x),
                        ring.render(y),
                        ring.render(z)
                    )));
                }
            }
        }
    }
    let grading = Grading::new(gr, &ring, &gens)?;
    if !grading.is_nearly_epsilon_strong()? {
        return Err(Error::InternalDisagreement(format!(
            "the skew ring over {} is not nearly epsilon-strongly graded",
            a.describe()
        )));
    }
    Ok(grading)
}

/// The skew ring behind a grading built by `build_skew_ring`.
pub fn skew_arith(s: &Grading) -> Option<&SkewRing> {
    s.ring().downcast::<SkewRing>()
}

// ---------------------------------------------------------------- groupoid rings

/// The global action realizing `R[G]`: `A = ⊕_e R`, `A_g = A_{r(g)}` and `σ_g`
/// copying the `s(g)` coordinate to the `r(g)` coordinate.
pub fn groupoid_ring_action(r: &FiniteRing, g: &FiniteGroupoid) -> Result<PartialAction> {
    let labels: Vec<String> = g.object_ids().map(|e| g.object_label(e).to_string()).collect();
    let ambient = direct_sum(&vec![r.clone(); labels.len()], Some(labels))?;
    let ds = ambient.downcast::<DirectSumRing>().expect("direct sum");
    let summands: Vec<AdditiveSubgroup> = g
        .object_ids()
        .map(|e| AdditiveSubgroup::closure(&ambient, r.additive_generators().iter().map(|&y| ds.inject(e.0, y))))
        .collect();
    let ideals = g.morphism_ids().map(|m| summands[g.rng(m).0].clone()).collect();
    PartialAction::new(g, &ambient, ideals, |m, x| ds.inject(g.rng(m).0, ds.project(x, g.src(m).0)))
}

/// `R[G]` with its natural grading, via the induced global action.
pub fn build_groupoid_ring(r: &FiniteRing, g: &FiniteGroupoid, bound: usize) -> Result<Grading> {
    let size = (0..g.num_morphisms()).try_fold(1usize, |acc, _| acc.checked_mul(r.size()));
    match size {
        Some(s) if s <= bound => {}
        _ => return Err(Error::bound("groupoid ring", size.unwrap_or(usize::MAX), bound)),
    }
    build_skew_ring(&groupoid_ring_action(r, g)?, bound)
}

// ---------------------------------------------------------------- ψ

/// Checks of the map `ψ: A → ⊕_e A_eδ_e`.
#[derive(Clone, Debug, Serialize)]
pub struct PsiReport {
    pub holds: bool,
    pub failure: Option<String>,
    pub action_g_prime: PrimeVerdict,
    pub principal_g_prime: PrimeVerdict,
}

/// `ψ(Σ_e a_e) = Σ_e a_eδ_e` inside a skew ring built from `action`.
pub fn psi(action: &PartialAction, skew: &SkewRing, x: Elem) -> Elem {
    let gr = &action.groupoid;
    let cs: Vec<Elem> = gr
        .morphism_ids()
        .map(|g| {
            if gr.is_identity(g) {
                let e = gr.src(g);
                action.from_part(e, action.to_part(e, x))
            } else {
                0
            }
        })
        .collect();
    skew.encode(&cs)
}

/// Verifies that `ψ` is a ring isomorphism onto the principal part, that it
/// carries `G`-invariant closures to `G`-invariant closures (for ambient rings
/// within `bounds.enumeration`), and that both `G`-primeness notions agree.
pub fn psi_check(action: &PartialAction, bounds: &Bounds) -> Result<PsiReport> {
    let s = build_skew_ring(action, bounds.ring)?;
    let skew = skew_arith(&s).expect("skew ring");
    let a = &action.ambient;
    let ring = s.ring();
    let principal = s.principal_part();
    let mut failure = None;
    let images: Vec<Elem> = a.elements().map(|x| psi(action, skew, x)).collect();
    let mut seen = vec![false; ring.size()];
    for (x, &y) in images.iter().enumerate() {
        if !principal.contains(y) {
            failure = Some(format!("ψ({}) is not in the principal part", a.render(x)));
            break;
        }
        if std::mem::replace(&mut seen[y], true) {
            failure = Some(format!("ψ is not injective at {}", a.render(x)));
            break;
        }
    }
    if failure.is_none() && principal.len() != a.size() {
        failure = Some("ψ is not onto the principal part".into());
    }
    let gens = a.additive_generators();
    if failure.is_none() {
        'outer: for x in a.elements() {
            for &u in gens {
                if images[a.add(x, u)] != ring.add(images[x], images[u]) {
                    failure = Some(format!("ψ is not additive at {}, {}", a.render(x), a.render(u)));
                    break 'outer;
                }
            }
        }
    }
    if failure.is_none() {
        'outer: for &u in gens {
            for &v in gens {
                if images[a.mul(u, v)] != ring.mul(images[u], images[v]) {
                    failure = Some(format!("ψ is not multiplicative at {}, {}", a.render(u), a.render(v)));
                    break 'outer;
                }
            }
        }
    }
    if failure.is_none() && a.size() <= bounds.enumeration {
        for x in a.elements() {
            let j = action.invariant_closure(&[x]);
            let image = AdditiveSubgroup::closure(ring, j.generators().iter().map(|&y| images[y]));
            if image != s.invariant_closure(&[images[x]])? {
                failure = Some(format!(
                    "ψ does not carry the invariant closure of {} to an invariant closure",
                    a.render(x)
                ));
                break;
            }
        }
    }
    let action_g_prime = action.is_a_g_prime(bounds.ring)?;
    let principal_g_prime = s.is_g_prime_principal(bounds.ring)?;
    if failure.is_none() && action_g_prime.prime != principal_g_prime.prime {
        failure = Some("A is G-prime on one side of ψ only".into());
    }
    Ok(PsiReport {
        holds: failure.is_none(),
        failure,
        action_g_prime,
        principal_g_prime,
    })
}

// ---------------------------------------------------------------- group-type chain

/// The four statements of the group-type lemma at one object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub object: Obj,
    /// (i): a group-type family anchored at the object.
    pub group_type: bool,
    /// (ii): every nonzero `a_g` lies in some `A_{k^-1}` with `k: r(g) → e`.
    pub coefficient_membership: bool,
    /// (iii): `A_{k^-1} a_g ≠ 0` for some such `k`.
    pub nonzero_annihilation: bool,
    /// (iv): the object is a support-hub of the skew ring.
    pub support_hub: bool,
}

/// Evaluates the lemma's statements at `e ∈ G_0'` and checks
/// (i) ⇒ (ii) ⇒ (iii) ⇔ (iv).
pub fn group_type_chain(action: &PartialAction, e: Obj, bound: usize) -> Result<ChainReport> {
    let gr = &action.groupoid;
    let a = &action.ambient;
    gr.check_object(e)?;
    if action.object_ideal(e).is_zero() {
        return Err(Error::ObjectNotInG0Prime(gr.object_label(e).to_string()));
    }
    let group_type = gr.is_connected() && action.group_type_family(e).is_some();
    let arrows = |g: Morph| gr.hom(gr.rng(g), e).collect::<Vec<_>>();
    let mut membership = true;
    let mut annihilation = true;
    for g in gr.morphism_ids() {
        let ks = arrows(g);
        for &x in action.ideal(g).elements() {
            if x == 0 {
                continue;
            }
            membership &= ks.iter().any(|&k| action.ideal(gr.inv(k)).contains(x));
            annihilation &= ks
                .iter()
                .any(|&k| action.ideal(gr.inv(k)).generators().iter().any(|&u| a.mul(u, x) != 0));
        }
    }
    let s = build_skew_ring(action, bound)?;
    let report = ChainReport {
        object: e,
        group_type,
        coefficient_membership: membership,
        nonzero_annihilation: annihilation,
        support_hub: s.is_support_hub(e)?.hub,
    };
    let broken = (report.group_type && !report.coefficient_membership)
        || (report.coefficient_membership && !report.nonzero_annihilation)
        || (report.nonzero_annihilation != report.support_hub);
    if broken {
        return Err(Error::ChainViolation(format!("{report:?}")));
    }
    Ok(report)
}

// ---------------------------------------------------------------- groupoid ring criteria

/// The three conditions of the groupoid-ring primeness criterion.
#[derive(Clone, Debug, Serialize)]
pub struct ConnellReport {
    pub holds: bool,
    pub connected: bool,
    pub ring_prime: PrimeVerdict,
    /// Per object: a nontrivial finite normal subgroup of the isotropy group,
    /// by element labels, if one exists.
    pub normal_subgroups: Vec<(String, Option<Vec<String>>)>,
    pub reasons: Vec<String>,
}

/// `G` connected, `R` prime and no isotropy group with a nontrivial finite
/// normal subgroup.
pub fn connell_check(r: &FiniteRing, g: &FiniteGroupoid, bounds: &Bounds) -> Result<ConnellReport> {
    if r.is_zero_ring() {
        return Err(Error::Degenerate("the coefficient ring is zero".into()));
    }
    let mut reasons = Vec::new();
    let connected = g.is_connected();
    if !connected {
        reasons.push("the groupoid is not connected".to_string());
    }
    let ring_prime = is_prime_bruteforce(r, bounds.ring)?;
    if !ring_prime.prime {
        reasons.push(format!("{} is not prime", r.describe()));
    }
    let mut normal_subgroups = Vec::new();
    for e in g.object_ids() {
        let group = g.isotropy(e)?;
        let n = group
            .nontrivial_finite_normal_subgroup(bounds.group)?
            .map(|sub| sub.elements.iter().map(|&k| group.label(k).to_string()).collect::<Vec<_>>());
        if let Some(labels) = &n {
            reasons.push(format!(
                "the isotropy group at {} has the nontrivial normal subgroup {{{}}}",
                g.object_label(e),
                labels.join(", ")
            ));
        }
        normal_subgroups.push((g.object_label(e).to_string(), n));
    }
    Ok(ConnellReport {
        holds: reasons.is_empty(),
        connected,
        ring_prime,
        normal_subgroups,
        reasons,
    })
}

/// Whether an object set is `R`-dense, with the first nonzero element of
/// `R[G]` that has no coefficient sourced in the set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub dense: bool,
    pub witness: Option<String>,
}

/// Every nonzero element of `R[G]` has a nonzero coefficient at some `g` with
/// `s(g) ∈ X`. Decided by scanning all of `R[G]`.
pub fn r_dense(g: &FiniteGroupoid, r: &FiniteRing, x: &[Obj], bound: usize) -> Result<DensityReport> {
    let s = build_groupoid_ring(r, g, bound)?;
    for y in 1..s.ring().size() {
        if s.support(y).iter().all(|&m| !x.contains(&g.src(m))) {
            return Ok(DensityReport {
                dense: false,
                witness: Some(s.ring().render(y)),
            });
        }
    }
    Ok(DensityReport {
        dense: true,
        witness: None,
    })
}

/// Is the orbit `O_e = {r(g) : s(g) = e}` `R`-dense?
pub fn orbit_density_check(g: &FiniteGroupoid, r: &FiniteRing, e: Obj, bound: usize) -> Result<DensityReport> {
    r_dense(g, r, &g.orbit(e)?, bound)
}

// ---------------------------------------------------------------- theorem paths

/// Isotropy facts for one object of `G_0'`.
#[derive(Clone, Debug, Serialize)]
pub struct IsotropyVerdict {
    pub object: Obj,
    pub label: String,
    pub ring_size: usize,
    /// Oracle verdict on `A_e ⋊ G_e^e`; `None` above the bound.
    pub prime: Option<PrimeVerdict>,
    /// `A_e` is `G_e^e`-prime.
    pub a_e_g_prime: Option<PrimeVerdict>,
}

fn over_bound_is_none<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BoundExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn isotropy_verdicts(action: &PartialAction, bounds: &Bounds) -> Result<Vec<IsotropyVerdict>> {
    let mut out = Vec::new();
    for e in action.support_objects() {
        let local = action.restrict_to_isotropy(e)?;
        let size = local.skew_size().unwrap_or(usize::MAX);
        let prime = match over_bound_is_none(build_skew_ring(&local, bounds.ring))? {
            Some(t) => Some(is_prime_bruteforce(t.ring(), bounds.ring)?),
            None => None,
        };
        out.push(IsotropyVerdict {
            object: e,
            label: action.groupoid.object_label(e).to_string(),
            ring_size: size,
            prime,
            a_e_g_prime: over_bound_is_none(local.is_a_g_prime(bounds.ring))?,
        });
    }
    Ok(out)
}

/// For group-type actions the skew ring is prime exactly when some isotropy
/// skew group ring is. Works without materializing the whole skew ring.
#[derive(Clone, Debug, Serialize)]
pub struct GroupTypeVerdict {
    pub group_type: GroupTypeReport,
    pub isotropy: Vec<IsotropyVerdict>,
    /// `None` unless the action is of group type and the isotropy verdicts are known.
    pub verdict: Option<bool>,
    /// Oracle on the whole skew ring, when within the bound.
    pub oracle: Option<PrimeVerdict>,
}

pub fn group_type_theorem(action: &PartialAction, bounds: &Bounds) -> Result<GroupTypeVerdict> {
    let group_type = action.group_type();
    let isotropy = isotropy_verdicts(action, bounds)?;
    let verdict = if group_type.holds {
        let mut unknown = false;
        let mut any = false;
        for v in &isotropy {
            match &v.prime {
                Some(p) => any |= p.prime,
                None => unknown = true,
            }
        }
        (any || !unknown).then_some(any)
    } else {
        None
    };
    let oracle = match over_bound_is_none(build_skew_ring(action, bounds.ring))? {
        Some(s) => over_bound_is_none(is_prime_bruteforce(s.ring(), bounds.ring))?,
        None => None,
    };
    if let (Some(v), Some(o)) = (verdict, &oracle) {
        if v != o.prime {
            return Err(Error::InternalDisagreement(format!(
                "group-type action: isotropy verdict {v} but the oracle says {}",
                o.prime
            )));
        }
    }
    Ok(GroupTypeVerdict {
        group_type,
        isotropy,
        verdict,
        oracle,
    })
}

/// Support facts of a global action, computed independently and compared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalReport {
    pub support_connected: bool,
    pub every_hub: bool,
    pub some_hub: bool,
    pub group_type: bool,
    pub prime: bool,
    pub some_isotropy_prime: bool,
}

/// For a global action: `G'` connected ⟺ every object of `G_0'` is a
/// support-hub ⟺ some object is; a connected groupoid gives a group-type
/// action; and, for group-type actions, the skew ring is prime exactly when
/// some isotropy skew group ring is.
pub fn global_action_check(action: &PartialAction, bounds: &Bounds) -> Result<GlobalReport> {
    if !action.is_global() {
        return Err(Error::MalformedInput("the action is not global".into()));
    }
    let s = build_skew_ring(action, bounds.ring)?;
    let support = s.support_groupoid();
    let mut hubs = Vec::new();
    for &e in &support.objects {
        hubs.push(s.is_support_hub(e)?.hub);
    }
    let isotropy = isotropy_verdicts(action, bounds)?;
    let mut some_isotropy_prime = false;
    for v in &isotropy {
        let p = v
            .prime
            .as_ref()
            .ok_or_else(|| Error::bound("isotropy skew group ring", v.ring_size, bounds.ring))?;
        some_isotropy_prime |= p.prime;
    }
    let report = GlobalReport {
        support_connected: support.connected,
        every_hub: hubs.iter().all(|&h| h),
        some_hub: hubs.iter().any(|&h| h),
        group_type: action.is_group_type(),
        prime: is_prime_bruteforce(s.ring(), bounds.ring)?.prime,
        some_isotropy_prime,
    };
    if report.support_connected != report.every_hub || report.every_hub != report.some_hub {
        return Err(Error::ChainViolation(format!(
            "global action: G' connected = {}, every hub = {}, some hub = {}",
            report.support_connected, report.every_hub, report.some_hub
        )));
    }
    if action.groupoid.is_connected() && !report.group_type {
        return Err(Error::ChainViolation("a global action of a connected groupoid is not of group type".into()));
    }
    if report.group_type && report.prime != report.some_isotropy_prime {
        return Err(Error::InternalDisagreement(format!(
            "group-type action: skew ring prime = {} but some isotropy prime = {}",
            report.prime, report.some_isotropy_prime
        )));
    }
    Ok(report)
}

// ---------------------------------------------------------------- sufficient conditions

/// The corollary's three conditions at one object of `G_0'`.
#[derive(Clone, Debug, Serialize)]
pub struct ObjectSufficiency {
    pub object: Obj,
    pub label: String,
    /// No subgroup of `G_e^e` contains a nontrivial finite normal subgroup.
    pub no_finite_normal: bool,
    pub part_prime: Option<bool>,
    pub intersection_property: Option<bool>,
    pub isotropy_g_prime: Option<bool>,
    pub maximal_commutative: Option<bool>,
    pub condition_i: Option<bool>,
    pub condition_ii: Option<bool>,
    pub condition_iii: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SufficientReport {
    pub group_type: bool,
    pub a_g_prime: Option<bool>,
    pub commutative: bool,
    pub objects: Vec<ObjectSufficiency>,
    /// Group-type or `A` `G`-prime, and some condition holds at some object.
    pub implies_prime: bool,
    pub oracle: Option<bool>,
}

fn and3(xs: &[Option<bool>]) -> Option<bool> {
    if xs.contains(&Some(false)) {
        Some(false)
    } else if xs.contains(&None) {
        None
    } else {
        Some(true)
    }
}

/// Does every nonzero ideal of the skew ring meet `⊕_e A_eδ_e`? Every nonzero
/// ideal contains a nonzero principal one, so principal ideals decide it.
pub fn has_intersection_property(s: &Grading) -> Result<Option<Elem>> {
    let ring = s.ring();
    let principal = s.principal_part();
    let op = Closure::ideal(ring);
    let mut hits = vec![false; ring.size()];
    for x in 1..ring.size() {
        if principal.contains(x) {
            hits[x] = true;
            continue;
        }
        let (_, hit) = op.run_until(ring, [x], |new| {
            new.iter().any(|&y| y != 0 && (hits[y] || principal.contains(y)))
        });
        if !hit {
            return Ok(Some(x));
        }
        hits[x] = true;
    }
    Ok(None)
}

pub fn sufficient_conditions_report(action: &PartialAction, bounds: &Bounds) -> Result<SufficientReport> {
    let gr = &action.groupoid;
    let group_type = action.is_group_type();
    let a_g_prime = over_bound_is_none(action.is_a_g_prime(bounds.ring))?.map(|v| v.prime);
    let commutative = action.ambient.is_commutative();
    let mut objects = Vec::new();
    for e in action.support_objects() {
        let group = gr.isotropy(e)?;
        let no_finite_normal = group.subgroups(bounds.group)?.iter().all(|h| h.order() == 1);
        let part_prime =
            over_bound_is_none(is_prime_bruteforce(action.part_ring(e), bounds.ring))?.map(|v| v.prime);
        let local = action.restrict_to_isotropy(e)?;
        let isotropy_g_prime = over_bound_is_none(local.is_a_g_prime(bounds.ring))?.map(|v| v.prime);
        let (intersection_property, maximal_commutative) =
            match over_bound_is_none(build_skew_ring(&local, bounds.ring))? {
                Some(t) => {
                    let id = t.groupoid().identity(Obj(0));
                    (
                        Some(has_intersection_property(&t)?.is_none()),
                        Some(is_maximal_commutative(t.ring(), t.component(id))?),
                    )
                }
                None => (None, None),
            };
        objects.push(ObjectSufficiency {
            object: e,
            label: gr.object_label(e).to_string(),
            no_finite_normal,
            part_prime,
            intersection_property,
            isotropy_g_prime,
            maximal_commutative,
            condition_i: and3(&[Some(no_finite_normal), part_prime]),
            condition_ii: and3(&[intersection_property, isotropy_g_prime]),
            condition_iii: and3(&[Some(commutative), maximal_commutative, isotropy_g_prime]),
        });
    }
    let premise = group_type || a_g_prime == Some(true);
    let some = objects.iter().any(|o| {
        [o.condition_i, o.condition_ii, o.condition_iii].contains(&Some(true))
    });
    let oracle = match over_bound_is_none(build_skew_ring(action, bounds.ring))? {
        Some(s) => over_bound_is_none(is_prime_bruteforce(s.ring(), bounds.ring))?.map(|v| v.prime),
        None => None,
    };
    let implies_prime = premise && some;
    if implies_prime && oracle == Some(false) {
        return Err(Error::InternalDisagreement(
            "a sufficient condition holds but the skew ring is not prime".into(),
        ));
    }
    Ok(SufficientReport {
        group_type,
        a_g_prime,
        commutative,
        objects,
        implies_prime,
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{named, FiniteGroup};
    use crate::ring::{galois, parse_ring};

    fn f2() -> FiniteRing {
        parse_ring("F2").unwrap()
    }

    fn ambient_ef(r: &FiniteRing) -> FiniteRing {
        direct_sum(&[r.clone(), r.clone()], Some(vec!["e".into(), "f".into()])).unwrap()
    }

    fn raw(g: FiniteGroupoid, a: FiniteRing) -> RawPartialAction {
        RawPartialAction {
            groupoid: g,
            ambient: a,
            ideals: BTreeMap::new(),
            maps: BTreeMap::new(),
        }
    }

    /// P2 on F2 ⊕ F2 with A_g = A_{g^-1} = 0.
    pub(crate) fn zero_ag() -> PartialAction {
        let mut r = raw(named::p2(), ambient_ef(&f2()));
        r.ideals.insert("g".into(), vec![]);
        r.ideals.insert("g^-1".into(), vec![]);
        r.maps.insert("g".into(), RawMap::Identity);
        validate_partial_action(&r).unwrap()
    }

    /// P2 on F2 ⊕ F2, σ_g swapping the coordinates.
    pub(crate) fn flip() -> PartialAction {
        let mut r = raw(named::p2(), ambient_ef(&f2()));
        r.maps.insert(
            "g".into(),
            RawMap::Table(vec![("at(f, 1)".into(), "at(e, 1)".into())]),
        );
        validate_partial_action(&r).unwrap()
    }

    fn gf4_frobenius() -> PartialAction {
        let k = galois(4).unwrap();
        let pair = direct_sum(&[k.clone(), k.clone()], None).unwrap();
        let a = direct_sum(&[pair.clone(), pair], Some(vec!["e".into(), "f".into()])).unwrap();
        let mut r = raw(named::g8(), a);
        let e1 = |c: &str| format!("at(e, at(1, {c}))");
        let e2 = |c: &str| format!("at(e, at(2, {c}))");
        let e3 = |c: &str| format!("at(f, at(1, {c}))");
        let e4 = |c: &str| format!("at(f, at(2, {c}))");
        for (m, gens) in [
            ("g", vec![e1("1")]),
            ("m^-1", vec![e1("1")]),
            ("m", vec![e3("1")]),
            ("h", vec![e3("1")]),
        ] {
            r.ideals.insert(m.into(), gens);
        }
        let conj = |from: &dyn Fn(&str) -> String, to: &dyn Fn(&str) -> String| {
            RawMap::Additive(vec![(from("1"), to("1")), (from("x"), to("x + 1"))])
        };
        r.maps.insert("g".into(), conj(&e1, &e1));
        r.maps.insert("h".into(), conj(&e3, &e3));
        r.maps.insert("m".into(), conj(&e1, &e3));
        r.maps.insert(
            "l".into(),
            RawMap::Additive(vec![
                (e1("1"), e3("1")),
                (e1("x"), e3("x")),
                (e2("1"), e4("1")),
                (e2("x"), e4("x")),
            ]),
        );
        validate_partial_action(&r).unwrap()
    }

    #[test]
    fn zero_ag_example() {
        let s = zero_ag();
        assert!(!s.is_global());
        assert!(!s.is_group_type());
        let sk = build_skew_ring(&s, 4096).unwrap();
        assert_eq!(sk.ring().size(), 4);
        assert!(!sk.is_graded_prime(4096).unwrap().prime);
        let v = s.is_a_g_prime(4096).unwrap();
        assert!(!v.prime);
        let a = s.ambient();
        let i = ideal_generated(a, [a.parse_element("at(e, 1)").unwrap()]);
        let j = ideal_generated(a, [a.parse_element("at(f, 1)").unwrap()]);
        assert!(s.is_sigma_invariant(&i, None) && s.is_sigma_invariant(&j, None));
        assert!(i.annihilates(&j));
        assert!(psi_check(&s, &Bounds::default()).unwrap().holds);
        let e = s.groupoid().object_by_label("e").unwrap();
        let c = group_type_chain(&s, e, 4096).unwrap();
        assert_eq!(
            (c.group_type, c.coefficient_membership, c.nonzero_annihilation, c.support_hub),
            (false, false, false, false)
        );
        let suff = sufficient_conditions_report(&s, &Bounds::default()).unwrap();
        assert!(!suff.implies_prime);
        assert!(suff.objects.iter().all(|o| o.condition_i == Some(true)));
        assert_eq!(suff.oracle, Some(false));
    }

    #[test]
    fn flip_example() {
        let s = flip();
        assert!(s.is_global());
        let gt = s.group_type();
        assert!(gt.holds);
        let g = s.groupoid().morphism_by_label("g").unwrap();
        let ginv = s.groupoid().inv(g);
        assert_eq!(gt.family, vec![(Obj(0), Morph(0)), (Obj(1), ginv)]);
        let sk = build_skew_ring(&s, 4096).unwrap();
        assert_eq!(sk.ring().size(), 16);
        assert!(is_prime_bruteforce(sk.ring(), 4096).unwrap().prime);
        assert!(s.is_a_g_prime(4096).unwrap().prime);
        assert!(psi_check(&s, &Bounds::default()).unwrap().holds);
        for e in s.groupoid().object_ids() {
            let c = group_type_chain(&s, e, 4096).unwrap();
            assert!(c.group_type && c.coefficient_membership && c.nonzero_annihilation && c.support_hub);
        }
        let r = global_action_check(&s, &Bounds::default()).unwrap();
        assert!(r.support_connected && r.prime && r.some_isotropy_prime);
        let suff = sufficient_conditions_report(&s, &Bounds::default()).unwrap();
        assert!(suff.implies_prime && suff.oracle == Some(true));
    }

    #[test]
    fn non_additive_table_rejected() {
        let mut r = raw(FiniteGroupoid::from_group(&FiniteGroup::cyclic(2), "e"), parse_ring("sum(F2, F2)").unwrap());
        r.maps.insert(
            "a".into(),
            RawMap::Table(vec![
                ("at(1, 1)".into(), "at(2, 1)".into()),
                ("at(2, 1)".into(), "at(1, 1)".into()),
                ("at(1, 1) + at(2, 1)".into(), "at(1, 1)".into()),
            ]),
        );
        match validate_partial_action(&r) {
            Err(Error::AxiomViolation { axiom, .. }) => assert_eq!(axiom, "i"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sigma_e_must_be_identity() {
        let mut r = raw(FiniteGroupoid::from_group(&FiniteGroup::trivial(), "e"), parse_ring("sum(F2, F2)").unwrap());
        r.maps.insert(
            "e".into(),
            RawMap::Table(vec![
                ("at(1, 1)".into(), "at(2, 1)".into()),
                ("at(2, 1)".into(), "at(1, 1)".into()),
                ("at(1, 1) + at(2, 1)".into(), "at(1, 1) + at(2, 1)".into()),
            ]),
        );
        match validate_partial_action(&r) {
            Err(Error::AxiomViolation { axiom, .. }) => assert_eq!(axiom, "ii"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ambient_must_split_by_object() {
        let r = raw(named::p2(), f2());
        assert!(matches!(
            validate_partial_action(&r),
            Err(Error::AxiomViolation { ref axiom, .. }) if axiom == "direct sum"
        ));
    }

    #[test]
    fn one_object_partial_group_action() {
        // C2 on F2 ⊕ F2 with A_a = F2 ⊕ 0 and σ_a the identity there.
        let mut r = raw(FiniteGroupoid::from_group(&FiniteGroup::cyclic(2), "e"), parse_ring("sum(F2, F2)").unwrap());
        r.ideals.insert("a".into(), vec!["at(1, 1)".into()]);
        r.maps.insert("a".into(), RawMap::Identity);
        let s = validate_partial_action(&r).unwrap();
        assert!(!s.is_global());
        let gt = s.group_type();
        assert!(gt.holds);
        assert_eq!(gt.family, vec![(Obj(0), Morph(0))]);
        let c = group_type_chain(&s, Obj(0), 4096).unwrap();
        assert!(c.support_hub);
        assert_eq!(build_skew_ring(&s, 4096).unwrap().ring().size(), 8);
    }

    #[test]
    fn trivial_action_on_f2() {
        let g = FiniteGroupoid::from_group(&FiniteGroup::trivial(), "e");
        let s = validate_partial_action(&raw(g, f2())).unwrap();
        let sk = build_skew_ring(&s, 4096).unwrap();
        assert_eq!(sk.ring().size(), 2);
        assert!(psi_check(&s, &Bounds::default()).unwrap().holds);
        let suff = sufficient_conditions_report(&s, &Bounds::default()).unwrap();
        let o = &suff.objects[0];
        assert_eq!((o.condition_i, o.condition_ii, o.condition_iii), (Some(true), Some(true), Some(true)));
    }

    #[test]
    fn skew_ring_bound() {
        let s = gf4_frobenius();
        assert_eq!(s.skew_size(), Some(16usize.pow(4) * 4usize.pow(4)));
        assert!(matches!(build_skew_ring(&s, 4096), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn gf4_frobenius_example() {
        let s = gf4_frobenius();
        assert!(!s.is_global());
        assert!(s.is_group_type());
        let e = s.groupoid().object_by_label("e").unwrap();
        let local = s.restrict_to_isotropy(e).unwrap();
        assert_eq!(local.ambient().size(), 16);
        let v = local.is_a_g_prime(4096).unwrap();
        assert!(!v.prime);
        let a = local.ambient();
        let i = ideal_generated(a, [a.parse_element("at(1, 1)").unwrap()]);
        let j = ideal_generated(a, [a.parse_element("at(2, 1)").unwrap()]);
        assert!(local.is_sigma_invariant(&i, None) && local.is_sigma_invariant(&j, None));
        assert!(i.annihilates(&j));
        let t = group_type_theorem(&s, &Bounds::default()).unwrap();
        assert_eq!(t.verdict, Some(false));
        assert!(t.oracle.is_none());
        assert!(t.isotropy.iter().all(|v| v.ring_size == 64));
    }

    #[test]
    fn restriction_matches_isotropy_component() {
        let s = flip();
        let sk = build_skew_ring(&s, 4096).unwrap();
        for e in s.support_objects() {
            let local = build_skew_ring(&s.restrict_to_isotropy(e).unwrap(), 4096).unwrap();
            let comp = sk.isotropy_component(e).unwrap();
            assert_eq!(local.ring().size(), comp.ring().size());
            assert_eq!(
                is_prime_bruteforce(local.ring(), 4096).unwrap().prime,
                is_prime_bruteforce(comp.ring(), 4096).unwrap().prime
            );
        }
    }

    #[test]
    fn groupoid_ring_products() {
        let g = named::p2();
        let r = parse_ring("Z(4)").unwrap();
        let s = build_groupoid_ring(&r, &g, 4096).unwrap();
        let ring = s.ring();
        let skew = skew_arith(&s).unwrap();
        let act = groupoid_ring_action(&r, &g).unwrap();
        // (aδ_x)(bδ_y) = abδ_{xy} for composable x, y and 0 otherwise
        for x in g.morphism_ids() {
            for y in g.morphism_ids() {
                for a in 1..4 {
                    for b in 1..4 {
                        let ax = skew.delta(x, act.from_part(g.rng(x), a)).unwrap();
                        let by = skew.delta(y, act.from_part(g.rng(y), b)).unwrap();
                        let expected = match g.compose(x, y) {
                            Some(xy) => skew.delta(xy, act.from_part(g.rng(xy), (a * b) % 4)).unwrap(),
                            None => 0,
                        };
                        assert_eq!(ring.mul(ax, by), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn group_ring_of_c2_has_square_zero_element() {
        let g = named::group(&FiniteGroup::cyclic(2));
        let s = build_groupoid_ring(&f2(), &g, 4096).unwrap();
        let ring = s.ring();
        assert_eq!(ring.size(), 4);
        let x = ring.parse_element("delta(e, at(e, 1)) + delta(a, at(e, 1))").unwrap();
        assert_ne!(x, 0);
        assert_eq!(ring.mul(x, x), 0);
        assert_eq!(build_groupoid_ring(&f2(), &FiniteGroupoid::from_group(&FiniteGroup::trivial(), "e"), 4096)
            .unwrap()
            .ring()
            .size(), 2);
    }

    #[test]
    fn skew_render_round_trips() {
        let s = build_skew_ring(&flip(), 4096).unwrap();
        let ring = s.ring();
        for x in ring.elements() {
            assert_eq!(ring.parse_element(&ring.render(x)).unwrap(), x);
        }
        assert_eq!(ring.one().map(|u| ring.render(u)).as_deref(), Some("delta(e, at(e, 1)) + delta(f, at(f, 1))"));
    }

    #[test]
    fn connell_examples() {
        let b = Bounds::default();
        assert!(connell_check(&f2(), &named::p2(), &b).unwrap().holds);
        let c2 = connell_check(&f2(), &named::group(&FiniteGroup::cyclic(2)), &b).unwrap();
        assert!(!c2.holds && c2.connected && c2.ring_prime.prime);
        let d = connell_check(&f2(), &named::two_points(), &b).unwrap();
        assert!(!d.connected && !d.holds);
    }

    #[test]
    fn density_examples() {
        let p3 = named::p3();
        let all: Vec<Obj> = p3.object_ids().collect();
        assert!(r_dense(&p3, &f2(), &all, 4096).unwrap().dense);
        let f1 = p3.object_by_label("f1").unwrap();
        assert!(orbit_density_check(&p3, &f2(), f1, 4096).unwrap().dense);
        let two = named::two_points();
        let e = two.object_by_label("e").unwrap();
        let d = r_dense(&two, &f2(), &[e], 4096).unwrap();
        assert!(!d.dense);
        assert_eq!(d.witness.as_deref(), Some("delta(f, at(f, 1))"));
    }
}
