//! Groupoid gradings `S = ⊕_g S_g` of finite rings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, Morph, Obj, Subgroupoid};
use crate::ring::{
    enumerate_closed, is_s_unital, set_product, subring, AdditiveSubgroup, Closure, Elem,
    FiniteRing, IdealList, PrimeVerdict, SubringArith,
};

/// Largest `|S|·|G|` for which the homogeneous decomposition table is built.
pub const DECOMPOSITION_LIMIT: usize = 1 << 24;

/// A validated grading. Immutable; lazily caches derived data.
#[derive(Clone)]
pub struct Grading {
    groupoid: FiniteGroupoid,
    ring: FiniteRing,
    components: Vec<AdditiveSubgroup>,
    /// `parts[x·|G| + g]` is the degree-`g` part of `x`.
    parts: Vec<u32>,
    /// Degree of each nonzero homogeneous element, `u32::MAX` otherwise.
    degree: Vec<u32>,
    nes: OnceLock<NesReport>,
}

impl fmt::Debug for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grading")
            .field("ring", &self.ring)
            .field("groupoid", &self.groupoid)
            .finish()
    }
}

/// An element split into its homogeneous parts; only nonzero parts are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedElement {
    pub parts: BTreeMap<Morph, Elem>,
}

impl GradedElement {
    pub fn support(&self) -> Vec<Morph> {
        self.parts.keys().copied().collect()
    }
}

/// Both characterizations of nearly-epsilon-strong gradings.
#[derive(Clone, Debug, Serialize)]
pub struct NesReport {
    pub holds: bool,
    /// `S_g S_{g^-1}` s-unital and `S_g S_{g^-1} S_g = S_g` for every `g`.
    pub by_definition: bool,
    /// Local units `ε_g(d) d = d = d ε'_g(d)` exist for every homogeneous `d`.
    pub by_local_units: bool,
    /// First morphism where the definition fails, with the reason.
    pub failure: Option<(Morph, String)>,
    /// `(g, d, ε_g(d), ε'_g(d))` for every nonzero `d ∈ S_g` when the criterion holds.
    pub certificate: Vec<(Morph, Elem, Elem, Elem)>,
}

/// The support subgroupoid `G'` and its objects `G_0'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportGroupoid {
    pub morphisms: Vec<Morph>,
    pub objects: Vec<Obj>,
    pub connected: bool,
    /// `S = ⊕_{g ∈ G'} S_g`, i.e. `S_g = {0}` off `G'`.
    pub carries_ring: bool,
}

/// Outcome of a support-hub test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HubReport {
    pub object: Obj,
    pub hub: bool,
    /// First nonzero homogeneous `a_g` that finds no partner component.
    pub blocking: Option<(Morph, Elem)>,
}

/// Finds, for each nonzero `d ∈ S_g`, a local unit in `units` acting on the
/// given side. Units found before are tried first.
fn local_units(
    ring: &FiniteRing,
    comp: &AdditiveSubgroup,
    units: &AdditiveSubgroup,
    left: bool,
) -> Option<Vec<(Elem, Elem)>> {
    let cands = units.sorted();
    let mut recent = Vec::new();
    let mut out = Vec::with_capacity(comp.len());
    for d in comp.sorted().into_iter().skip(1) {
        let ok = |e: Elem| {
            if left {
                ring.mul(e, d) == d
            } else {
                ring.mul(d, e) == d
            }
        };
        let e = crate::ring::find_unit(&mut recent, &cands, ok)?;
        out.push((d, e));
    }
    Some(out)
}

impl Grading {
    /// Builds a grading from generator sets indexed by morphism, checking
    /// directness and both grading axioms.
    pub fn new(groupoid: &FiniteGroupoid, ring: &FiniteRing, generators: &[Vec<Elem>]) -> Result<Self> {
        let g = Self::new_allow_zero(groupoid, ring, generators)?;
        if g.ring.is_zero_ring() {
            return Err(Error::Degenerate("every component is {0}".into()));
        }
        Ok(g)
    }

    /// As `new`, but accepts the zero ring (used for isotropy components).
    pub(crate) fn new_allow_zero(
        groupoid: &FiniteGroupoid,
        ring: &FiniteRing,
        generators: &[Vec<Elem>],
    ) -> Result<Self> {
        let ng = groupoid.num_morphisms();
        if generators.len() != ng {
            return Err(Error::MalformedInput(format!(
                "{} component generator sets for {} morphisms",
                generators.len(),
                ng
            )));
        }
        for gens in generators {
            if let Some(&x) = gens.iter().find(|&&x| x >= ring.size()) {
                return Err(Error::MalformedInput(format!("element #{x} is not in the ring")));
            }
        }
        let cells = ring.size().saturating_mul(ng);
        if cells > DECOMPOSITION_LIMIT {
            return Err(Error::bound("grading decomposition table", cells, DECOMPOSITION_LIMIT));
        }
        let components: Vec<AdditiveSubgroup> = generators
            .iter()
            .map(|gens| AdditiveSubgroup::closure(ring, gens.iter().copied()))
            .collect();

        // Directness: extend the accumulated sum one component at a time; a
        // collision means a nonzero element of the intersection.
        let n = ring.size();
        let mut parts = vec![u32::MAX; n * ng];
        for k in 0..ng {
            parts[k] = 0;
        }
        let mut covered = vec![0usize];
        for (k, comp) in components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let mut next = Vec::with_capacity(covered.len() * comp.len());
            for &t in &covered {
                for &s in comp.elements() {
                    let y = ring.add(t, s);
                    if s != 0 && parts[y * ng] != u32::MAX {
                        return Err(Error::NotDirectSum(format!(
                            "S_{} meets the sum of the earlier components",
                            groupoid.morphism_label(Morph(k))
                        )));
                    }
                    if s != 0 {
                        for j in 0..ng {
                            parts[y * ng + j] = parts[t * ng + j];
                        }
                        parts[y * ng + k] = s as u32;
                    }
                    next.push(y);
                }
            }
            covered = next;
        }
        if covered.len() != n {
            return Err(Error::NotDirectSum(format!(
                "the components generate {} of {} elements",
                covered.len(),
                n
            )));
        }
        let mut degree = vec![u32::MAX; n];
        for (k, comp) in components.iter().enumerate() {
            for &x in comp.elements() {
                if x != 0 {
                    degree[x] = k as u32;
                }
            }
        }
        let grading = Grading {
            groupoid: groupoid.clone(),
            ring: ring.clone(),
            components,
            parts,
            degree,
            nes: OnceLock::new(),
        };
        grading.check_axioms()?;
        Ok(grading)
    }

    fn check_axioms(&self) -> Result<()> {
        let gr = &self.groupoid;
        for g in gr.morphism_ids() {
            for h in gr.morphism_ids() {
                let target = gr.compose(g, h);
                for &x in self.component(g).generators() {
                    for &y in self.component(h).generators() {
                        let p = self.ring.mul(x, y);
                        let ok = match target {
                            Some(gh) => self.component(gh).contains(p),
                            None => p == 0,
                        };
                        if !ok {
                            let (axiom, detail) = match target {
                                Some(gh) => (
                                    "S_g S_h ⊆ S_gh",
                                    format!(
                                        "g = {}, h = {}: {} · {} = {} is not in S_{}",
                                        gr.morphism_label(g),
                                        gr.morphism_label(h),
                                        self.ring.render(x),
                                        self.ring.render(y),
                                        self.ring.render(p),
                                        gr.morphism_label(gh)
                                    ),
                                ),
                                None => (
                                    "S_g S_h = {0} off composable pairs",
                                    format!(
                                        "g = {}, h = {}: {} · {} = {}",
                                        gr.morphism_label(g),
                                        gr.morphism_label(h),
                                        self.ring.render(x),
                                        self.ring.render(y),
                                        self.ring.render(p)
                                    ),
                                ),
                            };
                            return Err(Error::axiom(axiom, detail));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Parses generator expressions keyed by morphism label. Morphisms not
    /// listed get the zero component.
    pub fn from_labels(
        groupoid: &FiniteGroupoid,
        ring: &FiniteRing,
        components: &BTreeMap<String, Vec<String>>,
    ) -> Result<Self> {
        let mut gens = vec![Vec::new(); groupoid.num_morphisms()];
        for (label, exprs) in components {
            let m = groupoid.morphism_by_label(label)?;
            for e in exprs {
                gens[m.0].push(ring.parse_element(e)?);
            }
        }
        Self::new(groupoid, ring, &gens)
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn component(&self, g: Morph) -> &AdditiveSubgroup {
        &self.components[g.0]
    }

    pub fn object_component(&self, e: Obj) -> &AdditiveSubgroup {
        self.component(self.groupoid.identity(e))
    }

    /// The degree-`g` part of `x`.
    pub fn part(&self, x: Elem, g: Morph) -> Elem {
        self.parts[x * self.groupoid.num_morphisms() + g.0] as Elem
    }

    /// The degree of a nonzero homogeneous element.
    pub fn degree(&self, x: Elem) -> Option<Morph> {
        match self.degree[x] {
            u32::MAX => None,
            k => Some(Morph(k as usize)),
        }
    }

    pub fn decompose(&self, x: Elem) -> GradedElement {
        let parts = self
            .groupoid
            .morphism_ids()
            .map(|g| (g, self.part(x, g)))
            .filter(|&(_, p)| p != 0)
            .collect();
        GradedElement { parts }
    }

    pub fn compose(&self, c: &GradedElement) -> Elem {
        c.parts.values().fold(0, |acc, &p| self.ring.add(acc, p))
    }

    pub fn support(&self, x: Elem) -> Vec<Morph> {
        self.decompose(x).support()
    }

    /// Nonzero homogeneous elements in increasing index order.
    pub fn homogeneous_elements(&self) -> Vec<Elem> {
        self.ring.elements().filter(|&x| self.degree[x] != u32::MAX).collect()
    }

    /// The principal part `⊕_{e ∈ G_0} S_e`.
    pub fn principal_part(&self) -> AdditiveSubgroup {
        let mut p = AdditiveSubgroup::zero(&self.ring);
        for e in self.groupoid.object_ids() {
            for &x in self.object_component(e).generators() {
                p.insert(x);
            }
        }
        p
    }

    /// `π_H(c)`: drops the parts outside `H`.
    pub fn project(&self, h: &Subgroupoid, c: &GradedElement) -> GradedElement {
        GradedElement {
            parts: c.parts.iter().filter(|(g, _)| h.contains(**g)).map(|(&g, &x)| (g, x)).collect(),
        }
    }

    /// `π_H` on plain elements.
    pub fn project_elem(&self, h: &Subgroupoid, x: Elem) -> Elem {
        self.compose(&self.project(h, &self.decompose(x)))
    }

    // ------------------------------------------------------------ epsilon

    pub fn nearly_epsilon_strong(&self) -> &NesReport {
        self.nes.get_or_init(|| self.compute_nes())
    }

    pub fn is_nearly_epsilon_strong(&self) -> Result<bool> {
        let r = self.nearly_epsilon_strong();
        if r.by_definition != r.by_local_units {
            return Err(Error::InternalDisagreement(format!(
                "nearly-epsilon-strong definition says {}, local-unit criterion says {}",
                r.by_definition, r.by_local_units
            )));
        }
        Ok(r.holds)
    }

    fn compute_nes(&self) -> NesReport {
        let gr = &self.groupoid;
        let ring = &self.ring;
        let mut failure = None;
        for g in gr.morphism_ids() {
            let sg = self.component(g);
            let sgi = self.component(gr.inv(g));
            let d = set_product(sg, sgi).expect("same ring");
            let reason = match is_s_unital(&d, &d).expect("same ring") {
                Some(m) => Some(format!(
                    "S_g S_g^-1 is not s-unital at {}",
                    ring.render(m)
                )),
                None => {
                    let dsg = set_product(&d, sg).expect("same ring");
                    (dsg != *sg).then(|| "S_g S_g^-1 S_g differs from S_g".to_string())
                }
            };
            if let Some(reason) = reason {
                failure = Some((g, reason));
                break;
            }
        }
        let by_definition = failure.is_none();

        let mut certificate = Vec::new();
        let mut by_local_units = true;
        'outer: for g in gr.morphism_ids() {
            let sg = self.component(g);
            if sg.is_zero() {
                continue;
            }
            let sgi = self.component(gr.inv(g));
            let left_units = set_product(sg, sgi).expect("same ring");
            let right_units = set_product(sgi, sg).expect("same ring");
            let (Some(l), Some(r)) = (
                local_units(ring, sg, &left_units, true),
                local_units(ring, sg, &right_units, false),
            ) else {
                by_local_units = false;
                certificate.clear();
                break 'outer;
            };
            for ((d, e), (_, e2)) in l.into_iter().zip(r) {
                certificate.push((g, d, e, e2));
            }
        }
        NesReport {
            holds: by_definition && by_local_units,
            by_definition,
            by_local_units,
            failure,
            certificate,
        }
    }

    // ------------------------------------------------------------ support

    pub fn support_groupoid(&self) -> SupportGroupoid {
        let gr = &self.groupoid;
        let objects: Vec<Obj> = gr
            .object_ids()
            .filter(|&e| !self.object_component(e).is_zero())
            .collect();
        let on = |o: Obj| objects.contains(&o);
        let morphisms: Vec<Morph> = gr
            .morphism_ids()
            .filter(|&g| on(gr.src(g)) && on(gr.rng(g)))
            .collect();
        let connected = objects
            .iter()
            .all(|&e| objects.iter().all(|&f| gr.hom(e, f).next().is_some()));
        let carries_ring = gr
            .morphism_ids()
            .filter(|g| !morphisms.contains(g))
            .all(|g| self.component(g).is_zero());
        SupportGroupoid {
            morphisms,
            objects,
            connected,
            carries_ring,
        }
    }

    // ------------------------------------------------------------ conjugation

    /// `I^g = S_{g^-1} I S_g`.
    pub fn conjugate(&self, i: &AdditiveSubgroup, g: Morph) -> Result<AdditiveSubgroup> {
        let left = set_product(self.component(self.groupoid.inv(g)), i)?;
        set_product(&left, self.component(g))
    }

    /// Closure operator whose closed sets are the `G`-invariant ideals of the
    /// principal part.
    pub fn invariant_closure_op(&self) -> Closure {
        let p = self.principal_part();
        let mut op = Closure::ideal_of(p.generators());
        for g in self.groupoid.morphism_ids() {
            let gi = self.groupoid.inv(g);
            for &u in self.component(gi).generators() {
                for &v in self.component(g).generators() {
                    op.sandwich.push((u, v));
                }
            }
        }
        op
    }

    /// Smallest `G`-invariant ideal of the principal part containing `seed`.
    pub fn invariant_closure(&self, seed: &[Elem]) -> Result<AdditiveSubgroup> {
        let p = self.principal_part();
        if let Some(&x) = seed.iter().find(|&&x| !p.contains(x)) {
            return Err(Error::MalformedInput(format!(
                "{} is not in the principal part",
                self.ring.render(x)
            )));
        }
        Ok(self.invariant_closure_op().run(&self.ring, seed.iter().copied()))
    }

    /// Is `j` an ideal of the principal part with `J^g ⊆ J` for every `g` in `h`?
    pub fn is_invariant(&self, j: &AdditiveSubgroup, h: Option<&Subgroupoid>) -> bool {
        let p = self.principal_part();
        if !j.is_subset(&p) {
            return false;
        }
        let ring = &self.ring;
        let ideal = j.generators().iter().all(|&x| {
            p.generators()
                .iter()
                .all(|&s| j.contains(ring.mul(s, x)) && j.contains(ring.mul(x, s)))
        });
        ideal
            && self
                .groupoid
                .morphism_ids()
                .filter(|&g| h.map_or(true, |h| h.contains(g)))
                .all(|g| self.conjugate(j, g).map_or(false, |c| c.is_subset(j)))
    }

    /// Is the ideal `i` the direct sum of its intersections with the components?
    pub fn is_graded_ideal(&self, i: &AdditiveSubgroup) -> bool {
        i.generators()
            .iter()
            .all(|&x| self.groupoid.morphism_ids().all(|g| i.contains(self.part(x, g))))
    }

    /// `φ(I) = I ∩ ⊕_e S_e` for a graded ideal `I`.
    pub fn phi(&self, i: &AdditiveSubgroup) -> Result<AdditiveSubgroup> {
        if !i.is_ideal() || !self.is_graded_ideal(i) {
            return Err(Error::NotGraded(format!(
                "ideal generated by {:?} is not graded",
                i.render_generators()
            )));
        }
        Ok(i.intersection(&self.principal_part()))
    }

    /// `ψ(J) = SJS` for a `G`-invariant ideal `J` of the principal part.
    pub fn psi(&self, j: &AdditiveSubgroup) -> Result<AdditiveSubgroup> {
        if !self.is_invariant(j, None) {
            return Err(Error::NotInvariant(format!(
                "{:?} is not a G-invariant ideal of the principal part",
                j.render_generators()
            )));
        }
        let s = AdditiveSubgroup::whole(&self.ring);
        let sjs = set_product(&set_product(&s, j)?, &s)?;
        if !self.is_graded_ideal(&sjs) {
            return Err(Error::NotGraded("SJS is not graded".into()));
        }
        Ok(sjs)
    }

    // ------------------------------------------------------------ hubs

    /// Is `e` a support-hub: every nonzero homogeneous `a_g` has `a_g S_h ≠ 0`
    /// for some `h` with `s(h) = e` and `S_k a_g ≠ 0` for some `k` with `r(k) = e`?
    pub fn is_support_hub(&self, e: Obj) -> Result<HubReport> {
        let gr = &self.groupoid;
        if e.0 >= gr.num_objects() {
            return Err(Error::UnknownObject(format!("#{}", e.0)));
        }
        if self.object_component(e).is_zero() {
            return Err(Error::ObjectNotInG0Prime(gr.object_label(e).to_string()));
        }
        let ring = &self.ring;
        let departing: Vec<Elem> = gr
            .morphism_ids()
            .filter(|&h| gr.src(h) == e)
            .flat_map(|h| self.component(h).generators().to_vec())
            .collect();
        let arriving: Vec<Elem> = gr
            .morphism_ids()
            .filter(|&k| gr.rng(k) == e)
            .flat_map(|k| self.component(k).generators().to_vec())
            .collect();
        for a in self.homogeneous_elements() {
            let right = departing.iter().any(|&v| ring.mul(a, v) != 0);
            let left = arriving.iter().any(|&u| ring.mul(u, a) != 0);
            if !(right && left) {
                return Ok(HubReport {
                    object: e,
                    hub: false,
                    blocking: Some((self.degree(a).expect("homogeneous"), a)),
                });
            }
        }
        Ok(HubReport {
            object: e,
            hub: true,
            blocking: None,
        })
    }

    // ------------------------------------------------------------ primeness

    /// No two nonzero graded ideals with zero product. Ideals generated by
    /// homogeneous elements are graded, and every nonzero graded ideal contains
    /// one, so homogeneous principal pairs decide the question.
    pub fn is_graded_prime(&self, bound: usize) -> Result<PrimeVerdict> {
        if self.ring.size() > bound {
            return Err(Error::bound("ring for the graded primeness search", self.ring.size(), bound));
        }
        let cands = self.homogeneous_elements();
        if cands.is_empty() {
            return Ok(PrimeVerdict::degenerate());
        }
        Ok(crate::ring::principal_pair_search(
            &self.ring,
            &cands,
            &Closure::ideal(&self.ring),
        ))
    }

    /// No two nonzero `G`-invariant ideals of the principal part with zero
    /// product, decided on invariant closures of single elements.
    pub fn is_g_prime_principal(&self, bound: usize) -> Result<PrimeVerdict> {
        let p = self.principal_part();
        if p.len() > bound {
            return Err(Error::bound("principal part for the G-primeness search", p.len(), bound));
        }
        if p.is_zero() {
            return Ok(PrimeVerdict::degenerate());
        }
        let op = self.invariant_closure_op();
        let cands = p.sorted();
        Ok(closed_pair_search(&self.ring, &cands, &op))
    }

    // ------------------------------------------------------------ isotropy

    /// The `G_e^e`-graded subring `⊕_{g ∈ G_e^e} S_g`.
    pub fn isotropy_component(&self, e: Obj) -> Result<Grading> {
        let gr = &self.groupoid;
        let group = gr.isotropy(e)?;
        let members = gr.isotropy_morphisms(e);
        let gens: Vec<Elem> = members
            .iter()
            .flat_map(|&g| self.component(g).generators().to_vec())
            .collect();
        let sub = subring(&self.ring, gens);
        let arith = sub.downcast::<SubringArith>().expect("subring");
        let expected: usize = members.iter().map(|&g| self.component(g).len()).product();
        if sub.size() != expected {
            return Err(Error::InternalDisagreement(format!(
                "isotropy component at {} is not closed",
                gr.object_label(e)
            )));
        }
        let iso = FiniteGroupoid::from_group(&group, gr.object_label(e));
        let mut comps = vec![Vec::new(); iso.num_morphisms()];
        for (a, &g) in members.iter().enumerate() {
            // isotropy group element a ↔ morphism g; in `iso`, element a is morphism a
            let target = iso.morphism_by_label(if a == 0 {
                gr.object_label(e)
            } else {
                group.label(a)
            })?;
            comps[target.0] = self
                .component(g)
                .generators()
                .iter()
                .map(|&x| arith.restrict(x).expect("member of subring"))
                .collect();
        }
        Grading::new_allow_zero(&iso, &sub, &comps)
    }

    /// Maps an element of `isotropy_component(e)` back to this ring.
    pub fn lift_from_isotropy(component: &Grading, x: Elem) -> Elem {
        component
            .ring
            .downcast::<SubringArith>()
            .map_or(x, |s| s.lift(x))
    }

    // ------------------------------------------------------------ enumeration

    /// Every graded ideal (sums of ideals generated by homogeneous elements).
    pub fn enumerate_graded_ideals(&self, cap: usize, size_bound: usize) -> Result<IdealList> {
        let mut universe = vec![0];
        universe.extend(self.homogeneous_elements());
        enumerate_closed(&self.ring, &Closure::ideal(&self.ring), universe, cap, size_bound)
    }

    /// Every `G`-invariant ideal of the principal part.
    pub fn enumerate_invariant_ideals(&self, cap: usize, size_bound: usize) -> Result<IdealList> {
        let p = self.principal_part().sorted();
        enumerate_closed(&self.ring, &self.invariant_closure_op(), p, cap, size_bound)
    }
}

/// Lexicographically first pair `(a, b)` of candidates whose closures multiply
/// to zero. Closures are computed lazily and memoized.
pub(crate) fn closed_pair_search(ring: &FiniteRing, cands: &[Elem], op: &Closure) -> PrimeVerdict {
    let mut memo: BTreeMap<Elem, AdditiveSubgroup> = BTreeMap::new();
    let mut is_cand = vec![false; ring.size()];
    for &c in cands {
        is_cand[c] = true;
    }
    for &a in cands {
        if a == 0 {
            continue;
        }
        let (ia, hit) = op.run_until(ring, [a], |new| new.iter().any(|&c| c != 0 && c < a && is_cand[c]));
        if hit {
            continue;
        }
        for &b in cands {
            if b == 0 || ia.generators().iter().any(|&x| ring.mul(x, b) != 0) {
                continue;
            }
            let ib = memo.entry(b).or_insert_with(|| op.run(ring, [b]));
            if ia.annihilates(ib) {
                return PrimeVerdict::not_prime(a, b);
            }
        }
    }
    PrimeVerdict::prime()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::named;
    use crate::ring::{is_prime_bruteforce, parse_ring};

    fn m3_grading() -> Grading {
        let g = named::p3();
        let r = parse_ring("M(3, F2)").unwrap();
        let comps: BTreeMap<String, Vec<String>> = [
            ("f1", "e(1,1)"),
            ("f2", "e(2,2)"),
            ("f3", "e(3,3)"),
            ("g", "e(1,2)"),
            ("g^-1", "e(2,1)"),
            ("h", "e(3,2)"),
            ("h^-1", "e(2,3)"),
            ("hg^-1", "e(3,1)"),
            ("gh^-1", "e(1,3)"),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), vec![v.to_string()]))
        .collect();
        Grading::from_labels(&g, &r, &comps).unwrap()
    }

    fn el(s: &Grading, e: &str) -> Elem {
        s.ring().parse_element(e).unwrap()
    }

    #[test]
    fn m3_is_nearly_epsilon_strong() {
        let s = m3_grading();
        assert!(s.is_nearly_epsilon_strong().unwrap());
        let sp = s.support_groupoid();
        assert_eq!(sp.morphisms.len(), 9);
        assert!(sp.connected && sp.carries_ring);
    }

    #[test]
    fn m3_products_and_conjugates() {
        let s = m3_grading();
        let gr = s.groupoid().clone();
        let g = gr.morphism_by_label("g").unwrap();
        let p = set_product(s.component(g), s.component(gr.inv(g))).unwrap();
        assert_eq!(p.sorted(), vec![0, el(&s, "e(1,1)")]);
        let i = AdditiveSubgroup::closure(s.ring(), [el(&s, "e(1,1)")]);
        assert_eq!(s.conjugate(&i, g).unwrap().sorted(), vec![0, el(&s, "e(2,2)")]);
        let diag = s.invariant_closure(&[el(&s, "e(1,1)")]).unwrap();
        assert_eq!(diag, s.principal_part());
        assert!(s.invariant_closure(&[el(&s, "e(1,2)")]).is_err());
    }

    #[test]
    fn m3_projection() {
        let s = m3_grading();
        let f1 = s.groupoid().object_by_label("f1").unwrap();
        let h = Subgroupoid::isotropy(s.groupoid(), f1).unwrap();
        assert_eq!(s.project_elem(&h, el(&s, "e(1,1) + e(1,2)")), el(&s, "e(1,1)"));
    }

    #[test]
    fn m3_phi_psi() {
        let s = m3_grading();
        let whole = AdditiveSubgroup::whole(s.ring());
        assert_eq!(s.phi(&whole).unwrap(), s.principal_part());
        assert!(s.psi(&s.principal_part()).unwrap().is_whole());
        assert!(s.psi(&AdditiveSubgroup::zero(s.ring())).unwrap().is_zero());
        let j = AdditiveSubgroup::closure(s.ring(), [el(&s, "e(1,1)")]);
        assert!(matches!(s.psi(&j), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn m3_primeness() {
        let s = m3_grading();
        assert!(s.is_graded_prime(4096).unwrap().prime);
        assert!(s.is_g_prime_principal(4096).unwrap().prime);
        for e in s.groupoid().object_ids() {
            assert!(s.is_support_hub(e).unwrap().hub);
            let iso = s.isotropy_component(e).unwrap();
            assert_eq!(iso.ring().size(), 2);
            assert!(is_prime_bruteforce(iso.ring(), 4096).unwrap().prime);
        }
    }

    #[test]
    fn wrong_degree_is_rejected() {
        let g = named::p2();
        let r = parse_ring("M(2, F2)").unwrap();
        let comps: BTreeMap<String, Vec<String>> = [
            ("e", vec!["e(2,2)"]),
            ("f", vec!["e(1,2)"]),
            ("g", vec!["e(1,1)"]),
            ("g^-1", vec!["e(2,1)"]),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.into_iter().map(String::from).collect()))
        .collect();
        assert!(matches!(
            Grading::from_labels(&g, &r, &comps),
            Err(Error::AxiomViolation { .. })
        ));
    }

    #[test]
    fn overlap_is_not_direct() {
        let g = named::p2();
        let r = parse_ring("sum(F2, F2)").unwrap();
        let comps: BTreeMap<String, Vec<String>> = [("e", vec!["at(1,1)"]), ("f", vec!["at(1,1)", "at(2,1)"])]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.into_iter().map(String::from).collect()))
            .collect();
        assert!(matches!(Grading::from_labels(&g, &r, &comps), Err(Error::NotDirectSum(_))));
        let comps: BTreeMap<String, Vec<String>> = [("e", vec!["at(1,1)"])]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.into_iter().map(String::from).collect()))
            .collect();
        assert!(matches!(Grading::from_labels(&g, &r, &comps), Err(Error::NotDirectSum(_))));
    }

    #[test]
    fn trivial_grading() {
        let g = named::p2();
        let r = parse_ring("M(2, F2)").unwrap();
        let mut gens = vec![Vec::new(); 4];
        gens[0] = r.additive_generators().to_vec();
        let s = Grading::new(&g, &r, &gens).unwrap();
        let sp = s.support_groupoid();
        assert_eq!(sp.morphisms, vec![Morph(0)]);
        assert!(s.is_nearly_epsilon_strong().unwrap());
    }

    #[test]
    fn upper_triangular_is_not_nearly_epsilon_strong() {
        let g = named::p2();
        let m = parse_ring("M(2, F2)").unwrap();
        let t2 = subring(&m, ["e(1,1)", "e(2,2)", "e(1,2)"].map(|s| m.parse_element(s).unwrap()));
        let comps: BTreeMap<String, Vec<String>> =
            [("e", vec!["e(1,1)"]), ("f", vec!["e(2,2)"]), ("g", vec!["e(1,2)"])]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.into_iter().map(String::from).collect()))
                .collect();
        let s = Grading::from_labels(&g, &t2, &comps).unwrap();
        let r = s.nearly_epsilon_strong();
        assert!(!r.holds && !r.by_definition && !r.by_local_units);
        assert!(!s.is_nearly_epsilon_strong().unwrap());
    }

    #[test]
    fn zero_grading_is_degenerate() {
        let g = named::p2();
        let r = parse_ring("Z(1)").unwrap();
        assert!(matches!(Grading::new(&g, &r, &vec![Vec::new(); 4]), Err(Error::Degenerate(_))));
    }
}
