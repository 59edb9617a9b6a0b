//! Additive subgroups, ideals and the closure engine behind them.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

use super::{Elem, FiniteRing};

/// An additive subgroup of a ring, kept together with a small generating set.
///
/// The generating set has at most log2 |H| elements: an element is only added
/// as a generator when it enlarges the group.
#[derive(Clone)]
pub struct AdditiveSubgroup {
    ring: FiniteRing,
    members: FixedBitSet,
    elems: Vec<Elem>,
    gens: Vec<Elem>,
}

impl fmt::Debug for AdditiveSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.sorted().iter().take(16).map(|&x| self.ring.render(x)).collect();
        write!(f, "{{{}{}}}", shown.join(", "), if self.len() > 16 { ", ..." } else { "" })
    }
}

impl PartialEq for AdditiveSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same(&other.ring) && self.members == other.members
    }
}

impl Eq for AdditiveSubgroup {}

impl AdditiveSubgroup {
    pub fn zero(ring: &FiniteRing) -> Self {
        let mut members = FixedBitSet::with_capacity(ring.size());
        members.insert(0);
        AdditiveSubgroup {
            ring: ring.clone(),
            members,
            elems: vec![0],
            gens: Vec::new(),
        }
    }

    pub fn whole(ring: &FiniteRing) -> Self {
        Self::closure(ring, ring.additive_generators().iter().copied())
    }

    /// Smallest additive subgroup containing `seed`.
    pub fn closure(ring: &FiniteRing, seed: impl IntoIterator<Item = Elem>) -> Self {
        let mut h = Self::zero(ring);
        for x in seed {
            h.insert(x);
        }
        h
    }

    /// Wraps an element set that the caller asserts is a subgroup; checks it.
    pub fn from_elements(ring: &FiniteRing, elems: &[Elem]) -> Result<Self> {
        let h = Self::closure(ring, elems.iter().copied());
        if h.len() != elems.iter().collect::<BTreeSet<_>>().len() || elems.iter().any(|&x| !h.contains(x)) {
            return Err(Error::axiom("additive subgroup", "element set is not closed under + and -"));
        }
        Ok(h)
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    /// True for the zero subgroup. (A subgroup is never empty.)
    pub fn is_zero(&self) -> bool {
        self.elems.len() == 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_whole(&self) -> bool {
        self.len() == self.ring.size()
    }

    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    /// Elements in insertion order.
    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }

    pub fn sorted(&self) -> Vec<Elem> {
        self.members.ones().collect()
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    /// Smallest nonzero element, if any.
    pub fn min_nonzero(&self) -> Option<Elem> {
        self.members.ones().find(|&x| x != 0)
    }

    /// Adds `x` and everything it generates together with the current group.
    /// Returns the index in `elements()` where the new elements start.
    pub fn insert(&mut self, x: Elem) -> usize {
        let start = self.elems.len();
        if self.contains(x) {
            return start;
        }
        self.gens.push(x);
        // H + <x> = union of cosets H + kx; stop when kx falls back into H.
        let base = self.elems.clone();
        let mut kx = x;
        while !self.members.contains(kx) {
            for &h in &base {
                let y = self.ring.add(h, kx);
                self.members.insert(y);
                self.elems.push(y);
            }
            kx = self.ring.add(kx, x);
        }
        start
    }

    pub fn is_subset(&self, other: &AdditiveSubgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn sum(&self, other: &AdditiveSubgroup) -> Self {
        let mut h = self.clone();
        for &g in other.generators() {
            h.insert(g);
        }
        h
    }

    pub fn intersection(&self, other: &AdditiveSubgroup) -> Self {
        let mut h = Self::zero(&self.ring);
        for x in self.members.intersection(&other.members) {
            if !h.contains(x) {
                h.insert(x);
            }
        }
        h
    }

    pub fn check_same_ring(&self, other: &AdditiveSubgroup) -> Result<()> {
        if self.ring.same(&other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    /// Is this subgroup closed under multiplication by the whole ring on both sides?
    pub fn is_ideal(&self) -> bool {
        let r = self.ring.additive_generators();
        self.gens.iter().all(|&x| {
            r.iter()
                .all(|&s| self.contains(self.ring.mul(s, x)) && self.contains(self.ring.mul(x, s)))
        })
    }

    /// Is `self · other = {0}`?
    pub fn annihilates(&self, other: &AdditiveSubgroup) -> bool {
        self.gens
            .iter()
            .all(|&x| other.gens.iter().all(|&y| self.ring.mul(x, y) == 0))
    }

    pub fn render(&self) -> Vec<String> {
        self.sorted().iter().map(|&x| self.ring.render(x)).collect()
    }

    /// Renders the generating set.
    pub fn render_generators(&self) -> Vec<String> {
        self.gens.iter().map(|&x| self.ring.render(x)).collect()
    }
}

/// Closure of an additive subgroup under a family of multiplications.
///
/// Every map is bilinear in the element being closed, so applying it to the
/// generators of the current group suffices: the final group is closed under
/// `x ↦ l·x`, `x ↦ x·r` and `x ↦ u·x·v` for all listed `l, r, (u, v)`, and hence
/// under the additive subgroups they generate.
#[derive(Clone, Debug, Default)]
pub struct Closure {
    pub left: Vec<Elem>,
    pub right: Vec<Elem>,
    pub sandwich: Vec<(Elem, Elem)>,
}

impl Closure {
    /// Two-sided ideal closure in the whole ring.
    pub fn ideal(ring: &FiniteRing) -> Self {
        let g = ring.additive_generators().to_vec();
        Closure {
            left: g.clone(),
            right: g,
            sandwich: Vec::new(),
        }
    }

    /// Two-sided ideal closure inside the subring generated additively by `gens`.
    pub fn ideal_of(gens: &[Elem]) -> Self {
        Closure {
            left: gens.to_vec(),
            right: gens.to_vec(),
            sandwich: Vec::new(),
        }
    }

    /// Closes `seed`. `stop` sees each batch of new elements and may end the
    /// closure early by returning true; the second value reports that.
    pub fn run_until(
        &self,
        ring: &FiniteRing,
        seed: impl IntoIterator<Item = Elem>,
        mut stop: impl FnMut(&[Elem]) -> bool,
    ) -> (AdditiveSubgroup, bool) {
        let mut h = AdditiveSubgroup::zero(ring);
        let mut push = |h: &mut AdditiveSubgroup, x: Elem| -> bool {
            let start = h.insert(x);
            start < h.len() && stop(&h.elements()[start..])
        };
        for x in seed {
            if push(&mut h, x) {
                return (h, true);
            }
        }
        let mut next = 0;
        while next < h.generators().len() {
            let x = h.generators()[next];
            next += 1;
            for &l in &self.left {
                if push(&mut h, ring.mul(l, x)) {
                    return (h, true);
                }
            }
            for &r in &self.right {
                if push(&mut h, ring.mul(x, r)) {
                    return (h, true);
                }
            }
            for &(u, v) in &self.sandwich {
                if push(&mut h, ring.mul(ring.mul(u, x), v)) {
                    return (h, true);
                }
            }
        }
        (h, false)
    }

    pub fn run(&self, ring: &FiniteRing, seed: impl IntoIterator<Item = Elem>) -> AdditiveSubgroup {
        self.run_until(ring, seed, |_| false).0
    }
}

/// Smallest two-sided ideal containing `seed`.
pub fn ideal_generated(ring: &FiniteRing, seed: impl IntoIterator<Item = Elem>) -> AdditiveSubgroup {
    Closure::ideal(ring).run(ring, seed)
}

/// Additive closure of all products `x·y`, `x ∈ X`, `y ∈ Y`. By bilinearity the
/// products of generators suffice.
pub fn set_product(x: &AdditiveSubgroup, y: &AdditiveSubgroup) -> Result<AdditiveSubgroup> {
    x.check_same_ring(y)?;
    let ring = &x.ring;
    let mut h = AdditiveSubgroup::zero(ring);
    for &a in x.generators() {
        for &b in y.generators() {
            h.insert(ring.mul(a, b));
        }
    }
    Ok(h)
}

/// Is the bimodule `module` s-unital over the subring `r`, that is, does every
/// `m` satisfy `m ∈ Rm` and `m ∈ mR`? Returns the first failing element.
pub fn is_s_unital(module: &AdditiveSubgroup, r: &AdditiveSubgroup) -> Result<Option<Elem>> {
    module.check_same_ring(r)?;
    let ring = &module.ring;
    let candidates = r.sorted();
    let mut recent: Vec<Elem> = Vec::new();
    for m in module.sorted() {
        let left = find_unit(&mut recent, &candidates, |a| ring.mul(a, m) == m);
        let right = find_unit(&mut recent, &candidates, |a| ring.mul(m, a) == m);
        if left.is_none() || right.is_none() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Searches previously successful candidates first; units tend to repeat.
pub(crate) fn find_unit(recent: &mut Vec<Elem>, candidates: &[Elem], ok: impl Fn(Elem) -> bool) -> Option<Elem> {
    if let Some(&a) = recent.iter().find(|&&a| ok(a)) {
        return Some(a);
    }
    let a = candidates.iter().copied().find(|&a| ok(a))?;
    if recent.len() < 8 {
        recent.push(a);
    }
    Some(a)
}

/// First `a ∈ R` (in index order) with `a·m = m·a = m` for every `m` in `ms`.
pub fn s_unit_for(r: &AdditiveSubgroup, ms: &[Elem]) -> Result<Elem> {
    let ring = &r.ring;
    r.sorted()
        .into_iter()
        .find(|&a| ms.iter().all(|&m| ring.mul(a, m) == m && ring.mul(m, a) == m))
        .ok_or(Error::NotSUnital)
}

/// `{t : ts = st for all s ∈ S}`.
pub fn centralizer(ring: &FiniteRing, s: &AdditiveSubgroup) -> Result<AdditiveSubgroup> {
    if !ring.same(s.ring()) {
        return Err(Error::RingMismatch);
    }
    let gens = s.generators();
    let mut c = AdditiveSubgroup::zero(ring);
    for t in ring.elements() {
        if !c.contains(t) && gens.iter().all(|&g| ring.mul(t, g) == ring.mul(g, t)) {
            c.insert(t);
        }
    }
    Ok(c)
}

/// A subring `S` is maximal commutative when it equals its own centralizer.
pub fn is_maximal_commutative(ring: &FiniteRing, s: &AdditiveSubgroup) -> Result<bool> {
    Ok(centralizer(ring, s)? == *s)
}

/// Result of `enumerate_ideals`.
#[derive(Clone, Debug)]
pub struct IdealList {
    pub ideals: Vec<AdditiveSubgroup>,
    pub truncated: bool,
}

/// Every ideal of a small ring (at most `size_bound` elements), as closures of
/// principal ideals joined pairwise to a fixpoint. Sorted by size, then by
/// element set. Stops after `cap` ideals with `truncated` set.
pub fn enumerate_ideals(ring: &FiniteRing, cap: usize, size_bound: usize) -> Result<IdealList> {
    enumerate_closed(ring, &Closure::ideal(ring), ring.elements(), cap, size_bound)
}

/// Same enumeration for an arbitrary closure operator over the subgroups
/// generated by `universe`.
pub fn enumerate_closed(
    ring: &FiniteRing,
    closure: &Closure,
    universe: impl IntoIterator<Item = Elem>,
    cap: usize,
    size_bound: usize,
) -> Result<IdealList> {
    if ring.size() > size_bound {
        return Err(Error::bound("ring for ideal enumeration", ring.size(), size_bound));
    }
    let key = |h: &AdditiveSubgroup| h.sorted();
    let mut seen: BTreeSet<Vec<Elem>> = BTreeSet::new();
    let mut list: Vec<AdditiveSubgroup> = Vec::new();
    let zero = AdditiveSubgroup::zero(ring);
    seen.insert(key(&zero));
    list.push(zero);
    let mut truncated = false;
    for a in universe {
        let id = closure.run(ring, [a]);
        if seen.insert(key(&id)) {
            list.push(id);
        }
    }
    // every ideal is a sum of principal ones
    let principal: Vec<AdditiveSubgroup> = list.clone();
    let mut i = 0;
    'outer: while i < list.len() {
        for p in &principal {
            let s = list[i].sum(p);
            if seen.insert(key(&s)) {
                if list.len() >= cap {
                    truncated = true;
                    break 'outer;
                }
                list.push(s);
            }
        }
        i += 1;
    }
    list.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.sorted().cmp(&b.sorted())));
    if list.len() > cap {
        list.truncate(cap);
        truncated = true;
    }
    Ok(IdealList { ideals: list, truncated })
}

#[cfg(test)]
mod tests {
    use super::super::parse_ring;
    use super::*;
    use proptest::prelude::*;

    fn el(r: &FiniteRing, s: &str) -> Elem {
        r.parse_element(s).unwrap()
    }

    #[test]
    fn additive_closure_examples() {
        let z4 = parse_ring("Z(4)").unwrap();
        assert_eq!(AdditiveSubgroup::closure(&z4, [2]).sorted(), vec![0, 2]);
        let m2 = parse_ring("M(2, F2)").unwrap();
        let h = AdditiveSubgroup::closure(&m2, [el(&m2, "e(1,1)")]);
        assert_eq!(h.sorted(), vec![0, el(&m2, "e(1,1)")]);
        let s = parse_ring("sum(F2, F2)").unwrap();
        let d = el(&s, "at(1,1) + at(2,1)");
        assert_eq!(AdditiveSubgroup::closure(&s, [d]).sorted(), vec![0, d]);
    }

    #[test]
    fn set_product_examples() {
        let m2 = parse_ring("M(2, F2)").unwrap();
        let x = AdditiveSubgroup::closure(&m2, [el(&m2, "e(1,2)")]);
        let y = AdditiveSubgroup::closure(&m2, [el(&m2, "e(2,1)")]);
        assert_eq!(set_product(&x, &y).unwrap().sorted(), vec![0, el(&m2, "e(1,1)")]);
        assert!(set_product(&x, &AdditiveSubgroup::zero(&m2)).unwrap().is_zero());
        let other = parse_ring("M(2, F2)").unwrap();
        assert_eq!(
            set_product(&x, &AdditiveSubgroup::zero(&other)),
            Err(Error::RingMismatch)
        );
    }

    #[test]
    fn ideal_examples() {
        let m2 = parse_ring("M(2, F2)").unwrap();
        assert!(ideal_generated(&m2, [el(&m2, "e(1,1)")]).is_whole());
        let s = parse_ring("sum(F2, F2)").unwrap();
        let i = ideal_generated(&s, [el(&s, "at(1,1)")]);
        assert_eq!(i.sorted(), vec![0, el(&s, "at(1,1)")]);
        assert!(ideal_generated(&s, []).is_zero());
        assert!(ideal_generated(&s, [0]).is_zero());
    }

    #[test]
    fn s_unit_examples() {
        let f2 = parse_ring("F2").unwrap();
        let all = AdditiveSubgroup::whole(&f2);
        assert_eq!(s_unit_for(&all, &[1]).unwrap(), 1);
        let z4 = parse_ring("Z(4)").unwrap();
        let two = AdditiveSubgroup::closure(&z4, [2]);
        assert_eq!(s_unit_for(&two, &[2]), Err(Error::NotSUnital));
        let m2 = parse_ring("M(2, F2)").unwrap();
        let diag = AdditiveSubgroup::closure(&m2, [el(&m2, "e(1,1)"), el(&m2, "e(2,2)")]);
        let a = s_unit_for(&diag, &[el(&m2, "e(1,1)")]).unwrap();
        assert!([el(&m2, "e(1,1)"), el(&m2, "e(1,1)+e(2,2)")].contains(&a));
        // brute force: every valid unit is one of the two
        let units: Vec<Elem> = diag
            .sorted()
            .into_iter()
            .filter(|&a| {
                let m = el(&m2, "e(1,1)");
                m2.mul(a, m) == m && m2.mul(m, a) == m
            })
            .collect();
        assert_eq!(units.len(), 2);
        assert_eq!(is_s_unital(&diag, &diag).unwrap(), None);
        assert_eq!(is_s_unital(&two, &two).unwrap(), Some(2));
    }

    #[test]
    fn centralizer_examples() {
        let f2f2 = parse_ring("sum(F2, F2)").unwrap();
        assert!(is_maximal_commutative(&f2f2, &AdditiveSubgroup::whole(&f2f2)).unwrap());
        let m2 = parse_ring("M(2, F2)").unwrap();
        let scalars = AdditiveSubgroup::closure(&m2, [m2.one().unwrap()]);
        assert!(centralizer(&m2, &scalars).unwrap().is_whole());
        assert!(!is_maximal_commutative(&m2, &scalars).unwrap());
        let diag = AdditiveSubgroup::closure(&m2, [el(&m2, "e(1,1)"), el(&m2, "e(2,2)")]);
        // brute-force centralizer
        let c: Vec<Elem> = m2
            .elements()
            .filter(|&t| diag.sorted().iter().all(|&s| m2.mul(t, s) == m2.mul(s, t)))
            .collect();
        assert_eq!(c, diag.sorted());
        assert!(is_maximal_commutative(&m2, &diag).unwrap());
    }

    /// Ideals by testing every subset-closed subgroup: feasible for tiny rings.
    fn ideals_by_subgroups(ring: &FiniteRing) -> BTreeSet<Vec<Elem>> {
        let mut out = BTreeSet::new();
        let n = ring.size();
        for mask in 0u32..(1 << n) {
            if mask & 1 == 0 {
                continue;
            }
            let set: Vec<Elem> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let closed = set.iter().all(|&a| {
                set.iter().all(|&b| set.contains(&ring.add(a, b)))
                    && ring.elements().all(|r| set.contains(&ring.mul(r, a)) && set.contains(&ring.mul(a, r)))
            }) && set.iter().all(|&a| set.contains(&ring.neg(a)));
            if closed {
                out.insert(set);
            }
        }
        out
    }

    #[test]
    fn enumerate_ideals_examples() {
        let f2 = parse_ring("F2").unwrap();
        assert_eq!(enumerate_ideals(&f2, 100, 256).unwrap().ideals.len(), 2);
        let f2f2 = parse_ring("sum(F2, F2)").unwrap();
        assert_eq!(enumerate_ideals(&f2f2, 100, 256).unwrap().ideals.len(), 4);
        let z8 = parse_ring("Z(8)").unwrap();
        let list = enumerate_ideals(&z8, 100, 256).unwrap();
        let got: Vec<Vec<Elem>> = list.ideals.iter().map(|i| i.sorted()).collect();
        let expect: Vec<Vec<Elem>> = ideals_by_subgroups(&z8).into_iter().collect::<Vec<_>>();
        let mut expect_sorted = expect.clone();
        expect_sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        assert_eq!(got, expect_sorted);
        assert_eq!(got.len(), 4);
        let t = enumerate_ideals(&z8, 2, 256).unwrap();
        assert!(t.truncated);
        assert_eq!(t.ideals.len(), 2);
        assert!(enumerate_ideals(&parse_ring("M(3, F2)").unwrap(), 10, 256).is_err());
    }

    #[test]
    fn enumerate_matches_subset_oracle() {
        for s in ["Z(12)", "sum(F2, Z(4))", "group_ring(F2, C(2))", "sum(F3, F2)"] {
            let r = parse_ring(s).unwrap();
            let got: BTreeSet<Vec<Elem>> = enumerate_ideals(&r, 1000, 256)
                .unwrap()
                .ideals
                .iter()
                .map(|i| i.sorted())
                .collect();
            assert_eq!(got, ideals_by_subgroups(&r), "{s}");
        }
    }

    fn arb_ring() -> impl Strategy<Value = FiniteRing> {
        prop_oneof![
            Just("Z(12)"),
            Just("M(2, F2)"),
            Just("sum(F2, Z(4))"),
            Just("group_ring(F3, C(2))"),
            Just("GF(9)"),
        ]
        .prop_map(|s| parse_ring(s).unwrap())
    }

    proptest! {
        #[test]
        fn ideal_generated_idempotent_and_monotone(r in arb_ring(), a in 0usize..1000, b in 0usize..1000) {
            let (a, b) = (a % r.size(), b % r.size());
            let ia = ideal_generated(&r, [a]);
            let again = ideal_generated(&r, ia.sorted());
            prop_assert_eq!(&again, &ia);
            let iab = ideal_generated(&r, [a, b]);
            prop_assert!(ia.is_subset(&iab));
            prop_assert!(iab.is_ideal());
        }

        #[test]
        fn set_product_associative(r in arb_ring(), a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
            let n = r.size();
            let x = AdditiveSubgroup::closure(&r, [a % n]);
            let y = AdditiveSubgroup::closure(&r, [b % n, (a + b) % n]);
            let z = AdditiveSubgroup::closure(&r, [c % n]);
            let left = set_product(&set_product(&x, &y).unwrap(), &z).unwrap();
            let right = set_product(&x, &set_product(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn set_product_matches_all_pairs(r in arb_ring(), a in 0usize..1000, b in 0usize..1000) {
            let n = r.size();
            let x = AdditiveSubgroup::closure(&r, [a % n, (3 * a + 1) % n]);
            let y = AdditiveSubgroup::closure(&r, [b % n]);
            let all = AdditiveSubgroup::closure(
                &r,
                x.sorted().iter().flat_map(|&p| y.sorted().into_iter().map(move |q| (p, q))).map(|(p, q)| r.mul(p, q)).collect::<Vec<_>>(),
            );
            prop_assert_eq!(set_product(&x, &y).unwrap(), all);
        }
    }
}
