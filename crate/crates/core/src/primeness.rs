//! Primeness of graded rings, decided along several independent routes, and
//! the harness that checks the seven equivalent conditions against each other.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{Grading, HubReport};
use crate::groupoid::{Morph, Obj, Subgroupoid};
use crate::ring::{ideal_generated, is_prime_bruteforce, set_product, Elem, FiniteRing, PrimeVerdict};

pub const CONDITIONS: [&str; 7] = ["i", "ii", "iii", "iv", "v", "vi", "vii"];

/// Size bounds for the searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Largest ring handed to a principal-pair search.
    pub ring: usize,
    /// Largest ring for ideal-lattice enumeration.
    pub enumeration: usize,
    /// Largest group for subgroup enumeration.
    pub group: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            ring: 4096,
            enumeration: 256,
            group: 24,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Theorem,
    All,
}

/// Per-object facts used by conditions (ii)–(vii).
#[derive(Clone, Debug, Serialize)]
pub struct ObjectEvidence {
    pub object: Obj,
    pub label: String,
    pub isotropy_order: usize,
    pub isotropy_ring_size: usize,
    pub hub: HubReport,
    /// `None` when the isotropy ring is above the bound.
    pub isotropy_prime: Option<PrimeVerdict>,
}

/// Three-valued conjunction: false wins, then unknown.
fn and(values: impl IntoIterator<Item = Option<bool>>) -> Option<bool> {
    let mut unknown = false;
    for v in values {
        match v {
            Some(false) => return Some(false),
            None => unknown = true,
            Some(true) => {}
        }
    }
    (!unknown).then_some(true)
}

/// Three-valued disjunction: true wins, then unknown.
fn or(values: impl IntoIterator<Item = Option<bool>>) -> Option<bool> {
    let mut unknown = false;
    for v in values {
        match v {
            Some(true) => return Some(true),
            None => unknown = true,
            Some(false) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

fn skip_over_bound<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BoundExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Oracle verdict on the whole ring.
pub fn is_prime_oracle(s: &Grading, bounds: &Bounds) -> Result<PrimeVerdict> {
    is_prime_bruteforce(s.ring(), bounds.ring)
}

/// Collects hub and isotropy facts for every object of `G_0'`.
pub fn object_evidence(s: &Grading, bounds: &Bounds) -> Result<Vec<ObjectEvidence>> {
    let gr = s.groupoid();
    let mut out = Vec::new();
    for e in s.support_groupoid().objects {
        let iso = s.isotropy_component(e)?;
        if iso.ring().is_zero_ring() {
            return Err(Error::Degenerate(format!(
                "isotropy component at {} is zero although S_e is not",
                gr.object_label(e)
            )));
        }
        let verdict = skip_over_bound(is_prime_bruteforce(iso.ring(), bounds.ring))?;
        out.push(ObjectEvidence {
            object: e,
            label: gr.object_label(e).to_string(),
            isotropy_order: gr.isotropy_morphisms(e).len(),
            isotropy_ring_size: iso.ring().size(),
            hub: s.is_support_hub(e)?,
            isotropy_prime: verdict,
        });
    }
    Ok(out)
}

/// One condition of the main equivalence. Conditions (ii)–(vii) never consult
/// the whole-ring oracle.
pub fn evaluate_condition(
    s: &Grading,
    label: &str,
    evidence: &[ObjectEvidence],
    bounds: &Bounds,
) -> Result<Option<bool>> {
    let iso = |o: &ObjectEvidence| o.isotropy_prime.as_ref().map(|v| v.prime);
    let every_iso = || and(evidence.iter().map(iso));
    let some_iso = || or(evidence.iter().map(iso));
    let g_prime = || -> Result<Option<bool>> {
        Ok(skip_over_bound(s.is_g_prime_principal(bounds.ring))?.map(|v| v.prime))
    };
    let graded = || -> Result<Option<bool>> {
        Ok(skip_over_bound(s.is_graded_prime(bounds.ring))?.map(|v| v.prime))
    };
    let hub_and_iso = |o: &ObjectEvidence| and([Some(o.hub.hub), iso(o)]);
    Ok(match label {
        "i" => skip_over_bound(is_prime_oracle(s, bounds))?.map(|v| v.prime),
        "ii" => and([g_prime()?, every_iso()]),
        "iii" => and([g_prime()?, some_iso()]),
        "iv" => and([graded()?, every_iso()]),
        "v" => and([graded()?, some_iso()]),
        "vi" => and(evidence.iter().map(hub_and_iso)),
        "vii" => or(evidence.iter().map(hub_and_iso)),
        other => return Err(Error::MalformedInput(format!("unknown condition `{other}`"))),
    })
}

/// Everything the harness computed for one grading.
#[derive(Clone, Debug, Serialize)]
pub struct PrimenessReport {
    /// Oracle verdict if it ran, else the theorem-path verdict (condition vii).
    pub verdict: Option<bool>,
    pub method: Method,
    pub conditions: BTreeMap<String, Option<bool>>,
    pub oracle: Option<PrimeVerdict>,
    pub graded: Option<PrimeVerdict>,
    pub g_prime: Option<PrimeVerdict>,
    pub objects: Vec<ObjectEvidence>,
    pub nearly_epsilon_strong: bool,
    pub degenerate: bool,
    pub oracle_skipped: bool,
}

impl PrimenessReport {
    /// The evaluated conditions agree (ignoring skipped ones).
    pub fn agree(&self) -> bool {
        let mut vals = self.conditions.values().flatten();
        match vals.next() {
            Some(first) => vals.all(|v| v == first),
            None => true,
        }
    }
}

/// Runs the selected deciders. With `Method::All` every one of the seven
/// conditions is evaluated; a mismatch on a nearly-epsilon-strong grading is
/// an `InternalDisagreement`.
pub fn primeness_report(s: &Grading, method: Method, bounds: &Bounds) -> Result<PrimenessReport> {
    let nes = s.is_nearly_epsilon_strong()?;
    let evidence = object_evidence(s, bounds)?;
    let mut conditions = BTreeMap::new();
    let labels: &[&str] = match method {
        Method::Oracle => &["i"],
        Method::Theorem => &["vii"],
        Method::All => &CONDITIONS,
    };
    for &l in labels {
        conditions.insert(l.to_string(), evaluate_condition(s, l, &evidence, bounds)?);
    }
    let run_oracle = method != Method::Theorem;
    let oracle = if run_oracle {
        skip_over_bound(is_prime_oracle(s, bounds))?
    } else {
        None
    };
    let (graded, g_prime) = if method == Method::All {
        (
            skip_over_bound(s.is_graded_prime(bounds.ring))?,
            skip_over_bound(s.is_g_prime_principal(bounds.ring))?,
        )
    } else {
        (None, None)
    };
    let theorem = conditions.get("vii").copied().flatten();
    let report = PrimenessReport {
        verdict: oracle.as_ref().map(|v| v.prime).or(theorem),
        method,
        conditions,
        oracle_skipped: run_oracle && oracle.is_none(),
        oracle,
        graded,
        g_prime,
        objects: evidence,
        nearly_epsilon_strong: nes,
        degenerate: false,
    };
    if nes && !report.agree() {
        let shown: Vec<String> = report
            .conditions
            .iter()
            .map(|(k, v)| format!("({k}) {v:?}"))
            .collect();
        return Err(Error::InternalDisagreement(format!(
            "conditions of the main equivalence differ: {}",
            shown.join(", ")
        )));
    }
    Ok(report)
}

/// The seven-way harness; requires a nearly-epsilon-strong grading.
pub fn equivalence_report(s: &Grading, bounds: &Bounds) -> Result<PrimenessReport> {
    if !s.is_nearly_epsilon_strong()? {
        let why = s
            .nearly_epsilon_strong()
            .failure
            .as_ref()
            .map(|(g, r)| format!("{} at {}", r, s.groupoid().morphism_label(*g)))
            .unwrap_or_default();
        return Err(Error::NotNearlyEpsilonStrong(why));
    }
    primeness_report(s, Method::All, bounds)
}

/// For `e ∈ G_0'` with trivial isotropy (the finite torsion-free case):
/// `S_e` is `G_e^e`-prime and the principal part is `G`-prime. `None` when the
/// isotropy group is nontrivial.
pub fn torsion_free_shortcut(s: &Grading, e: Obj, bounds: &Bounds) -> Result<Option<bool>> {
    let gr = s.groupoid();
    if s.object_component(e).is_zero() {
        return Err(Error::ObjectNotInG0Prime(gr.object_label(e).to_string()));
    }
    if !gr.isotropy(e)?.is_torsion_free() {
        return Ok(None);
    }
    let iso = s.isotropy_component(e)?;
    let local = iso.is_g_prime_principal(bounds.ring)?.prime;
    let global = s.is_g_prime_principal(bounds.ring)?.prime;
    Ok(Some(local && global))
}

/// Replays an ideal-pair witness: both generated ideals are nonzero and their
/// product is zero.
pub fn replay_ideal_witness(ring: &FiniteRing, a: Elem, b: Elem) -> bool {
    let ia = ideal_generated(ring, [a]);
    let ib = ideal_generated(ring, [b]);
    !ia.is_zero() && !ib.is_zero() && set_product(&ia, &ib).map_or(false, |p| p.is_zero())
}

/// Replays a graded witness: homogeneous generators and a zero product.
pub fn replay_graded_witness(s: &Grading, a: Elem, b: Elem) -> bool {
    s.degree(a).is_some() && s.degree(b).is_some() && replay_ideal_witness(s.ring(), a, b)
}

/// Replays a `G`-prime witness on invariant closures.
pub fn replay_invariant_witness(s: &Grading, a: Elem, b: Elem) -> bool {
    match (s.invariant_closure(&[a]), s.invariant_closure(&[b])) {
        (Ok(ia), Ok(ib)) => {
            !ia.is_zero() && !ib.is_zero() && s.is_invariant(&ia, None) && s.is_invariant(&ib, None) && ia.annihilates(&ib)
        }
        _ => false,
    }
}

/// Replays a blocked support-hub claim: `a` is homogeneous of degree `g` and
/// annihilates every component departing from `e` on the right, or every
/// component arriving at `e` on the left.
pub fn replay_hub_block(s: &Grading, e: Obj, g: Morph, a: Elem) -> bool {
    let gr = s.groupoid();
    if s.degree(a) != Some(g) {
        return false;
    }
    let ring = s.ring();
    let right_dead = gr
        .morphism_ids()
        .filter(|&h| gr.src(h) == e)
        .all(|h| s.component(h).generators().iter().all(|&v| ring.mul(a, v) == 0));
    let left_dead = gr
        .morphism_ids()
        .filter(|&k| gr.rng(k) == e)
        .all(|k| s.component(k).generators().iter().all(|&u| ring.mul(u, a) == 0));
    right_dead || left_dead
}

/// For a nonzero ideal `I` and a support-hub `e`, `π_{G_e^e}(I)` is a nonzero
/// ideal of the isotropy component. Returns whether that holds for `I`.
pub fn projection_lemma_holds(s: &Grading, ideal_gens: &[Elem], e: Obj) -> Result<bool> {
    let ring = s.ring();
    let i = ideal_generated(ring, ideal_gens.iter().copied());
    if i.is_zero() {
        return Ok(true);
    }
    let h = Subgroupoid::isotropy(s.groupoid(), e)?;
    let mut proj = crate::ring::AdditiveSubgroup::zero(ring);
    for &x in i.generators() {
        proj.insert(s.project_elem(&h, x));
    }
    if proj.is_zero() {
        return Ok(false);
    }
    // ideal of ⊕_{g ∈ G_e^e} S_g
    let comp_gens: Vec<Elem> = h
        .members()
        .flat_map(|g| s.component(g).generators().to_vec())
        .collect();
    Ok(proj.generators().iter().all(|&x| {
        comp_gens
            .iter()
            .all(|&c| proj.contains(ring.mul(c, x)) && proj.contains(ring.mul(x, c)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{named, FiniteGroup, FiniteGroupoid};
    use crate::ring::parse_ring;

    fn groupoid_ring(r: &str, g: &FiniteGroupoid) -> Grading {
        crate::partial_action::build_groupoid_ring(&parse_ring(r).unwrap(), g, 4096).unwrap()
    }

    #[test]
    fn disconnected_groupoid_ring_not_prime() {
        let s = groupoid_ring("F2", &named::two_points());
        let r = equivalence_report(&s, &Bounds::default()).unwrap();
        assert_eq!(r.verdict, Some(false));
        assert!(r.conditions.values().all(|v| *v == Some(false)));
        let (a, b) = r.oracle.unwrap().witness.unwrap();
        assert!(replay_ideal_witness(s.ring(), a, b));
        let e = s.groupoid().object_by_label("e").unwrap();
        assert_eq!(torsion_free_shortcut(&s, e, &Bounds::default()).unwrap(), Some(false));
    }

    #[test]
    fn cyclic_group_ring_not_prime() {
        let s = groupoid_ring("F2", &named::group(&FiniteGroup::cyclic(2)));
        let r = equivalence_report(&s, &Bounds::default()).unwrap();
        assert!(r.conditions.values().all(|v| *v == Some(false)));
        let e = s.groupoid().object_by_label("e").unwrap();
        assert_eq!(torsion_free_shortcut(&s, e, &Bounds::default()).unwrap(), None);
    }

    #[test]
    fn pair_groupoid_ring_prime() {
        let s = groupoid_ring("F2", &named::p2());
        let r = equivalence_report(&s, &Bounds::default()).unwrap();
        assert!(r.conditions.values().all(|v| *v == Some(true)));
        assert_eq!(s.ring().size(), 16);
    }

    #[test]
    fn three_valued_logic() {
        assert_eq!(and([Some(true), None]), None);
        assert_eq!(and([Some(false), None]), Some(false));
        assert_eq!(or([Some(false), None]), None);
        assert_eq!(or([Some(true), None]), Some(true));
        assert_eq!(or(std::iter::empty()), Some(false));
        assert_eq!(and(std::iter::empty()), Some(true));
    }
}
