//! Random small instances and the property checks run on each.
//!
//! Every case is generated as instance JSON and goes through the ordinary
//! parser, so a failing case can be written out and replayed. Case `i` of a
//! run draws from its own ChaCha stream, which makes results independent of
//! scheduling.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graded::Grading;
use crate::groupoid::{FiniteGroup, FiniteGroupoid};
use crate::instance::{parse_instance, Instance, Structure};
use crate::partial_action::{
    connell_check, global_action_check, group_type_chain, group_type_theorem, orbit_density_check, psi_check,
    sufficient_conditions_report, PartialAction,
};
use crate::primeness::{
    primeness_report, projection_lemma_holds, torsion_free_shortcut, Bounds, Method, PrimenessReport,
};
use crate::report::{primeness_witnesses, replay_action_witness};

/// Instance families drawn by the generator.
pub const FAMILIES: [&str; 5] = ["matrix_units", "groupoid_ring", "global_action", "partial_action", "negative"];

#[derive(Clone, Debug, Serialize)]
pub struct FuzzFailure {
    pub case: usize,
    pub family: &'static str,
    pub kind: &'static str,
    pub message: String,
    pub instance: Value,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub count: usize,
    pub max_ring: usize,
    /// Cases per family.
    pub families: BTreeMap<String, usize>,
    /// Cases whose graded ring was built and checked.
    pub checked: usize,
    /// Checked cases with a nearly epsilon-strong grading.
    pub nearly_epsilon_strong: usize,
    /// Cases above a size bound.
    pub skipped: usize,
    /// Negative cases the validator rejected.
    pub rejected: usize,
    /// How often each property was evaluated.
    pub properties: BTreeMap<String, usize>,
    pub witnesses: usize,
    pub witnesses_replayed: usize,
    /// Generated cases that failed validation unexpectedly.
    pub invalid: usize,
    /// Property violations (exit code 3).
    pub disagreements: usize,
    pub failures: Vec<FuzzFailure>,
}

/// What one case produced.
#[derive(Clone, Debug, Default)]
struct CaseOutcome {
    family: &'static str,
    checked: bool,
    nes: bool,
    skipped: bool,
    rejected: bool,
    properties: BTreeMap<String, usize>,
    witnesses: usize,
    witnesses_replayed: usize,
    failure: Option<FuzzFailure>,
}

// ---------------------------------------------------------------- generators

/// A ring that is a product of fields: coordinates, each a copy of one field.
#[derive(Clone, Copy, Debug)]
struct FieldProduct {
    field: &'static str,
    coords: usize,
}

impl FieldProduct {
    fn expr(&self) -> String {
        if self.coords == 1 {
            self.field.to_string()
        } else {
            format!("sum({})", vec![self.field; self.coords].join(", "))
        }
    }

    fn basis(&self) -> &'static [&'static str] {
        if self.field == "GF(4)" {
            &["1", "x"]
        } else {
            &["1"]
        }
    }

    fn at(&self, c: usize, b: &str) -> String {
        if self.coords == 1 {
            b.to_string()
        } else {
            format!("at({}, {b})", c + 1)
        }
    }

    fn size(&self) -> usize {
        let q: usize = match self.field {
            "F2" => 2,
            "F3" => 3,
            _ => 4,
        };
        q.pow(self.coords as u32)
    }
}

/// `α: C(n) → Aut(K)`: the generator permutes coordinates and, for `GF(4)`,
/// may also apply Frobenius.
#[derive(Clone, Debug)]
struct Automorphisms {
    ring: FieldProduct,
    group: usize,
    perm: Vec<usize>,
    frobenius: bool,
}

impl Automorphisms {
    /// Image of coordinate `c`, basis element `b` under `α_{a^k}`.
    fn image(&self, k: usize, c: usize, b: &str) -> String {
        let mut d = c;
        for _ in 0..k {
            d = self.perm[d];
        }
        let b = if self.frobenius && k % 2 == 1 && b == "x" { "x + 1" } else { b };
        self.ring.at(d, b)
    }

    fn coord_image(&self, k: usize, c: usize) -> usize {
        (0..k).fold(c, |d, _| self.perm[d])
    }
}

fn automorphisms(rng: &mut ChaCha8Rng) -> Automorphisms {
    let f2 = |coords| FieldProduct { field: "F2", coords };
    let fields = [f2(1), FieldProduct { field: "F3", coords: 1 }, f2(2), FieldProduct { field: "GF(4)", coords: 1 }, f2(3)];
    match rng.gen_range(0..6) {
        0 => Automorphisms {
            ring: f2(2),
            group: *[2, 4].choose(rng).unwrap(),
            perm: vec![1, 0],
            frobenius: false,
        },
        1 => Automorphisms {
            ring: FieldProduct { field: "GF(4)", coords: 1 },
            group: 2,
            perm: vec![0],
            frobenius: true,
        },
        2 => Automorphisms {
            ring: f2(3),
            group: 3,
            perm: vec![1, 2, 0],
            frobenius: false,
        },
        _ => {
            let ring = *fields.choose(rng).unwrap();
            Automorphisms {
                ring,
                group: *[1, 1, 2, 3].choose(rng).unwrap(),
                perm: (0..ring.coords).collect(),
                frobenius: false,
            }
        }
    }
}

/// One connected component `P_m × C(n)` of a global action.
struct Component {
    objects: Vec<String>,
    alpha: Automorphisms,
    groupoid: FiniteGroupoid,
    /// `(label, src, rng, group element)` for every morphism.
    arrows: Vec<(String, usize, usize, usize)>,
}

fn component(rng: &mut ChaCha8Rng, tag: usize, budget: usize) -> Component {
    let alpha = automorphisms(rng);
    let max_m = if alpha.group > 1 { 1 } else { 3 };
    let mut m = rng.gen_range(1..=max_m);
    // keep the skew ring small: |K|^(m^2 n) is its size
    while m > 1 && (alpha.ring.size() as f64).powi((m * m * alpha.group) as i32) > budget as f64 {
        m -= 1;
    }
    let tag = format!("c{tag}");
    let objects: Vec<String> = (0..m).map(|i| format!("{tag}o{i}")).collect();
    let refs: Vec<&str> = objects.iter().map(String::as_str).collect();
    let group = FiniteGroup::cyclic(alpha.group);
    let t = tag.clone();
    let groupoid = FiniteGroupoid::connected(&refs, &group, |i, j, h| format!("{t}:{i}>{j}:{h}"));
    let mut arrows = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for h in 0..alpha.group {
                let label = if i == j && h == 0 { objects[i].clone() } else { format!("{tag}:{i}>{j}:{h}") };
                arrows.push((label, i, j, h));
            }
        }
    }
    Component {
        objects,
        alpha,
        groupoid,
        arrows,
    }
}

/// A global action of a disjoint union of components, optionally restricted
/// to an ideal generated by coordinate idempotents.
fn action_instance(rng: &mut ChaCha8Rng, partial: bool, budget: usize) -> Value {
    let parts = if rng.gen_bool(0.3) { 2 } else { 1 };
    let comps: Vec<Component> = (0..parts).map(|t| component(rng, t, budget)).collect();
    let groupoid = if parts == 1 {
        comps[0].groupoid.clone()
    } else {
        FiniteGroupoid::disjoint_union(&comps.iter().map(|c| c.groupoid.clone()).collect::<Vec<_>>())
            .expect("component labels are distinct")
    };
    let mut ring = serde_json::Map::new();
    let mut ideals = serde_json::Map::new();
    let mut maps = serde_json::Map::new();
    for c in &comps {
        let k = c.alpha.ring;
        // coordinates kept at each object
        let kept: Vec<Vec<bool>> = c
            .objects
            .iter()
            .map(|_| (0..k.coords).map(|_| !partial || rng.gen_bool(0.6)).collect())
            .collect();
        for (i, o) in c.objects.iter().enumerate() {
            let summand = if partial {
                let gens: Vec<String> = (0..k.coords)
                    .filter(|&d| kept[i][d])
                    .flat_map(|d| k.basis().iter().map(move |b| k.at(d, b)))
                    .collect();
                json!({"subring": {"parent": k.expr(), "generators": gens}})
            } else {
                json!(k.expr())
            };
            ring.insert(o.clone(), summand);
        }
        for (label, i, j, h) in &c.arrows {
            if i == j && *h == 0 {
                continue;
            }
            let inv = (c.alpha.group - h) % c.alpha.group;
            // domain A_{g^-1} at i: kept at i and mapped into kept at j
            let dom: Vec<usize> = (0..k.coords)
                .filter(|&d| kept[*i][d] && kept[*j][c.alpha.coord_image(*h, d)])
                .collect();
            let ran: Vec<usize> = (0..k.coords)
                .filter(|&d| kept[*j][d] && kept[*i][c.alpha.coord_image(inv, d)])
                .collect();
            if partial {
                let gens: Vec<String> = ran
                    .iter()
                    .flat_map(|&d| k.basis().iter().map(move |b| format!("at({}, {})", c.objects[*j], k.at(d, b))))
                    .collect();
                ideals.insert(label.clone(), json!(gens));
            }
            let pairs: Vec<Value> = dom
                .iter()
                .flat_map(|&d| {
                    k.basis().iter().map(move |b| {
                        json!([
                            format!("at({}, {})", c.objects[*i], k.at(d, b)),
                            format!("at({}, {})", c.objects[*j], c.alpha.image(*h, d, b)),
                        ])
                    })
                })
                .collect();
            maps.insert(label.clone(), json!({"additive": pairs}));
        }
    }
    let mut pa = serde_json::Map::new();
    if partial {
        pa.insert("ideals".into(), Value::Object(ideals));
    }
    pa.insert("maps".into(), Value::Object(maps));
    json!({
        "version": 1,
        "groupoid": serde_json::to_value(groupoid.to_raw()).expect("raw groupoids serialize"),
        "ring": {"by_object": ring},
        "partial_action": pa,
    })
}

/// Matrix units over a pair groupoid: `e(a,b)` sits in degree `φ(b) → φ(a)`.
/// With several blocks the ring is the block-diagonal subring.
fn matrix_unit_instance(rng: &mut ChaCha8Rng) -> Value {
    let (field, max_units) = if rng.gen_bool(0.7) { ("F2", 12) } else { ("F3", 7) };
    let max_n = if field == "F2" { 4 } else { 3 };
    let mut blocks: Vec<usize>;
    loop {
        let n = rng.gen_range(1..=max_n);
        blocks = Vec::new();
        let mut left = n;
        while left > 0 {
            let b = rng.gen_range(1..=left);
            blocks.push(b);
            left -= b;
        }
        if blocks.iter().map(|b| b * b).sum::<usize>() <= max_units {
            break;
        }
    }
    let n: usize = blocks.iter().sum();
    let m = rng.gen_range(1..=3.min(n + 1));
    let objects: Vec<String> = (1..=m).map(|i| format!("f{i}")).collect();
    let phi: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let mut block_of = Vec::new();
    for (k, &b) in blocks.iter().enumerate() {
        block_of.extend(std::iter::repeat(k).take(b));
    }
    let degree = |a: usize, b: usize| {
        if phi[a] == phi[b] {
            objects[phi[a]].clone()
        } else {
            format!("{}>{}", objects[phi[b]], objects[phi[a]])
        }
    };
    let mut grading: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut gens = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if block_of[a] == block_of[b] {
                let u = format!("e({},{})", a + 1, b + 1);
                grading.entry(degree(a, b)).or_default().push(u.clone());
                gens.push(u);
            }
        }
    }
    let full = format!("M({n}, {field})");
    let ring = if blocks.len() == 1 {
        json!(full)
    } else {
        json!({"subring": {"parent": full, "generators": gens}})
    };
    json!({"version": 1, "groupoid": {"pair": objects}, "ring": ring, "grading": grading})
}

fn groupoid_ring_instance(rng: &mut ChaCha8Rng, budget: usize) -> Value {
    let groupoids = [
        (json!({"group": "trivial"}), 1),
        (json!({"group": "C(2)"}), 2),
        (json!({"group": "C(3)"}), 3),
        (json!({"group": "C(4)"}), 4),
        (json!({"group": "S(3)"}), 6),
        (json!({"named": "p2"}), 4),
        (json!({"named": "p3"}), 9),
        (json!({"named": "two_points"}), 2),
        (json!({"named": "g8"}), 8),
        (json!({"union": [{"named": "p2"}, {"group": "C(2)", "object": "z"}]}), 6),
        (json!({"discrete": ["a", "b", "c"]}), 3),
    ];
    let rings = [("F2", 2), ("F3", 3), ("Z(4)", 4), ("sum(F2, F2)", 4)];
    loop {
        let (g, n) = groupoids.choose(rng).unwrap().clone();
        let (r, q) = *rings.choose(rng).unwrap();
        if (q as f64).powi(n) <= budget as f64 {
            return json!({"version": 1, "groupoid": g, "ring": r, "groupoid_ring": {}});
        }
    }
}

/// Random generator lists for `M(2, F2)` over `P_2`; usually not a grading.
fn negative_instance(rng: &mut ChaCha8Rng) -> Value {
    let units = ["e(1,1)", "e(1,2)", "e(2,1)", "e(2,2)"];
    let mut grading = serde_json::Map::new();
    for label in ["e", "f", "e>f", "f>e"] {
        let k = rng.gen_range(0..=2);
        let gens: Vec<String> = (0..k)
            .map(|_| {
                let mask = rng.gen_range(1..16usize);
                (0..4).filter(|b| mask >> b & 1 == 1).map(|b| units[b]).collect::<Vec<_>>().join(" + ")
            })
            .collect();
        grading.insert(label.into(), json!(gens));
    }
    json!({"version": 1, "groupoid": {"pair": ["e", "f"]}, "ring": "M(2, F2)", "grading": grading})
}

fn generate(rng: &mut ChaCha8Rng, budget: usize) -> (&'static str, Value) {
    let r = rng.gen_range(0..20);
    let family = match r {
        0..=4 => 0,
        5..=8 => 1,
        9..=12 => 2,
        13..=17 => 3,
        _ => 4,
    };
    let v = match family {
        0 => matrix_unit_instance(rng),
        1 => groupoid_ring_instance(rng, budget),
        2 => action_instance(rng, false, budget),
        3 => action_instance(rng, true, budget),
        _ => negative_instance(rng),
    };
    (FAMILIES[family], v)
}

/// The JSON for case `index` of a run.
pub fn generate_case(seed: u64, index: usize, max_ring: usize) -> (&'static str, Value) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    generate(&mut rng, max_ring)
}

// ---------------------------------------------------------------- checks

struct Checker<'a> {
    props: &'a mut BTreeMap<String, usize>,
}

impl Checker<'_> {
    fn check(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
        *self.props.entry(name.to_string()).or_default() += 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InternalDisagreement(format!("{name}: {}", detail())))
        }
    }
}

fn oracle_prime(r: &PrimenessReport) -> Option<bool> {
    r.oracle.as_ref().map(|v| v.prime)
}

/// Properties of any grading, plus the equivalence when nearly
/// epsilon-strong.
fn check_grading(s: &Grading, bounds: &Bounds, c: &mut Checker, out: &mut CaseOutcome) -> Result<PrimenessReport> {
    let r = primeness_report(s, Method::All, bounds)?;
    out.nes = r.nearly_epsilon_strong;
    let oracle = oracle_prime(&r);
    if r.nearly_epsilon_strong {
        c.check("seven_way_equivalence", r.agree(), || format!("{:?}", r.conditions))?;
        if let (Some(o), Some(Some(t))) = (oracle, r.conditions.get("vii")) {
            c.check("oracle_concordance", o == *t, || format!("oracle {o}, theorem {t}"))?;
        }
        if let (Some(g), Some(p)) = (&r.graded, &r.g_prime) {
            c.check("graded_iff_g_prime", g.prime == p.prime, || format!("graded {}, G-prime {}", g.prime, p.prime))?;
        }
        if s.ring().size() <= bounds.enumeration {
            let graded = s.enumerate_graded_ideals(usize::MAX, bounds.enumeration)?;
            let mut ok = true;
            for i in &graded.ideals {
                ok &= s.psi(&s.phi(i)?)? == *i;
            }
            let inv = s.enumerate_invariant_ideals(usize::MAX, bounds.enumeration)?;
            for j in &inv.ideals {
                ok &= s.phi(&s.psi(j)?)? == *j;
            }
            c.check("phi_psi_bijection", ok && graded.ideals.len() == inv.ideals.len(), || {
                format!("{} graded ideals, {} invariant ideals", graded.ideals.len(), inv.ideals.len())
            })?;
        }
        for o in &r.objects {
            if let Some(t) = torsion_free_shortcut(s, o.object, bounds)? {
                if let Some(p) = oracle {
                    c.check("torsion_free_shortcut", t == p, || format!("shortcut {t}, oracle {p} at {}", o.label))?;
                }
            }
        }
    }
    if let Some(o) = oracle {
        if o {
            let graded_ok = r.graded.as_ref().map_or(true, |g| g.prime);
            let iso_ok = r.objects.iter().all(|x| x.isotropy_prime.as_ref().map_or(true, |v| v.prime));
            c.check("prime_implies_graded_and_isotropy", graded_ok && iso_ok, || "oracle prime".into())?;
        }
        let hub_and_prime = r
            .objects
            .iter()
            .any(|x| x.hub.hub && x.isotropy_prime.as_ref().is_some_and(|v| v.prime));
        if hub_and_prime {
            c.check("hub_and_isotropy_prime_implies_prime", o, || "oracle not prime".into())?;
        }
        if let Some((a, _)) = r.oracle.as_ref().and_then(|v| v.witness) {
            for x in r.objects.iter().filter(|x| x.hub.hub) {
                c.check("projection_lemma", projection_lemma_holds(s, &[a], x.object)?, || {
                    format!("projection onto the isotropy at {} vanishes", x.label)
                })?;
            }
        }
    }
    let ws = primeness_witnesses(s, &r)?;
    out.witnesses += ws.len();
    out.witnesses_replayed += ws.iter().filter(|w| w.replayed).count();
    c.check("witness_replay", ws.iter().all(|w| w.replayed), || {
        let bad: Vec<&str> = ws.iter().filter(|w| !w.replayed).map(|w| w.kind).collect();
        format!("witnesses failed to replay: {bad:?}")
    })?;
    Ok(r)
}

fn check_action(
    inst: &Instance,
    action: &PartialAction,
    r: &PrimenessReport,
    bounds: &Bounds,
    c: &mut Checker,
    out: &mut CaseOutcome,
) -> Result<()> {
    let psi = psi_check(action, bounds)?;
    c.check("psi_isomorphism", psi.holds, || psi.failure.clone().unwrap_or_default())?;
    for e in action.support_objects() {
        group_type_chain(action, e, bounds.ring)?;
        *c.props.entry("group_type_chain".into()).or_default() += 1;
    }
    let t = group_type_theorem(action, bounds)?;
    *c.props.entry("group_type_theorem".into()).or_default() += 1;
    for v in &t.isotropy {
        if let Some((a, b)) = v.a_e_g_prime.as_ref().and_then(|p| p.witness) {
            let local = action.restrict_to_isotropy(v.object)?;
            let ok = replay_action_witness(&local, a, b);
            out.witnesses += 1;
            out.witnesses_replayed += ok as usize;
            c.check("witness_replay", ok, || format!("A_e invariant pair at {}", v.label))?;
        }
    }
    if action.is_global() {
        let g = global_action_check(action, bounds)?;
        *c.props.entry("global_action_chain".into()).or_default() += 1;
        if let Some(o) = oracle_prime(r) {
            c.check("global_action_prime", g.prime == o, || format!("{} vs oracle {o}", g.prime))?;
        }
    }
    sufficient_conditions_report(action, bounds)?;
    *c.props.entry("sufficient_conditions".into()).or_default() += 1;
    if let Structure::GroupoidRing = inst.structure {
        let conn = connell_check(&inst.ring, &inst.groupoid, bounds)?;
        if let Some(o) = oracle_prime(r) {
            c.check("connell_concordance", conn.holds == o, || format!("criterion {}, oracle {o}", conn.holds))?;
        }
        if inst.ring.is_commutative() && inst.ring.one().is_some() {
            let mut some_dense = false;
            for e in inst.groupoid.object_ids() {
                some_dense |= orbit_density_check(&inst.groupoid, &inst.ring, e, bounds.ring)?.dense;
            }
            c.check("orbit_density", some_dense == inst.groupoid.is_connected(), || {
                format!("some orbit dense {some_dense}, connected {}", inst.groupoid.is_connected())
            })?;
        }
    }
    Ok(())
}

fn check_instance(inst: &Instance, bounds: &Bounds, out: &mut CaseOutcome) -> Result<()> {
    let mut props = BTreeMap::new();
    let mut c = Checker { props: &mut props };
    let mut copy = inst.clone();
    copy.bounds = *bounds;
    let s = copy.grading()?;
    let r = check_grading(&s, bounds, &mut c, out)?;
    if let Some(action) = inst.action()? {
        check_action(inst, &action, &r, bounds, &mut c, out)?;
    }
    out.checked = true;
    out.properties = props;
    Ok(())
}

fn is_disagreement(e: &Error) -> bool {
    e.exit_code() == 3
}

fn run_case(seed: u64, index: usize, bounds: &Bounds) -> CaseOutcome {
    let (family, value) = generate_case(seed, index, bounds.ring);
    let mut out = CaseOutcome {
        family,
        ..Default::default()
    };
    let fail = |out: &mut CaseOutcome, kind: &'static str, e: &Error| {
        out.failure = Some(FuzzFailure {
            case: index,
            family,
            kind,
            message: e.to_string(),
            instance: value.clone(),
        });
    };
    let inst = match parse_instance(&value.to_string()) {
        Ok(i) => i,
        Err(_) if family == "negative" => {
            out.rejected = true;
            return out;
        }
        Err(e) => {
            fail(&mut out, "invalid", &e);
            return out;
        }
    };
    match check_instance(&inst, bounds, &mut out) {
        Ok(()) => {}
        Err(Error::BoundExceeded { .. }) => out.skipped = true,
        Err(e) if is_disagreement(&e) => fail(&mut out, "disagreement", &e),
        Err(e) if family == "negative" && e.exit_code() == 1 => out.rejected = true,
        Err(Error::Degenerate(_)) => out.skipped = true,
        Err(e) => fail(&mut out, "invalid", &e),
    }
    out
}

/// Runs `count` cases from `seed`. Cases run in parallel; the summary is
/// assembled in case order.
pub fn run_fuzz(seed: u64, count: usize, max_ring: usize) -> FuzzSummary {
    let bounds = Bounds {
        ring: max_ring,
        ..Bounds::default()
    };
    let outcomes: Vec<CaseOutcome> = (0..count).into_par_iter().map(|i| run_case(seed, i, &bounds)).collect();
    let mut sum = FuzzSummary {
        seed,
        count,
        max_ring,
        ..Default::default()
    };
    for o in outcomes {
        *sum.families.entry(o.family.to_string()).or_default() += 1;
        sum.checked += o.checked as usize;
        sum.nearly_epsilon_strong += (o.checked && o.nes) as usize;
        sum.skipped += o.skipped as usize;
        sum.rejected += o.rejected as usize;
        sum.witnesses += o.witnesses;
        sum.witnesses_replayed += o.witnesses_replayed;
        for (k, v) in o.properties {
            *sum.properties.entry(k).or_default() += v;
        }
        if let Some(f) = o.failure {
            match f.kind {
                "disagreement" => sum.disagreements += 1,
                _ => sum.invalid += 1,
            }
            sum.failures.push(f);
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_are_reproducible() {
        for i in 0..20 {
            assert_eq!(generate_case(3, i, 4096), generate_case(3, i, 4096));
        }
    }

    #[test]
    fn generated_cases_parse() {
        for i in 0..60 {
            let (family, v) = generate_case(11, i, 4096);
            if family != "negative" {
                parse_instance(&v.to_string()).unwrap_or_else(|e| panic!("case {i} ({family}): {e}\n{v}"));
            }
        }
    }

    #[test]
    fn small_run_is_clean() {
        let s = run_fuzz(1, 24, 1024);
        assert_eq!(s.disagreements, 0, "{:#?}", s.failures);
        assert_eq!(s.invalid, 0, "{:#?}", s.failures);
        assert!(s.checked > 0);
        assert_eq!(s.witnesses, s.witnesses_replayed);
    }

    #[test]
    fn matrix_units_are_nearly_epsilon_strong() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let v = matrix_unit_instance(&mut rng);
            let s = parse_instance(&v.to_string()).unwrap().grading().unwrap();
            assert!(s.is_nearly_epsilon_strong().unwrap(), "{v}");
        }
    }
}
