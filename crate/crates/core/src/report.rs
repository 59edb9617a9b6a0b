//! Report documents: what each command computed for an instance, with every
//! non-primeness witness rendered as ring elements and replayed.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fuzz::FuzzSummary;
use crate::graded::Grading;
use crate::instance::{Instance, InstanceSummary, Structure};
use crate::partial_action::{build_skew_ring, connell_check, group_type_theorem, GroupTypeVerdict, PartialAction};
use crate::primeness::{
    equivalence_report, primeness_report, replay_graded_witness, replay_hub_block, replay_ideal_witness,
    replay_invariant_witness, Bounds, Method, PrimenessReport,
};
use crate::ring::{Elem, FiniteRing, PrimeVerdict};

pub const REPORT_SCHEMA: u64 = 1;
pub const TOOL: &str = "gprime";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Analyze,
    Prime(Method),
    Equivalence,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Analyze => "analyze",
            Command::Prime(_) => "prime",
            Command::Equivalence => "equivalence",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo {
            kind: e.kind(),
            message: e.to_string(),
            exit_code: e.exit_code(),
        }
    }
}

/// A non-primeness certificate. `kind` is one of `ideal_pair` (nonzero ideals
/// with zero product), `graded_pair`, `invariant_pair`, `isotropy_pair`,
/// `action_invariant_pair` or `hub_block` (a homogeneous element that kills
/// every component on one side of an object).
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<String>,
    pub elements: Vec<String>,
    pub replayed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Validation {
    pub valid: bool,
    pub structure: &'static str,
    /// Size of the graded ring, when it was built.
    pub graded_ring_size: Option<usize>,
    /// `Π |A_g|` for actions; `None` when it overflows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skew_size: Option<usize>,
    pub nearly_epsilon_strong: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nes_failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_action: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportView {
    pub morphisms: Vec<String>,
    pub objects: Vec<String>,
    pub connected: bool,
    pub carries_ring: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotropyView {
    pub object: String,
    pub order: usize,
    pub ring_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockView {
    pub degree: String,
    pub element: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HubView {
    pub object: String,
    pub support_hub: bool,
    pub blocking: Option<BlockView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NesView {
    pub holds: bool,
    pub by_definition: bool,
    pub by_local_units: bool,
    pub failure: Option<String>,
    pub certificate_entries: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedAnalysis {
    pub ring_size: usize,
    pub principal_part_size: usize,
    pub support: SupportView,
    pub isotropy: Vec<IsotropyView>,
    pub support_hubs: Vec<HubView>,
    pub nearly_epsilon_strong: NesView,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionIsotropyView {
    pub object: String,
    pub skew_ring_size: usize,
    pub skew_ring_prime: Option<bool>,
    pub a_e_g_prime: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupTypeView {
    pub group_type: bool,
    pub anchor: Option<String>,
    /// `[object, anchor morphism]` pairs.
    pub family: Vec<[String; 2]>,
    pub reason: Option<String>,
    pub isotropy: Vec<ActionIsotropyView>,
    /// Some isotropy skew group ring is prime; set only for group-type actions.
    pub verdict: Option<bool>,
    pub oracle: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnellView {
    pub holds: bool,
    pub connected: bool,
    pub coefficient_ring_prime: bool,
    pub normal_subgroups: Vec<(String, Option<Vec<String>>)>,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionAnalysis {
    pub global: bool,
    pub theorem: GroupTypeView,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connell: Option<ConnellView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub graded: Option<GradedAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionAnalysis>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictView {
    pub prime: bool,
    pub degenerate: bool,
    pub witness: Option<[String; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObjectView {
    pub object: String,
    pub isotropy_order: usize,
    pub isotropy_ring_size: usize,
    pub support_hub: bool,
    pub isotropy_prime: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimenessSection {
    pub verdict: Option<bool>,
    pub method: Method,
    /// `graded` when the graded ring was built, `group_type` when only the
    /// isotropy route of a partial action was available.
    pub route: &'static str,
    pub conditions: BTreeMap<String, Option<bool>>,
    pub agree: bool,
    pub oracle: Option<VerdictView>,
    pub oracle_skipped: bool,
    pub graded_prime: Option<VerdictView>,
    pub g_prime: Option<VerdictView>,
    pub nearly_epsilon_strong: Option<bool>,
    pub objects: Vec<ObjectView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_type: Option<GroupTypeView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub report_schema: u64,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<Analysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primeness: Option<PrimenessSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fuzz: Option<FuzzSummary>,
    pub witnesses: Vec<Witness>,
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl ReportDocument {
    pub fn empty(command: &str) -> Self {
        ReportDocument {
            tool: TOOL,
            version: VERSION,
            report_schema: REPORT_SCHEMA,
            command: command.to_string(),
            instance: None,
            bounds: None,
            validation: None,
            analysis: None,
            primeness: None,
            fuzz: None,
            witnesses: Vec::new(),
            error: None,
            timings_ms: None,
        }
    }

    pub fn from_error(command: &str, e: &Error) -> Self {
        let mut doc = Self::empty(command);
        doc.error = Some(e.into());
        doc
    }

    pub fn exit_code(&self) -> i32 {
        if let Some(e) = &self.error {
            return e.exit_code;
        }
        match &self.fuzz {
            Some(f) if f.disagreements > 0 => 3,
            Some(f) if f.invalid > 0 => 1,
            _ => 0,
        }
    }

    /// Every emitted witness replayed successfully.
    pub fn witnesses_replay(&self) -> bool {
        self.witnesses.iter().all(|w| w.replayed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let v = serde_json::to_value(self).expect("reports serialize");
        let mut out = String::new();
        text_lines(&v, 0, &mut out);
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn text_lines(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_lines(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        text_lines(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

// ---------------------------------------------------------------- views

fn verdict_view(ring: &FiniteRing, v: &PrimeVerdict) -> VerdictView {
    VerdictView {
        prime: v.prime,
        degenerate: v.degenerate,
        witness: v.witness.map(|(a, b)| [ring.render(a), ring.render(b)]),
    }
}

fn pair_witness(kind: &'static str, ring: &FiniteRing, object: Option<String>, (a, b): (Elem, Elem), replayed: bool) -> Witness {
    Witness {
        kind,
        object,
        degree: None,
        elements: vec![ring.render(a), ring.render(b)],
        replayed,
    }
}

fn graded_analysis(s: &Grading) -> Result<GradedAnalysis> {
    let gr = s.groupoid();
    let support = s.support_groupoid();
    let mut isotropy = Vec::new();
    let mut support_hubs = Vec::new();
    for &e in &support.objects {
        isotropy.push(IsotropyView {
            object: gr.object_label(e).to_string(),
            order: gr.isotropy_morphisms(e).len(),
            ring_size: s.isotropy_component(e)?.ring().size(),
        });
        let hub = s.is_support_hub(e)?;
        support_hubs.push(HubView {
            object: gr.object_label(e).to_string(),
            support_hub: hub.hub,
            blocking: hub.blocking.map(|(g, a)| BlockView {
                degree: gr.morphism_label(g).to_string(),
                element: s.ring().render(a),
            }),
        });
    }
    let nes = s.nearly_epsilon_strong();
    Ok(GradedAnalysis {
        ring_size: s.ring().size(),
        principal_part_size: s.principal_part().len(),
        support: SupportView {
            morphisms: support.morphisms.iter().map(|&g| gr.morphism_label(g).to_string()).collect(),
            objects: support.objects.iter().map(|&e| gr.object_label(e).to_string()).collect(),
            connected: support.connected,
            carries_ring: support.carries_ring,
        },
        isotropy,
        support_hubs,
        nearly_epsilon_strong: NesView {
            holds: nes.holds,
            by_definition: nes.by_definition,
            by_local_units: nes.by_local_units,
            failure: nes.failure.as_ref().map(|(g, r)| format!("{r} at {}", gr.morphism_label(*g))),
            certificate_entries: nes.certificate.len(),
        },
    })
}

fn group_type_view(action: &PartialAction, t: &GroupTypeVerdict) -> GroupTypeView {
    let gr = action.groupoid();
    GroupTypeView {
        group_type: t.group_type.holds,
        anchor: t.group_type.anchor.map(|e| gr.object_label(e).to_string()),
        family: t
            .group_type
            .family
            .iter()
            .map(|&(f, h)| [gr.object_label(f).to_string(), gr.morphism_label(h).to_string()])
            .collect(),
        reason: t.group_type.reason.clone(),
        isotropy: t
            .isotropy
            .iter()
            .map(|v| ActionIsotropyView {
                object: v.label.clone(),
                skew_ring_size: v.ring_size,
                skew_ring_prime: v.prime.as_ref().map(|p| p.prime),
                a_e_g_prime: v.a_e_g_prime.as_ref().map(|p| p.prime),
            })
            .collect(),
        verdict: t.verdict,
        oracle: t.oracle.as_ref().map(|p| p.prime),
    }
}

/// Witnesses from the isotropy route: pairs in the isotropy skew group rings
/// and invariant ideal pairs of `A_e`.
fn group_type_witnesses(action: &PartialAction, t: &GroupTypeVerdict, bounds: &Bounds) -> Result<Vec<Witness>> {
    let mut out = Vec::new();
    for v in &t.isotropy {
        let local = action.restrict_to_isotropy(v.object)?;
        if let Some((a, b)) = v.prime.as_ref().and_then(|p| p.witness) {
            let skew = build_skew_ring(&local, bounds.ring)?;
            let ok = replay_ideal_witness(skew.ring(), a, b);
            out.push(pair_witness("isotropy_pair", skew.ring(), Some(v.label.clone()), (a, b), ok));
        }
        if let Some((a, b)) = v.a_e_g_prime.as_ref().and_then(|p| p.witness) {
            out.push(pair_witness(
                "action_invariant_pair",
                local.ambient(),
                Some(v.label.clone()),
                (a, b),
                replay_action_witness(&local, a, b),
            ));
        }
    }
    Ok(out)
}

/// Both invariant closures are nonzero, invariant, and multiply to zero.
pub fn replay_action_witness(action: &PartialAction, a: Elem, b: Elem) -> bool {
    let ia = action.invariant_closure(&[a]);
    let ib = action.invariant_closure(&[b]);
    !ia.is_zero()
        && !ib.is_zero()
        && action.is_sigma_invariant(&ia, None)
        && action.is_sigma_invariant(&ib, None)
        && ia.annihilates(&ib)
}

/// Witnesses carried by a primeness report, each replayed.
pub fn primeness_witnesses(s: &Grading, r: &PrimenessReport) -> Result<Vec<Witness>> {
    let gr = s.groupoid();
    let ring = s.ring();
    let mut out = Vec::new();
    if let Some(w) = r.oracle.as_ref().and_then(|v| v.witness) {
        out.push(pair_witness("ideal_pair", ring, None, w, replay_ideal_witness(ring, w.0, w.1)));
    }
    if let Some(w) = r.graded.as_ref().and_then(|v| v.witness) {
        out.push(pair_witness("graded_pair", ring, None, w, replay_graded_witness(s, w.0, w.1)));
    }
    if let Some(w) = r.g_prime.as_ref().and_then(|v| v.witness) {
        out.push(pair_witness("invariant_pair", ring, None, w, replay_invariant_witness(s, w.0, w.1)));
    }
    for o in &r.objects {
        if let Some(w) = o.isotropy_prime.as_ref().and_then(|v| v.witness) {
            let iso = s.isotropy_component(o.object)?;
            let ok = replay_ideal_witness(iso.ring(), w.0, w.1);
            out.push(pair_witness("isotropy_pair", iso.ring(), Some(o.label.clone()), w, ok));
        }
        if let Some((g, a)) = o.hub.blocking {
            out.push(Witness {
                kind: "hub_block",
                object: Some(o.label.clone()),
                degree: Some(gr.morphism_label(g).to_string()),
                elements: vec![ring.render(a)],
                replayed: replay_hub_block(s, o.object, g, a),
            });
        }
    }
    Ok(out)
}

fn primeness_section(s: &Grading, r: &PrimenessReport) -> PrimenessSection {
    let ring = s.ring();
    PrimenessSection {
        verdict: r.verdict,
        method: r.method,
        route: "graded",
        conditions: r.conditions.clone(),
        agree: r.agree(),
        oracle: r.oracle.as_ref().map(|v| verdict_view(ring, v)),
        oracle_skipped: r.oracle_skipped,
        graded_prime: r.graded.as_ref().map(|v| verdict_view(ring, v)),
        g_prime: r.g_prime.as_ref().map(|v| verdict_view(ring, v)),
        nearly_epsilon_strong: Some(r.nearly_epsilon_strong),
        objects: r
            .objects
            .iter()
            .map(|o| ObjectView {
                object: o.label.clone(),
                isotropy_order: o.isotropy_order,
                isotropy_ring_size: o.isotropy_ring_size,
                support_hub: o.hub.hub,
                isotropy_prime: o.isotropy_prime.as_ref().map(|v| v.prime),
            })
            .collect(),
        group_type: None,
    }
}

// ---------------------------------------------------------------- commands

/// Options shared by the instance commands.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Replaces `bounds.ring` from the instance.
    pub max_ring: Option<usize>,
    pub timings: bool,
}

struct Clock {
    on: bool,
    start: Instant,
    marks: BTreeMap<String, f64>,
}

impl Clock {
    fn new(on: bool) -> Self {
        Clock {
            on,
            start: Instant::now(),
            marks: BTreeMap::new(),
        }
    }

    fn mark(&mut self, what: &str) {
        if self.on {
            let now = Instant::now();
            self.marks.insert(what.to_string(), (now - self.start).as_secs_f64() * 1e3);
            self.start = now;
        }
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.on.then_some(self.marks)
    }
}

/// The graded ring, or `None` when an action's skew ring is above the bound.
fn try_grading(inst: &Instance, bounds: &Bounds) -> Result<Option<Grading>> {
    let mut copy = inst.clone();
    copy.bounds = *bounds;
    match copy.grading() {
        Ok(s) => Ok(Some(s)),
        Err(Error::BoundExceeded { .. }) if !matches!(inst.structure, Structure::Grading(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn action_analysis(inst: &Instance, action: &PartialAction, bounds: &Bounds) -> Result<(ActionAnalysis, GroupTypeVerdict)> {
    let t = group_type_theorem(action, bounds)?;
    let connell = match inst.structure {
        Structure::GroupoidRing => {
            let c = connell_check(&inst.ring, &inst.groupoid, bounds)?;
            Some(ConnellView {
                holds: c.holds,
                connected: c.connected,
                coefficient_ring_prime: c.ring_prime.prime,
                normal_subgroups: c.normal_subgroups,
                reasons: c.reasons,
            })
        }
        _ => None,
    };
    Ok((
        ActionAnalysis {
            global: action.is_global(),
            theorem: group_type_view(action, &t),
            connell,
        },
        t,
    ))
}

fn skew_bound_error(action: &PartialAction, bounds: &Bounds) -> Error {
    Error::bound("skew ring", action.skew_size().unwrap_or(usize::MAX), bounds.ring)
}

fn fill(doc: &mut ReportDocument, inst: &Instance, command: Command, bounds: &Bounds, clock: &mut Clock) -> Result<()> {
    let action = inst.action()?;
    clock.mark("action");
    let grading = try_grading(inst, bounds)?;
    clock.mark("grading");
    match command {
        Command::Validate => {
            let nes = grading.as_ref().map(|s| s.nearly_epsilon_strong());
            doc.validation = Some(Validation {
                valid: true,
                structure: inst.structure.kind(),
                graded_ring_size: grading.as_ref().map(|s| s.ring().size()),
                skew_size: action.as_ref().and_then(|a| a.skew_size()),
                nearly_epsilon_strong: nes.map(|n| n.holds),
                nes_failure: nes.and_then(|n| n.failure.as_ref()).map(|(g, r)| {
                    format!("{r} at {}", inst.groupoid.morphism_label(*g))
                }),
                global_action: action.as_ref().map(|a| a.is_global()),
                note: grading
                    .is_none()
                    .then(|| format!("skew ring above the ring bound {}; action axioms checked only", bounds.ring)),
            });
        }
        Command::Analyze => {
            let graded = grading.as_ref().map(graded_analysis).transpose()?;
            clock.mark("graded_analysis");
            let act = match &action {
                Some(a) => {
                    let (view, t) = action_analysis(inst, a, bounds)?;
                    doc.witnesses.extend(group_type_witnesses(a, &t, bounds)?);
                    Some(view)
                }
                None => None,
            };
            clock.mark("action_analysis");
            if let Some(s) = &grading {
                for e in s.support_groupoid().objects {
                    if let Some((g, a)) = s.is_support_hub(e)?.blocking {
                        doc.witnesses.push(Witness {
                            kind: "hub_block",
                            object: Some(s.groupoid().object_label(e).to_string()),
                            degree: Some(s.groupoid().morphism_label(g).to_string()),
                            elements: vec![s.ring().render(a)],
                            replayed: replay_hub_block(s, e, g, a),
                        });
                    }
                }
            }
            doc.analysis = Some(Analysis { graded, action: act });
        }
        Command::Prime(_) | Command::Equivalence => {
            let (method, equivalence) = match command {
                Command::Prime(m) => (m, false),
                _ => (Method::All, true),
            };
            match (&grading, &action) {
                (Some(s), _) => {
                    let r = if equivalence {
                        equivalence_report(s, bounds)?
                    } else {
                        primeness_report(s, method, bounds)?
                    };
                    clock.mark("primeness");
                    doc.witnesses.extend(primeness_witnesses(s, &r)?);
                    doc.primeness = Some(primeness_section(s, &r));
                }
                (None, Some(a)) => {
                    if equivalence || method == Method::Oracle {
                        return Err(skew_bound_error(a, bounds));
                    }
                    let t = group_type_theorem(a, bounds)?;
                    clock.mark("group_type_theorem");
                    doc.witnesses.extend(group_type_witnesses(a, &t, bounds)?);
                    let view = group_type_view(a, &t);
                    doc.primeness = Some(PrimenessSection {
                        verdict: t.verdict,
                        method,
                        route: "group_type",
                        conditions: BTreeMap::new(),
                        agree: true,
                        oracle: None,
                        oracle_skipped: true,
                        graded_prime: None,
                        g_prime: None,
                        nearly_epsilon_strong: None,
                        objects: Vec::new(),
                        group_type: Some(view),
                    });
                    if t.verdict.is_none() {
                        return Err(skew_bound_error(a, bounds));
                    }
                }
                (None, None) => unreachable!("gradings are always built"),
            }
            if let Some(p) = &doc.primeness {
                if p.verdict.is_none() {
                    return Err(Error::bound("ring for a primeness verdict", inst.ring.size(), bounds.ring));
                }
            }
        }
    }
    Ok(())
}

/// Runs one instance command. Errors are recorded in the document.
pub fn run(command: Command, inst: &Instance, opts: RunOptions) -> ReportDocument {
    let mut clock = Clock::new(opts.timings);
    let mut bounds = inst.bounds;
    if let Some(m) = opts.max_ring {
        bounds.ring = m;
    }
    let mut doc = ReportDocument::empty(command.name());
    doc.instance = Some(inst.summary());
    doc.bounds = Some(bounds);
    if let Err(e) = fill(&mut doc, inst, command, &bounds, &mut clock) {
        if command == Command::Validate && e.exit_code() == 1 {
            doc.validation = Some(Validation {
                valid: false,
                structure: inst.structure.kind(),
                graded_ring_size: None,
                skew_size: None,
                nearly_epsilon_strong: None,
                nes_failure: None,
                global_action: None,
                note: None,
            });
        }
        doc.error = Some((&e).into());
    }
    doc.timings_ms = clock.finish();
    doc
}
