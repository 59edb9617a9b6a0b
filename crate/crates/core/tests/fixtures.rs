use std::path::Path;

use gprime_core::groupoid::Obj;
use gprime_core::instance::{parse_instance_file, Instance};
use gprime_core::partial_action::{connell_check, group_type_theorem, sufficient_conditions_report};
use gprime_core::primeness::{
    equivalence_report, evaluate_condition, is_prime_oracle, object_evidence, torsion_free_shortcut, Bounds,
};
use gprime_core::report::{run, Command, RunOptions};
use gprime_core::Error;

fn load(name: &str) -> Instance {
    parse_instance_file(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)).unwrap()
}

fn obj(inst: &Instance, label: &str) -> Obj {
    inst.groupoid.object_by_label(label).unwrap()
}

#[test]
fn m3_everything_true() {
    let inst = load("m3_pair_groupoid.json");
    let s = inst.grading().unwrap();
    assert_eq!(s.ring().size(), 512);
    let r = equivalence_report(&s, &Bounds::default()).unwrap();
    assert!(r.conditions.values().all(|v| *v == Some(true)));
    assert!(r.objects.iter().all(|o| o.hub.hub && o.isotropy_ring_size == 2));
    assert_eq!(torsion_free_shortcut(&s, obj(&inst, "f1"), &Bounds::default()).unwrap(), Some(true));
}

#[test]
fn block_diagonal_per_object() {
    let inst = load("block_diagonal.json");
    let s = inst.grading().unwrap();
    let b = Bounds::default();
    let ev = object_evidence(&s, &b).unwrap();
    let hubs: Vec<(String, bool)> = ev.iter().map(|o| (o.label.clone(), o.hub.hub)).collect();
    assert_eq!(hubs, [("f1".into(), false), ("f2".into(), true), ("f3".into(), false)]);
    // S_{f2} = F2 e22 + F2 e33 is a product of two fields
    let f2 = ev.iter().find(|o| o.label == "f2").unwrap();
    assert_eq!(f2.isotropy_ring_size, 4);
    assert_eq!(f2.isotropy_prime.as_ref().map(|v| v.prime), Some(false));
    assert_eq!(evaluate_condition(&s, "vii", &ev, &b).unwrap(), Some(false));
}

#[test]
fn disconnected_groupoid_ring_all_false() {
    let inst = load("disconnected_groupoid_ring.json");
    let s = inst.grading().unwrap();
    let b = Bounds::default();
    let r = equivalence_report(&s, &b).unwrap();
    assert!(r.conditions.values().all(|v| *v == Some(false)));
    assert_eq!(torsion_free_shortcut(&s, obj(&inst, "e"), &b).unwrap(), Some(false));
    let c = connell_check(&inst.ring, &inst.groupoid, &b).unwrap();
    assert!(!c.connected && !c.holds);
}

#[test]
fn group_ring_c2_all_false() {
    let s = load("group_ring_z2.json").grading().unwrap();
    let r = equivalence_report(&s, &Bounds::default()).unwrap();
    assert!(r.conditions.values().all(|v| *v == Some(false)));
}

#[test]
fn g8_shortcut_not_applicable() {
    let inst = load("connell/f2_g8.json");
    let s = inst.grading().unwrap();
    assert_eq!(torsion_free_shortcut(&s, obj(&inst, "e"), &Bounds::default()).unwrap(), None);
}

#[test]
fn zero_ag_not_graded_prime() {
    let inst = load("partial_zero_ag.json");
    let s = inst.grading().unwrap();
    assert_eq!(s.ring().size(), 4);
    assert!(!s.is_graded_prime(4096).unwrap().prime);
    let suff = sufficient_conditions_report(&inst.action().unwrap().unwrap(), &Bounds::default()).unwrap();
    assert!(!suff.implies_prime);
    assert_eq!(suff.oracle, Some(false));
}

#[test]
fn global_flip_is_prime() {
    let s = load("global_flip.json").grading().unwrap();
    assert_eq!(s.ring().size(), 16);
    assert!(is_prime_oracle(&s, &Bounds::default()).unwrap().prime);
}

#[test]
fn gf4_frobenius_needs_isotropy_route() {
    let inst = load("gf4_frobenius.json");
    assert!(matches!(inst.grading(), Err(Error::BoundExceeded { .. })));
    let a = inst.action().unwrap().unwrap();
    let t = group_type_theorem(&a, &Bounds::default()).unwrap();
    assert!(t.group_type.holds);
    assert_eq!(t.verdict, Some(false));
    assert!(t.isotropy.iter().all(|v| v.ring_size == 64));
}

#[test]
fn reports_replay_and_match_fixture_digests() {
    for name in ["m3_pair_groupoid.json", "block_diagonal.json", "partial_zero_ag.json", "gf4_frobenius.json"] {
        let inst = load(name);
        let doc = run(Command::Analyze, &inst, RunOptions::default());
        assert!(doc.error.is_none(), "{name}: {:?}", doc.error);
        assert!(doc.witnesses_replay());
        assert_eq!(doc.instance.unwrap().digest, inst.digest);
    }
}
