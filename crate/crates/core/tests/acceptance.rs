//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gprime_core::fuzz::{run_fuzz, FuzzSummary};
use gprime_core::graded::Grading;
use gprime_core::instance::{parse_instance_file, Instance, Structure};
use gprime_core::partial_action::{connell_check, group_type_theorem};
use gprime_core::primeness::{equivalence_report, is_prime_oracle, primeness_report, Bounds, Method};
use gprime_core::report::{run, Command, RunOptions};

const FUZZ_SEED: u64 = 7;
const FUZZ_COUNT: usize = 300;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load(name: &str) -> Instance {
    let p = fixtures_dir().join(name);
    parse_instance_file(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Every fixture, with its path relative to the fixture directory.
fn corpus() -> Vec<(String, Instance)> {
    let mut out = Vec::new();
    for sub in ["", "connell"] {
        let dir = fixtures_dir().join(sub);
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for p in paths {
            let name = p.strip_prefix(fixtures_dir()).unwrap().display().to_string();
            out.push((name, parse_instance_file(&p).unwrap()));
        }
    }
    out
}

/// Graded rings of the corpus that fit the default bound.
fn built(corpus: &[(String, Instance)]) -> Vec<(String, Grading)> {
    corpus
        .iter()
        .filter_map(|(n, i)| i.grading().ok().map(|s| (n.clone(), s)))
        .collect()
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fuzz_clean(f: &FuzzSummary) -> Result<(), String> {
    ensure(
        f.disagreements == 0 && f.invalid == 0,
        format!("fuzz: {} disagreements, {} invalid: {:?}", f.disagreements, f.invalid, f.failures),
    )
}

fn prop(f: &FuzzSummary, name: &str) -> usize {
    f.properties.get(name).copied().unwrap_or(0)
}

fn seven_way(f: &FuzzSummary, graded: &[(String, Grading)], fuzz_time: Duration) -> Outcome {
    fuzz_clean(f)?;
    ensure(
        f.nearly_epsilon_strong >= 200,
        format!("only {} nearly epsilon-strong fuzz instances", f.nearly_epsilon_strong),
    )?;
    ensure(prop(f, "seven_way_equivalence") == f.nearly_epsilon_strong, "some fuzz instance skipped the harness")?;
    let b = Bounds::default();
    let mut n = 0;
    for (name, s) in graded {
        if s.is_nearly_epsilon_strong().unwrap() {
            let r = equivalence_report(s, &b).map_err(|e| format!("{name}: {e}"))?;
            ensure(r.agree() && r.conditions.values().all(Option::is_some), format!("{name}: {:?}", r.conditions))?;
            n += 1;
        }
    }
    ensure(fuzz_time < Duration::from_secs(600), format!("fuzz took {fuzz_time:?}"))?;
    Ok(format!("{} fuzz instances and {n} fixtures agree; fuzz {:.1}s", f.nearly_epsilon_strong, fuzz_time.as_secs_f64()))
}

fn oracle_concordance(f: &FuzzSummary, graded: &[(String, Grading)]) -> Outcome {
    fuzz_clean(f)?;
    let b = Bounds::default();
    let mut n = 0;
    for (name, s) in graded {
        if !s.is_nearly_epsilon_strong().unwrap() {
            continue;
        }
        let r = primeness_report(s, Method::All, &b).map_err(|e| format!("{name}: {e}"))?;
        if let (Some(o), Some(Some(t))) = (&r.oracle, r.conditions.get("vii")) {
            ensure(o.prime == *t, format!("{name}: oracle {} theorem {t}", o.prime))?;
            n += 1;
        }
    }
    Ok(format!("{} fuzz instances, {n} fixtures", prop(f, "oracle_concordance")))
}

fn m3_fixture() -> Outcome {
    let t = Instant::now();
    let s = load("m3_pair_groupoid.json").grading().map_err(|e| e.to_string())?;
    ensure(s.is_nearly_epsilon_strong().unwrap(), "not nearly epsilon-strong")?;
    let r = equivalence_report(&s, &Bounds::default()).map_err(|e| e.to_string())?;
    ensure(r.conditions.values().all(|v| *v == Some(true)), format!("{:?}", r.conditions))?;
    ensure(r.oracle.as_ref().is_some_and(|o| o.prime), "oracle says not prime")?;
    let el = t.elapsed();
    ensure(el < Duration::from_secs(5), format!("took {el:?}"))?;
    Ok(format!("512 elements, seven conditions true, {:.2}s", el.as_secs_f64()))
}

fn block_diagonal_fixture() -> Outcome {
    let s = load("block_diagonal.json").grading().map_err(|e| e.to_string())?;
    let gr = s.groupoid();
    let hub = |l: &str| s.is_support_hub(gr.object_by_label(l).unwrap()).unwrap().hub;
    ensure(hub("f2") && !hub("f1") && !hub("f3"), "support-hub pattern differs")?;
    let g = s.is_graded_prime(4096).map_err(|e| e.to_string())?;
    let (a, b) = g.witness.ok_or("graded prime")?;
    ensure(!g.prime && s.degree(a).is_some() && s.degree(b).is_some(), "witness not homogeneous")?;
    ensure(gprime_core::primeness::replay_graded_witness(&s, a, b), "witness does not replay")?;
    ensure(!is_prime_oracle(&s, &Bounds::default()).unwrap().prime, "oracle says prime")?;
    Ok(format!("hub only at f2; graded witness ({}, {})", s.ring().render(a), s.ring().render(b)))
}

fn disconnected_fixture() -> Outcome {
    let inst = load("disconnected_groupoid_ring.json");
    let s = inst.grading().map_err(|e| e.to_string())?;
    ensure(!is_prime_oracle(&s, &Bounds::default()).unwrap().prime, "oracle says prime")?;
    let c = connell_check(&inst.ring, &inst.groupoid, &Bounds::default()).map_err(|e| e.to_string())?;
    ensure(!c.connected && !c.holds, "connell_check reports connected")?;
    Ok("not prime; groupoid not connected".into())
}

fn connell_concordance(corpus: &[(String, Instance)]) -> Outcome {
    let b = Bounds::default();
    let mut n = 0;
    let verdict = |name: &str| -> Result<bool, String> {
        let (_, inst) = corpus.iter().find(|(n, _)| n == name).ok_or(format!("missing {name}"))?;
        Ok(is_prime_oracle(&inst.grading().map_err(|e| e.to_string())?, &b).unwrap().prime)
    };
    ensure(!verdict("connell/f2_c2.json")?, "F2[C2] prime")?;
    ensure(verdict("connell/f2_p2.json")?, "F2[P2] not prime")?;
    for (name, inst) in corpus {
        if !matches!(inst.structure, Structure::GroupoidRing) {
            continue;
        }
        let s = inst.grading().map_err(|e| format!("{name}: {e}"))?;
        let o = is_prime_oracle(&s, &b).unwrap().prime;
        let c = connell_check(&inst.ring, &inst.groupoid, &b).map_err(|e| format!("{name}: {e}"))?;
        ensure(c.holds == o, format!("{name}: criterion {} oracle {o}", c.holds))?;
        n += 1;
    }
    Ok(format!("{n} groupoid rings"))
}

fn bijection(f: &FuzzSummary, graded: &[(String, Grading)]) -> Outcome {
    fuzz_clean(f)?;
    let b = Bounds::default();
    let mut n = 0;
    for (name, s) in graded {
        if s.ring().size() > b.enumeration || !s.is_nearly_epsilon_strong().unwrap() {
            continue;
        }
        let gi = s.enumerate_graded_ideals(usize::MAX, b.enumeration).unwrap();
        let ji = s.enumerate_invariant_ideals(usize::MAX, b.enumeration).unwrap();
        for i in &gi.ideals {
            ensure(s.psi(&s.phi(i).unwrap()).unwrap() == *i, format!("{name}: ψφ ≠ id"))?;
        }
        for j in &ji.ideals {
            ensure(s.phi(&s.psi(j).unwrap()).unwrap() == *j, format!("{name}: φψ ≠ id"))?;
        }
        n += 1;
    }
    Ok(format!("{} fuzz instances, {n} fixtures", prop(f, "phi_psi_bijection")))
}

fn graded_iff_g_prime(f: &FuzzSummary, graded: &[(String, Grading)]) -> Outcome {
    fuzz_clean(f)?;
    for (name, s) in graded {
        let g = s.is_graded_prime(4096).unwrap().prime;
        let p = s.is_g_prime_principal(4096).unwrap().prime;
        ensure(g == p, format!("{name}: graded {g}, G-prime {p}"))?;
    }
    Ok(format!("{} fuzz instances, {} fixtures", prop(f, "graded_iff_g_prime"), graded.len()))
}

fn global_chain(f: &FuzzSummary) -> Outcome {
    fuzz_clean(f)?;
    let n = prop(f, "global_action_chain");
    ensure(n > 0, "no global actions checked")?;
    let flip = load("global_flip.json");
    let a = flip.action().unwrap().unwrap();
    let r = gprime_core::partial_action::global_action_check(&a, &Bounds::default()).map_err(|e| e.to_string())?;
    ensure(r.support_connected && r.every_hub && r.prime == r.some_isotropy_prime, format!("{r:?}"))?;
    Ok(format!("{n} global actions"))
}

fn partial_fixtures() -> Outcome {
    let s = load("partial_zero_ag.json").grading().map_err(|e| e.to_string())?;
    ensure(!s.is_graded_prime(4096).unwrap().prime, "zero A_g example graded prime")?;
    let inst = load("gf4_frobenius.json");
    let a = inst.action().unwrap().unwrap();
    let t = group_type_theorem(&a, &Bounds::default()).map_err(|e| e.to_string())?;
    let e = t.isotropy.iter().find(|v| v.label == "e").ok_or("no object e")?;
    ensure(e.a_e_g_prime.as_ref().is_some_and(|v| !v.prime), "A_e is G_e^e-prime")?;
    ensure(t.verdict == Some(false), format!("verdict {:?}", t.verdict))?;
    Ok(format!("skew ring of {} elements decided by isotropy", a.skew_size().map_or("overflowing".into(), |n| n.to_string())))
}

fn witness_replay(f: &FuzzSummary, corpus: &[(String, Instance)]) -> Outcome {
    ensure(f.witnesses == f.witnesses_replayed, format!("fuzz {}/{}", f.witnesses_replayed, f.witnesses))?;
    let mut total = f.witnesses;
    for (name, inst) in corpus {
        for cmd in [Command::Prime(Method::All), Command::Analyze] {
            let doc = run(cmd, inst, RunOptions::default());
            ensure(doc.error.is_none(), format!("{name}: {:?}", doc.error))?;
            ensure(doc.witnesses_replay(), format!("{name}: a witness failed to replay"))?;
            total += doc.witnesses.len();
        }
    }
    Ok(format!("{total} witnesses replayed"))
}

fn main() -> ExitCode {
    let corpus = corpus();
    let graded = built(&corpus);
    let t = Instant::now();
    let fuzz = run_fuzz(FUZZ_SEED, FUZZ_COUNT, 4096);
    let fuzz_time = t.elapsed();
    let results: Vec<(&str, Outcome)> = vec![
        ("seven-way equivalence", seven_way(&fuzz, &graded, fuzz_time)),
        ("oracle concordance", oracle_concordance(&fuzz, &graded)),
        ("m3_pair_groupoid fixture", m3_fixture()),
        ("block_diagonal fixture", block_diagonal_fixture()),
        ("disconnected_groupoid_ring fixture", disconnected_fixture()),
        ("connell concordance", connell_concordance(&corpus)),
        ("phi/psi bijection", bijection(&fuzz, &graded)),
        ("graded prime iff G-prime", graded_iff_g_prime(&fuzz, &graded)),
        ("global-action chain", global_chain(&fuzz)),
        ("partial-action fixtures", partial_fixtures()),
        ("witness self-verification", witness_replay(&fuzz, &corpus)),
    ];
    let mut failed = 0;
    for (k, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {:>2} PASS {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
