//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cfc_core::alpha::alpha_eq_ty;
use cfc_core::parser::{parse_program, parse_stype, parse_type};
use cfc_core::program::{load, Loaded, Program};
use cfc_core::rewrite::{join, normalize, reducible_redexes, step_at};
use cfc_core::surface::{infer_constraints, Pred, SType};
use cfc_core::{Name, Type};
use cfc_harness::enumerate::{enumerate_small, nat_signature};
use cfc_harness::suites::roundtrip_violation;
use cfc_harness::{fuzz, unify_oracle, FuzzConfig, Report, Suite};

const SEED: u64 = 0x00c0_ffee;
const WORLDS: usize = 100;
const SIZE: usize = 6;

type Outcome = Result<String, String>;
/// Name, check and time limit.
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus(file: &str) -> Result<Loaded, String> {
    let path = corpus_dir().join(file);
    let src = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let p = parse_program(&src).map_err(|e| format!("{file}: {e}"))?;
    Ok(load(&p))
}

fn ty(l: &Loaded, src: &str) -> Result<Type, String> {
    parse_type(src, &l.sig.families.keys().cloned().collect()).map_err(|e| e.to_string())
}

fn expect_normal(l: &Loaded, src: &str, want: &str) -> Result<(), String> {
    let t = ty(l, src)?;
    let n = normalize(&l.sig, &t).map_err(|_| format!("normalizing {src} ran out of fuel"))?;
    let w = ty(l, want)?;
    if alpha_eq_ty(&n.ty, &w) {
        Ok(())
    } else {
        Err(format!("{src} normalized to {} instead of {want}", n.ty))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn codes(l: &Loaded) -> Vec<String> {
    l.diagnostics.iter().map(|d| d.code.clone()).collect()
}

fn ok_loaded(file: &str) -> Result<Loaded, String> {
    let l = corpus(file)?;
    ensure(l.ok(), || format!("{file}: {:?}", codes(&l)))?;
    Ok(l)
}

fn corpus_regressions() -> Outcome {
    let equ = ok_loaded("equ.cfc")?;
    expect_normal(&equ, "Equ Int Bool", "False")?;
    expect_normal(&equ, "Equ Int Int", "True")?;
    let plus = ok_loaded("plus.cfc")?;
    expect_normal(&plus, "Plus (S (S Z)) (S Z)", "S (S (S Z))")?;
    let only = ok_loaded("onlyint.cfc")?;
    expect_normal(&only, "OnlyInt Bool", "OnlyInt Bool")?;
    for bad in ["loop_bad.cfc", "loopy_bad.cfc"] {
        let l = corpus(bad)?;
        ensure(codes(&l) == ["FamilyInRHS"], || format!("{bad}: expected FamilyInRHS, got {:?}", codes(&l)))?;
    }
    ok_loaded("loopy.cfc")?;
    let col = ok_loaded("collects.cfc")?;
    let env = &col.elaboration.env;
    let sigma = parse_stype("Elem c -> c -> c", &env.families.keys().cloned().collect()).map_err(|e| e.to_string())?;
    let got = infer_constraints(env, &[Name::new("c")], &sigma);
    let want = vec![Pred::new("Collects", vec![SType::var("c")])];
    ensure(got == want, || format!("Collects inference gave {got:?}"))?;
    Ok("7 regressions".into())
}

fn require(r: &Report, key: &str, min: usize) -> Result<(), String> {
    ensure(r.count(key) >= min, || format!("only {} {key}, need {min}", r.count(key)))
}

fn clean(r: &Report) -> Result<(), String> {
    match r.failures.first() {
        None => Ok(()),
        Some(f) => Err(format!(
            "{} failure(s); first (world {}, case {}): {}\n      minimized: {}",
            r.failures.len(),
            f.world,
            f.case,
            f.message,
            f.minimized
        )),
    }
}

fn config(cases: usize) -> FuzzConfig {
    FuzzConfig { seed: SEED, cases, worlds: WORLDS, size: SIZE }
}

fn preservation() -> Outcome {
    let r = fuzz(Suite::Preservation, &config(12_000));
    clean(&r)?;
    require(&r, "expressions", 10_000)?;
    ensure(r.worlds >= 100, || format!("only {} worlds", r.worlds))?;
    Ok(format!("{} expressions, {} steps, {} worlds", r.count("expressions"), r.count("steps"), r.worlds))
}

fn progress() -> Outcome {
    let r = fuzz(Suite::Progress, &config(12_000));
    clean(&r)?;
    require(&r, "expressions", 10_000)?;
    Ok(format!(
        "{} expressions: {} values, {} coerced values, {} out of fuel",
        r.count("expressions"),
        r.count("values"),
        r.count("coerced_values"),
        r.count("fuel_exhausted")
    ))
}

fn measure() -> Outcome {
    let r = fuzz(Suite::Measure, &config(30_000));
    clean(&r)?;
    require(&r, "steps", 50_000)?;
    Ok(format!("{} steps over {} types", r.count("steps"), r.count("types")))
}

/// Every peak among small closed types over unary naturals joins.
fn exhaustive_peaks() -> Result<usize, String> {
    let sig = nat_signature();
    let mut peaks = 0;
    for t in enumerate_small(3) {
        let reds = reducible_redexes(&sig, &t);
        for i in 0..reds.len() {
            for j in i + 1..reds.len() {
                let a = step_at(&sig, &t, &reds[i]).ok_or("redex does not step")?;
                let b = step_at(&sig, &t, &reds[j]).ok_or("redex does not step")?;
                peaks += 1;
                ensure(join(&sig, &a.ty, &b.ty).is_some(), || format!("peak at {t} does not join"))?;
            }
        }
    }
    Ok(peaks)
}

fn local_confluence() -> Outcome {
    let r = fuzz(Suite::LocalConfluence, &config(10_000));
    clean(&r)?;
    require(&r, "peaks", 5_000)?;
    let s = fuzz(Suite::Strategy, &config(12_000));
    clean(&s)?;
    require(&s, "types", 10_000)?;
    let exhaustive = exhaustive_peaks()?;
    Ok(format!(
        "{} peaks, {} types under 3 strategies ({} with families), {} exhaustive peaks",
        r.count("peaks"),
        s.count("types"),
        s.count("types_with_families"),
        exhaustive
    ))
}

fn consistency() -> Outcome {
    let r = fuzz(Suite::Consistency, &config(6_000));
    clean(&r)?;
    require(&r, "coercions", 5_000)?;
    Ok(format!("{} coercions, {} with proper endpoints", r.count("coercions"), r.count("proper_endpoints")))
}

fn apart_stability() -> Outcome {
    let r = fuzz(Suite::ApartStability, &config(30_000));
    clean(&r)?;
    require(&r, "triples", 10_000)?;
    Ok(format!("{} apart triples ({} non-apart draws skipped)", r.count("triples"), r.count("not_apart")))
}

fn unify_equivalence() -> Outcome {
    let r = unify_oracle();
    clean(&r)?;
    Ok(format!(
        "{} pairs, {} unifiable, {} ground substitutions",
        r.count("pairs"),
        r.count("unifiable"),
        r.count("substitutions")
    ))
}

fn totality_link() -> Outcome {
    let r = fuzz(Suite::TotalityLink, &config(WORLDS));
    clean(&r)?;
    ensure(r.worlds >= 100, || format!("only {} worlds", r.worlds))?;
    require(&r, "families", 1)?;
    Ok(format!("{} total families, {} argument tuples", r.count("families"), r.count("tuples")))
}

fn roundtrip() -> Outcome {
    let mut files = 0;
    let mut entries: Vec<_> = std::fs::read_dir(corpus_dir()).map_err(|e| e.to_string())?.flatten().collect();
    entries.sort_by_key(|e| e.path());
    for e in entries {
        let path = e.path();
        if path.extension().is_some_and(|x| x == "cfc") {
            let src = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let p: Program = parse_program(&src).map_err(|e| format!("{}: {e}", path.display()))?;
            if let Some(msg) = roundtrip_violation(&p) {
                return Err(format!("{}: {msg}", path.display()));
            }
            files += 1;
        }
    }
    let r = fuzz(Suite::Roundtrip, &config(1_000));
    clean(&r)?;
    require(&r, "programs", 1_000)?;
    Ok(format!("{files} corpus files, {} generated programs", r.count("programs")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("corpus regressions", corpus_regressions, Duration::from_secs(5)),
        ("preservation", preservation, Duration::from_secs(120)),
        ("progress", progress, Duration::from_secs(120)),
        ("termination measure", measure, Duration::from_secs(60)),
        ("local confluence", local_confluence, Duration::from_secs(120)),
        ("consistency", consistency, Duration::MAX),
        ("apartness stability", apart_stability, Duration::MAX),
        ("unification oracle", unify_equivalence, Duration::from_secs(60)),
        ("totality link", totality_link, Duration::MAX),
        ("round-trip", roundtrip, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let res = match res {
            Ok(d) if took > limit => Err(format!("{d}, but took {took:.2?} (limit {limit:?})")),
            r => r,
        };
        match res {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
