use std::path::PathBuf;

use cfc_core::alpha::alpha_eq_ty;
use cfc_core::eval::{eval, Outcome};
use cfc_core::parser::{parse_program, parse_stype, parse_type};
use cfc_core::program::{alpha_eq_program, load, Loaded};
use cfc_core::rewrite::normalize;
use cfc_core::surface::{entails, infer_constraints, Pred, SType};
use cfc_core::{Name, Type};

fn corpus(file: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn loaded(file: &str) -> Loaded {
    load(&parse_program(&corpus(file)).unwrap())
}

fn codes(l: &Loaded) -> Vec<&str> {
    l.diagnostics.iter().map(|d| d.code.as_str()).collect()
}

fn norm(l: &Loaded, ty: &str) -> Type {
    let names = l.sig.families.keys().cloned().collect();
    normalize(&l.sig, &parse_type(ty, &names).unwrap()).unwrap().ty
}

fn ty(l: &Loaded, src: &str) -> Type {
    parse_type(src, &l.sig.families.keys().cloned().collect()).unwrap()
}

#[test]
fn equ_uses_apartness() {
    let l = loaded("equ.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    assert_eq!(norm(&l, "Equ Int Bool"), ty(&l, "False"));
    assert_eq!(norm(&l, "Equ Int Int"), ty(&l, "True"));
}

#[test]
fn plus_normalizes_and_evaluates() {
    let l = loaded("plus.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    assert_eq!(norm(&l, "Plus (S (S Z)) (S Z)"), ty(&l, "S (S (S Z))"));
    let run = eval(&l.sig, &l.terms["main"].0, 100);
    assert_eq!(run.outcome, Outcome::Value(cfc_core::Expr::konst("MkInt")));
    assert_eq!(run.trace[0].0, "S_Resolve");
}

#[test]
fn only_int_is_stuck_on_bool() {
    let l = loaded("onlyint.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    assert_eq!(norm(&l, "OnlyInt Bool"), ty(&l, "OnlyInt Bool"));
    assert_eq!(norm(&l, "OnlyInt Int"), ty(&l, "True"));
    assert!(!l.elaboration.env.families[&Name::new("OnlyInt")].guard.eq(&cfc_core::surface::Guard::Total));
}

#[test]
fn unguarded_loop_is_rejected() {
    assert_eq!(codes(&loaded("loop_bad.cfc")), vec!["FamilyInRHS"]);
    assert_eq!(codes(&loaded("loopy_bad.cfc")), vec!["FamilyInRHS"]);
}

#[test]
fn self_guarded_loopy_instance_is_accepted_but_unsatisfiable() {
    let l = loaded("loopy.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    let loopy = Pred::new("Loopy", vec![]);
    assert!(entails(&l.elaboration.env, &[], &loopy).is_err());
}

#[test]
fn collects_inference() {
    let l = loaded("collects.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    let env = &l.elaboration.env;
    let fams = env.families.keys().cloned().collect();
    let sigma = parse_stype("Elem c -> c -> c", &fams).unwrap();
    assert_eq!(infer_constraints(env, &[Name::new("c")], &sigma), vec![Pred::new("Collects", vec![SType::var("c")])]);
    let list = parse_stype("Elem [a] -> [a] -> [a]", &fams).unwrap();
    assert!(infer_constraints(env, &[Name::new("a")], &list).is_empty());
}

#[test]
fn hdelete_removes_by_type() {
    let l = loaded("hdelete.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    assert_eq!(norm(&l, "HWithout Char (HCons Bool (HCons Char HNil))"), ty(&l, "HCons Bool HNil"));
}

#[test]
fn closed_sub_class_commits_to_first_instance() {
    let l = loaded("prec.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    let fg = SType::con("Sum", vec![SType::var("f"), SType::var("g")]);
    let goal = Pred::new("Sub", vec![fg.clone(), fg]);
    match entails(&l.elaboration.env, &[], &goal).unwrap() {
        cfc_core::surface::Derivation::Instance { index, .. } => assert_eq!(index, 0),
        d => panic!("unexpected derivation {d:?}"),
    }
}

#[test]
fn elaboration_of_free_families() {
    let l = loaded("elaborate.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    let shown: Vec<String> = l.elaboration.surface.iter().map(|d| d.to_string()).collect();
    assert!(
        shown.contains(&"instance CG Int t => CF Int (Maybe t) where type F Int (Maybe t) = G Int t".to_string()),
        "{shown:#?}"
    );
    assert!(shown.contains(&"class CG a b where type G a b".to_string()), "{shown:#?}");
    let closed = shown.iter().find(|s| s.starts_with("class closed CH")).expect("closed class for H");
    assert!(closed.contains("instance CK t => CH (Maybe t)"), "{closed}");
}

#[test]
fn total_plus_needs_no_guard() {
    let l = loaded("vec.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    let shown: Vec<String> = l.elaboration.surface.iter().map(|d| d.to_string()).collect();
    assert!(shown.contains(&"sig append :: Vec a m -> Vec a n -> Vec a (Plus m n)".to_string()), "{shown:#?}");
    assert_eq!(norm(&l, "Plus (S Z) (S Z)"), ty(&l, "S (S Z)"));
}

#[test]
fn totality_by_checker_and_pragma() {
    let l = loaded("totality.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    assert!(l.sig.is_total("Double"));
    assert!(l.sig.is_total("Half"));
    assert_eq!(l.elaboration.unsafe_totals, vec![Name::new("Half")]);
    assert_eq!(codes(&loaded("total_bad.cfc")), vec!["NotTotal"]);
}

#[test]
fn eval_terms_reach_values() {
    let l = loaded("eval.cfc");
    assert!(l.ok(), "{:?}", l.diagnostics);
    for (name, (e, _)) in &l.terms {
        let run = eval(&l.sig, e, 1000);
        assert!(matches!(run.outcome, Outcome::Value(_) | Outcome::CoercedValue(_)), "{name}: {:?}", run.outcome);
    }
}

#[test]
fn corpus_round_trips() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("cfc") {
            continue;
        }
        let p = parse_program(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let printed = p.to_string();
        let q = parse_program(&printed).unwrap_or_else(|e| panic!("{}: {e}\n{printed}", path.display()));
        assert!(alpha_eq_program(&p, &q), "{}", path.display());
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn spec_example_vec_with_total_plus_is_well_formed() {
    let l = loaded("vec.cfc");
    let env = &l.elaboration.env;
    let fams = env.families.keys().cloned().collect();
    let t = parse_stype("Vec a (Plus m n)", &fams).unwrap();
    let scope: Vec<Name> = ["a", "m", "n"].into_iter().map(Name::new).collect();
    assert!(cfc_core::surface::st_check_type(env, &[], &scope, &t).is_ok());
    assert!(alpha_eq_ty(&norm(&l, "Plus Z Z"), &ty(&l, "Z")));
}
