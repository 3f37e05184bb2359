use cfc_core::parser::{parse_program, parse_stype};
use cfc_core::program::{load, Loaded};
use cfc_core::surface::{
    check_totality, entails, infer_constraints, st_check_type, Derivation, EntailError, Kind, NotTotal, Pred, SType,
    SurfaceDecl, SurfaceError, Witness,
};
use cfc_core::Name;

fn world(src: &str) -> Loaded {
    let l = load(&parse_program(src).unwrap());
    assert!(l.ok(), "{:?}", l.diagnostics);
    l
}

fn sty(l: &Loaded, src: &str) -> SType {
    parse_stype(src, &l.elaboration.env.families.keys().cloned().collect()).unwrap()
}

fn names(ns: &[&str]) -> Vec<Name> {
    ns.iter().map(|n| Name::new(n)).collect()
}

const COLLECTS: &str = "
data List a = Nil | Cons a (List a)
data Int
data Bool
class Collects c where type Elem c
instance Collects [a] where type Elem [a] = a
class C a
class C a => D a
class C2 a
instance C2 Int
type family F a
type family G a b
type family total Id a where { Id a = a }
";

#[test]
fn guarded_use_checks_under_its_class() {
    let l = world(COLLECTS);
    let env = &l.elaboration.env;
    let given = [Pred::new("Collects", vec![SType::var("c")])];
    assert!(st_check_type(env, &given, &names(&["c"]), &sty(&l, "Elem c -> c -> c")).is_ok());
    let errs = st_check_type(env, &[], &names(&["c"]), &sty(&l, "Elem c -> c -> c")).unwrap_err();
    assert_eq!(errs[0].code(), "UnguardedFamilyUse");
}

#[test]
fn partial_family_without_instance_is_unguarded() {
    let l = world(COLLECTS);
    let errs = st_check_type(&l.elaboration.env, &[], &[], &sty(&l, "F Bool")).unwrap_err();
    assert_eq!(
        errs,
        vec![SurfaceError::UnguardedFamilyUse {
            family: Name::new("F"),
            pred: Pred::new("CF", vec![SType::con("Bool", vec![])])
        }]
    );
}

#[test]
fn total_family_needs_no_context() {
    let l = world(COLLECTS);
    assert!(st_check_type(&l.elaboration.env, &[], &names(&["a"]), &sty(&l, "Id a -> Id [a]")).is_ok());
}

#[test]
fn qualified_types_discharge_their_own_uses() {
    let l = world(COLLECTS);
    let env = &l.elaboration.env;
    let t = sty(&l, "forall c. Collects c => Elem c -> c");
    assert!(st_check_type(env, &[], &[], &t).is_ok());
    assert!(infer_constraints(env, &[], &t).is_empty());
}

#[test]
fn scoping_and_arity_errors() {
    let l = world(COLLECTS);
    let env = &l.elaboration.env;
    let errs = st_check_type(env, &[], &[], &sty(&l, "List b")).unwrap_err();
    assert_eq!(errs, vec![SurfaceError::UnboundTyVar(Name::new("b"))]);
    let errs = st_check_type(env, &[], &[], &sty(&l, "List Int Int")).unwrap_err();
    assert_eq!(errs[0].code(), "ArityMismatch");
    let errs = st_check_type(env, &[], &[], &sty(&l, "Nope")).unwrap_err();
    assert_eq!(errs[0].code(), "UnknownName");
}

#[test]
fn entailment_by_assumption_superclass_and_instance() {
    let l = world(COLLECTS);
    let env = &l.elaboration.env;
    let ca = Pred::new("C", vec![SType::var("a")]);
    assert_eq!(entails(env, std::slice::from_ref(&ca), &ca), Ok(Derivation::Given(ca.clone())));
    let da = Pred::new("D", vec![SType::var("a")]);
    assert!(matches!(entails(env, &[da], &ca), Ok(Derivation::Super { .. })));
    let c2 = Pred::new("C2", vec![SType::con("Int", vec![])]);
    assert!(matches!(entails(env, &[], &c2), Ok(Derivation::Instance { index: 0, .. })));
    assert_eq!(entails(env, &[], &ca), Err(EntailError::NotEntailed(ca)));
}

#[test]
fn runaway_instance_search_is_reported_as_depth_exceeded() {
    let l = world("data List a = Nil | Cons a (List a)\ndata Int\nclass Grow a\ninstance Grow [a] => Grow a");
    let goal = Pred::new("Grow", vec![SType::con("Int", vec![])]);
    assert!(matches!(entails(&l.elaboration.env, &[], &goal), Err(EntailError::DepthExceeded(_))));
}

#[test]
fn closed_class_does_not_commit_on_unifiable_heads() {
    let l = world("data Int\ndata Bool\nclass closed IsInt a {\n instance IsInt Int;\n instance IsInt a\n}");
    let env = &l.elaboration.env;
    // `IsInt b` could still become `IsInt Int`: no instance is chosen.
    assert!(entails(env, &[], &Pred::new("IsInt", vec![SType::var("b")])).is_err());
    let bool_goal = Pred::new("IsInt", vec![SType::con("Bool", vec![])]);
    assert!(matches!(entails(env, &[], &bool_goal), Ok(Derivation::Instance { index: 1, .. })));
}

#[test]
fn inference_examples() {
    let l = world(COLLECTS);
    let env = &l.elaboration.env;
    assert!(infer_constraints(env, &names(&["a"]), &sty(&l, "a -> a -> a")).is_empty());
    let t = sty(&l, "G Int t");
    assert_eq!(
        infer_constraints(env, &names(&["t"]), &t),
        vec![Pred::new("CG", vec![SType::con("Int", vec![]), SType::var("t")])]
    );
}

#[test]
fn inference_keeps_the_guard_not_a_subclass() {
    let l = world("class C a where type Fc a\nclass C a => D a where type Fd a\n");
    let env = &l.elaboration.env;
    let t = sty(&l, "Fc a -> Fd a");
    // D a entails C a, so only the stronger guard is needed.
    assert_eq!(infer_constraints(env, &names(&["a"]), &t), vec![Pred::new("D", vec![SType::var("a")])]);
    let t = sty(&l, "Fc a");
    assert_eq!(infer_constraints(env, &names(&["a"]), &t), vec![Pred::new("C", vec![SType::var("a")])]);
}

#[test]
fn open_family_without_instances_becomes_an_empty_class() {
    let l = world("type family F t :: *");
    let c = &l.elaboration.env.classes[&Name::new("CF")];
    assert_eq!(c.params, names(&["t"]));
    assert_eq!(c.assoc.as_ref().unwrap().name, Name::new("F"));
    assert!(c.instances.is_empty());
    assert!(matches!(&l.elaboration.surface[0], SurfaceDecl::Class(_)));
}

#[test]
fn type_instance_for_loop_guards_itself() {
    let l = world("data List a = Nil | Cons a (List a)\ntype family Loop\ntype instance Loop = [Loop]");
    let shown: Vec<String> = l.elaboration.surface.iter().map(ToString::to_string).collect();
    assert_eq!(shown[2], "instance CLoop => CLoop where type Loop = List Loop");
}

#[test]
fn closed_class_cannot_be_extended() {
    let l = load(&parse_program("data Int\nclass closed K a {\n instance K Int\n}\ninstance K a").unwrap());
    assert_eq!(l.diagnostics.iter().map(|d| d.code.as_str()).collect::<Vec<_>>(), vec!["ClosedClassExtended"]);
}

fn nat() -> Loaded {
    world("data Nat = Z | S Nat\ndata Int\ndata Bool = True | False\ntype family P a")
}

fn eqs(l: &Loaded, family: &str, src: &[(&str, &str)]) -> Vec<cfc_core::surface::SEquation> {
    let mut fams: std::collections::HashSet<Name> = l.elaboration.env.families.keys().cloned().collect();
    fams.insert(Name::new(family));
    src.iter()
        .map(|(lhs, rhs)| match parse_stype(lhs, &fams).unwrap() {
            SType::Fam(f, args) => {
                cfc_core::surface::SEquation { family: f, lhs: args, rhs: parse_stype(rhs, &fams).unwrap() }
            }
            other => panic!("{other}"),
        })
        .collect()
}

#[test]
fn plus_is_total() {
    let l = nat();
    let e = eqs(&l, "Plus", &[("Plus Z n", "n"), ("Plus (S m) n", "S (Plus m n)")]);
    let k = Kind::Data(Name::new("Nat"));
    assert_eq!(check_totality(&l.elaboration.env, &Name::new("Plus"), &[k.clone(), k], &e), Ok(()));
}

#[test]
fn only_int_is_not_total() {
    let l = nat();
    let e = eqs(&l, "OnlyInt", &[("OnlyInt Int", "True")]);
    let r = check_totality(&l.elaboration.env, &Name::new("OnlyInt"), &[Kind::Open], &e);
    assert_eq!(r, Err(NotTotal::Uncovered(vec![Witness::Other(vec![Name::new("Int")])])));
}

#[test]
fn missing_constructor_is_reported() {
    let l = nat();
    let e = eqs(&l, "Pred", &[("Pred (S n)", "n")]);
    let r = check_totality(&l.elaboration.env, &Name::new("Pred"), &[Kind::Data(Name::new("Nat"))], &e);
    assert_eq!(r, Err(NotTotal::Uncovered(vec![Witness::Ctor(Name::new("Z"), vec![])])));
}

#[test]
fn loop_is_not_total() {
    let l = world("data List a = Nil | Cons a (List a)");
    let e = eqs(&l, "Loop", &[("Loop", "[Loop]")]);
    let r = check_totality(&l.elaboration.env, &Name::new("Loop"), &[], &e);
    assert!(matches!(r, Err(NotTotal::NonDecreasing { .. })), "{r:?}");
}

#[test]
fn calls_to_partial_families_block_totality() {
    let l = nat();
    let e = eqs(&l, "Q", &[("Q n", "P n")]);
    let r = check_totality(&l.elaboration.env, &Name::new("Q"), &[Kind::Open], &e);
    assert_eq!(r, Err(NotTotal::CallsPartial { family: Name::new("P") }));
}

#[test]
fn non_linear_rows_cover_nothing() {
    let l = nat();
    let e = eqs(&l, "Same", &[("Same a a", "True"), ("Same Z (S b)", "False")]);
    let k = Kind::Data(Name::new("Nat"));
    assert!(check_totality(&l.elaboration.env, &Name::new("Same"), &[k.clone(), k], &e).is_err());
}
