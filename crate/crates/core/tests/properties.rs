use std::collections::{BTreeSet, HashSet};

use cfc_core::alpha::alpha_eq_ty;
use cfc_core::parser::{parse_program, parse_type};
use cfc_core::program::load;
use cfc_core::rewrite::{step_type, top_reduce, RedexChoice};
use cfc_core::signature::check_signature;
use cfc_core::subst::Subst;
use cfc_core::unify::{apply, compat, match_types, unify, TySubst};
use cfc_core::{Axiom, Equation, FamilyDecl, Name, Signature, Type};
use proptest::prelude::*;

const VARS: [&str; 3] = ["a", "b", "c"];

fn leaf(vars: bool) -> BoxedStrategy<Type> {
    let cons = prop_oneof![Just(Type::con("A", vec![])), Just(Type::con("B", vec![]))];
    if vars {
        prop_oneof![cons, prop::sample::select(VARS.to_vec()).prop_map(Type::var)].boxed()
    } else {
        cons.boxed()
    }
}

/// Types over `A, B : 0`, `L : 1`, `P : 2` and families `F : 1`, `G : 2`.
fn arb_type(vars: bool, families: bool, binders: bool) -> BoxedStrategy<Type> {
    leaf(vars)
        .prop_recursive(4, 32, 2, move |inner| {
            let mut options: Vec<BoxedStrategy<Type>> = vec![
                inner.clone().prop_map(|a| Type::con("L", vec![a])).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::con("P", vec![a, b])).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::arrow(a, b)).boxed(),
            ];
            if families {
                options.push(inner.clone().prop_map(|a| Type::fam("F", vec![a])).boxed());
                options.push((inner.clone(), inner.clone()).prop_map(|(a, b)| Type::fam("G", vec![a, b])).boxed());
            }
            if binders {
                let b = prop::sample::select(VARS.to_vec());
                options.push((b, inner).prop_map(|(b, t)| Type::forall(b, t)).boxed());
            }
            prop::strategy::Union::new(options)
        })
        .boxed()
}

fn family_names() -> HashSet<Name> {
    ["F", "G"].into_iter().map(Name::new).collect()
}

/// Renames every binder to a fresh name carrying `tag`.
fn rename_binders(t: &Type, tag: &str, counter: &mut usize) -> Type {
    match t {
        Type::Var(_) => t.clone(),
        Type::Con(h, args) => Type::Con(h.clone(), args.iter().map(|a| rename_binders(a, tag, counter)).collect()),
        Type::Fam(f, args) => Type::Fam(f.clone(), args.iter().map(|a| rename_binders(a, tag, counter)).collect()),
        Type::Arrow(a, b) => Type::arrow(rename_binders(a, tag, counter), rename_binders(b, tag, counter)),
        Type::Forall(b, body) => {
            *counter += 1;
            let nb = format!("{b}{tag}{counter}");
            let body = Subst::ty(b, Type::var(&nb)).apply_ty(body);
            Type::forall(&nb, rename_binders(&body, tag, counter))
        }
        Type::Qual(..) => t.clone(),
    }
}

fn renamed(t: &Type, tag: &str) -> Type {
    rename_binders(t, tag, &mut 0)
}

fn arb_subst(range_vars: bool) -> impl Strategy<Value = TySubst> {
    prop::collection::btree_map(
        prop::sample::select(VARS.to_vec()).prop_map(Name::new),
        arb_type(range_vars, false, false),
        0..=3,
    )
}

fn nat() -> Signature {
    let src = "
data Z : 0
data S : 1
family Plus : 2 total
axiom plus : Plus {
  forall n. Plus Z n ~ n;
  forall m n [r | c : Plus m n ~ r]. Plus (S m) n ~ S r
}
family Pred : 1 partial
axiom pred : Pred { forall n. Pred (S n) ~ n }
";
    load(&parse_program(src).unwrap()).sig
}

fn arb_nat(families: bool) -> BoxedStrategy<Type> {
    Just(Type::con("Z", vec![]))
        .prop_recursive(5, 24, 2, move |inner| {
            let s = inner.clone().prop_map(|a| Type::con("S", vec![a]));
            if families {
                prop_oneof![
                    2 => s,
                    1 => inner.clone().prop_map(|a| Type::fam("Pred", vec![a])),
                    2 => (inner.clone(), inner).prop_map(|(a, b)| Type::fam("Plus", vec![a, b])),
                ]
                .boxed()
            } else {
                s.boxed()
            }
        })
        .boxed()
}

fn equation(lhs: Vec<Type>, rhs: Type) -> Equation {
    let mut vars: BTreeSet<Name> = BTreeSet::new();
    for t in &lhs {
        vars.extend(t.free_vars());
    }
    Equation { tyvars: vars.into_iter().collect(), assumptions: vec![], family: Name::new("G"), lhs, rhs }
}

/// An equation for `G` whose right-hand side only mentions its own
/// left-hand side variables.
fn arb_equation(rhs_families: bool) -> impl Strategy<Value = Equation> {
    (arb_type(true, false, false), arb_type(true, false, false), arb_type(false, rhs_families, false), any::<bool>())
        .prop_map(|(l1, l2, rhs, use_var)| {
            let lhs = vec![l1, l2];
            let fv: Vec<Name> = lhs.iter().flat_map(|t| t.free_vars()).collect();
            let rhs = match fv.first() {
                Some(v) if use_var => Type::con("P", vec![Type::Var(v.clone()), rhs]),
                _ => rhs,
            };
            equation(lhs, rhs)
        })
}

fn g_signature(eqs: Vec<Equation>) -> Signature {
    let mut sig = Signature::default();
    for (h, k) in [("A", 0), ("B", 0), ("L", 1), ("P", 2)] {
        sig.ty_cons.insert(Name::new(h), k);
    }
    sig.families.insert(Name::new("F"), FamilyDecl { arity: 1, total: false });
    sig.families.insert(Name::new("G"), FamilyDecl { arity: 2, total: false });
    sig.axioms.insert(Name::new("g"), Axiom { family: Name::new("G"), equations: eqs });
    sig
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn alpha_equivalence_is_an_equivalence(t in arb_type(true, true, true)) {
        let r1 = renamed(&t, "x");
        let r2 = renamed(&t, "y");
        prop_assert!(alpha_eq_ty(&t, &t));
        prop_assert!(alpha_eq_ty(&t, &r1));
        prop_assert!(alpha_eq_ty(&r1, &t));
        prop_assert!(alpha_eq_ty(&r1, &r2));
        prop_assert!(alpha_eq_ty(&t, &r2));
    }

    #[test]
    fn alpha_equivalence_distinguishes_free_variables(t in arb_type(true, true, true)) {
        let fv = t.free_vars();
        prop_assume!(!fv.is_empty());
        let v = fv.iter().next().unwrap().clone();
        let moved = Subst::ty(&v, Type::var("fresh")).apply_ty(&t);
        prop_assert!(!alpha_eq_ty(&t, &moved));
    }

    #[test]
    fn redexes_plug_back(t in arb_type(true, true, true)) {
        for p in t.find_redexes() {
            let hole = t.at(&p).unwrap();
            prop_assert!(matches!(hole, Type::Fam(..)));
            prop_assert_eq!(t.replace_at(&p, hole.clone()).unwrap(), t.clone());
        }
        prop_assert_eq!(t.find_redexes().len(), t.fam_count());
    }

    #[test]
    fn substitution_free_variables(t in arb_type(true, true, true), theta in arb_subst(true)) {
        let s = Subst::from_tys(theta.clone());
        let out = s.apply_ty(&t);
        let mut allowed: BTreeSet<Name> = t.free_vars().into_iter().filter(|v| !theta.contains_key(v)).collect();
        for u in theta.values() {
            allowed.extend(u.free_vars());
        }
        prop_assert!(out.free_vars().is_subset(&allowed), "{} -> {}", t, out);
    }

    #[test]
    fn unifiers_are_sound_and_idempotent(s in arb_type(true, false, false), t in arb_type(true, false, false)) {
        if let Ok(theta) = unify(std::slice::from_ref(&s), std::slice::from_ref(&t)) {
            prop_assert_eq!(apply(&theta, &s), apply(&theta, &t));
            for u in theta.values() {
                prop_assert_eq!(&apply(&theta, u), u);
            }
            prop_assert_eq!(apply(&theta, &apply(&theta, &s)), apply(&theta, &s));
        }
    }

    #[test]
    fn instances_of_a_type_unify_with_it(s in arb_type(true, false, false), theta in arb_subst(true)) {
        // Keep the image's variables apart from the pattern's, or the
        // occurs check rightly fails.
        let apart = Subst::from_tys(VARS.iter().map(|v| (Name::new(v), Type::var(&format!("w{v}")))));
        let theta: TySubst = theta.into_iter().map(|(k, u)| (k, apart.apply_ty(&u))).collect();
        let t = renamed(&apply(&theta, &s), "z");
        prop_assert!(unify(std::slice::from_ref(&s), std::slice::from_ref(&t)).is_ok());
    }

    #[test]
    fn matching_agrees_with_unification_on_closed_subjects(
        p in arb_type(true, false, false),
        theta in arb_subst(false),
        other in arb_type(false, false, false),
        close in any::<bool>(),
    ) {
        let s = if close { apply(&theta, &p) } else { other };
        prop_assume!(s.free_vars().is_empty());
        let m = match_types(std::slice::from_ref(&p), std::slice::from_ref(&s));
        let u = unify(std::slice::from_ref(&p), std::slice::from_ref(&s));
        prop_assert_eq!(m.is_some(), u.is_ok());
        if let (Some(m), Ok(u)) = (m, u) {
            let pv = p.free_vars();
            let restricted: TySubst = u.into_iter().filter(|(k, _)| pv.contains(k)).collect();
            prop_assert_eq!(m, restricted);
        }
    }

    #[test]
    fn compat_is_symmetric(e1 in arb_equation(false), e2 in arb_equation(false)) {
        prop_assert_eq!(compat(&e1, &e2), compat(&e2, &e1));
    }

    #[test]
    fn accepted_equations_have_proper_right_hand_sides(e in arb_equation(true)) {
        let sig = g_signature(vec![e.clone()]);
        let accepted = check_signature(&sig).is_empty();
        if accepted {
            prop_assert_eq!(e.rhs.fam_count(), 0);
        }
        if e.rhs.fam_count() > 0 {
            prop_assert!(!accepted);
        }
    }

    #[test]
    fn types_round_trip_through_the_printer(t in arb_type(true, true, true)) {
        let printed = t.to_string();
        let back = parse_type(&printed, &family_names()).map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
        prop_assert!(alpha_eq_ty(&t, &back), "{} vs {}", t, back);
    }

    #[test]
    fn proper_types_do_not_reduce(t in arb_nat(false)) {
        let sig = nat();
        for choice in [RedexChoice::LeftmostInnermost, RedexChoice::RightmostInnermost, RedexChoice::Nth(0)] {
            prop_assert!(step_type(&sig, &t, choice).is_none());
        }
    }

    #[test]
    fn every_step_removes_one_family_application(t in arb_nat(true), n in 0usize..4) {
        let sig = nat();
        for choice in [RedexChoice::LeftmostInnermost, RedexChoice::RightmostInnermost, RedexChoice::Nth(n)] {
            if let Some(s) = step_type(&sig, &t, choice) {
                prop_assert_eq!(s.ty.fam_count() + 1, t.fam_count());
            }
        }
    }

    #[test]
    fn top_reduction_is_deterministic(a in arb_nat(false), b in arb_nat(false)) {
        let sig = nat();
        let args = [a, b];
        let r1 = top_reduce(&sig, &Name::new("Plus"), &args);
        let r2 = top_reduce(&sig, &Name::new("Plus"), &args);
        prop_assert!(r1.is_ok());
        prop_assert_eq!(r1, r2);
    }
}

/// All types over `A : 0`, `P : 2` and `x, y` with at most `depth` levels.
fn small_types(depth: usize, vars: &[&str]) -> Vec<Type> {
    let mut all: Vec<Type> = vec![Type::con("A", vec![])];
    all.extend(vars.iter().map(|v| Type::var(v)));
    for _ in 1..depth {
        let mut next = all.clone();
        for a in &all {
            for b in &all {
                let t = Type::con("P", vec![a.clone(), b.clone()]);
                if !next.contains(&t) {
                    next.push(t);
                }
            }
        }
        all = next;
    }
    all
}

#[test]
fn unifiers_are_most_general_on_small_problems() {
    let types = small_types(3, &["x", "y"]);
    let ground = small_types(2, &[]);
    let mut grounds: Vec<TySubst> = Vec::new();
    for gx in &ground {
        for gy in &ground {
            grounds.push([(Name::new("x"), gx.clone()), (Name::new("y"), gy.clone())].into_iter().collect());
        }
    }
    let mut checked = 0;
    for s in &types {
        for t in &types {
            let u = unify(std::slice::from_ref(s), std::slice::from_ref(t));
            for g in &grounds {
                if apply(g, s) != apply(g, t) {
                    continue;
                }
                let u = u.as_ref().unwrap_or_else(|e| panic!("{s} =?= {t} has unifier {g:?}, unify says {e}"));
                // g factors through u: g = g . u on every variable
                for v in ["x", "y"] {
                    let v = Type::var(v);
                    assert_eq!(
                        apply(g, &apply(u, &v)),
                        apply(g, &v),
                        "{s} =?= {t}: {g:?} does not factor through {u:?}"
                    );
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "{checked}");
}
