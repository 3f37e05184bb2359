//! Typing and surface properties over generated worlds.

use cfc_core::alpha::alpha_eq_ty;
use cfc_core::eval::{eval, Outcome};
use cfc_core::rewrite::top_reduce;
use cfc_core::subst::{FreeVars, Subst};
use cfc_core::surface::{entails, infer_constraints, st_check_type, Guard, Pred, SType, SurfaceEnv};
use cfc_core::typecheck::{check_type, infer_expr};
use cfc_core::{Binding, Context, Expr, Name, Type};
use cfc_harness::gen::Gen;
use cfc_harness::suites::{arg_tuples, TUPLE_SIZE};
use cfc_harness::world::{gen_world, rng_for, World};
use proptest::prelude::*;
use rand::Rng;

fn worlds() -> impl Strategy<Value = World> {
    (any::<u64>(), 2usize..9).prop_map(|(seed, size)| gen_world(seed, size))
}

fn exprs(w: &World, salt: u64, n: usize) -> Vec<(Expr, Type)> {
    let mut rng = rng_for(w.seed ^ salt, 0);
    let mut g = Gen::new(w, &mut rng);
    (0..n).map(|_| g.expr()).collect()
}

fn subexprs(e: &Expr) -> Vec<&Expr> {
    let mut out = vec![e];
    let mut i = 0;
    while i < out.len() {
        let cur = out[i];
        match cur {
            Expr::Var(_) | Expr::Const(_) => {}
            Expr::Lam(_, _, b) | Expr::TLam(_, b) | Expr::CLam(_, _, b) | Expr::Assume(_, b) => out.push(b),
            Expr::App(f, a) => {
                out.push(f);
                out.push(a);
            }
            Expr::TApp(f, _) | Expr::CApp(f, _) | Expr::Cast(f, _) => out.push(f),
        }
        i += 1;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inferred_types_are_well_formed(w in worlds()) {
        for (e, _) in exprs(&w, 1, 20) {
            let t = infer_expr(&w.sig, &Context::new(), &e).unwrap();
            prop_assert!(check_type(&w.sig, &Context::new(), &t).is_ok(), "{e} : {t}");
        }
    }

    #[test]
    fn typing_is_deterministic(w in worlds()) {
        for (e, t) in exprs(&w, 2, 20) {
            let u = infer_expr(&w.sig, &Context::new(), &e).unwrap();
            prop_assert!(alpha_eq_ty(&t, &u));
            let again = infer_expr(&w.sig, &Context::new(), &e).unwrap();
            prop_assert_eq!(u, again);
        }
    }

    #[test]
    fn weakening_preserves_typing(w in worlds()) {
        let fresh = [
            Binding::Ty(Name::new("zz")),
            Binding::Tm(Name::new("zz_x"), w.types.first().cloned().filter(|t| t.fam_count() == 0).unwrap_or_else(|| Type::forall("q", Type::arrow(Type::var("q"), Type::var("q"))))),
        ];
        for (e, t) in exprs(&w, 3, 20) {
            let mut ctx = Context::new();
            for b in &fresh {
                ctx.push(b.clone());
                if cfc_core::typecheck::check_ctx(&w.sig, &ctx).is_err() {
                    ctx.pop();
                    continue;
                }
                let u = infer_expr(&w.sig, &ctx, &e);
                prop_assert!(u.as_ref().is_ok_and(|u| alpha_eq_ty(u, &t)), "{e} under {b:?}: {u:?}");
            }
        }
    }

    #[test]
    fn type_substitution_preserves_typing(w in worlds(), pick in any::<u64>()) {
        let mut rng = rng_for(pick, 0);
        let pal = w.palette();
        for (e, _) in exprs(&w, 4, 30) {
            for s in subexprs(&e) {
                let Expr::TLam(a, body) = s else { continue };
                if !FreeVars::of_expr(s).is_empty() {
                    continue;
                }
                let ctx = Context::with_tyvars([a.clone()]);
                let Ok(sigma) = infer_expr(&w.sig, &ctx, body) else { continue };
                let tau = pal.ground(&mut rng, 2);
                let sub = Subst::ty(a, tau.clone());
                let got = infer_expr(&w.sig, &Context::new(), &sub.apply_expr(body));
                let want = sub.apply_ty(&sigma);
                prop_assert!(got.as_ref().is_ok_and(|g| alpha_eq_ty(g, &want)), "[{tau}/{a}] {body}: {got:?} vs {want}");
            }
        }
    }

    #[test]
    fn values_have_canonical_forms(w in worlds()) {
        for (e, _) in exprs(&w, 5, 20) {
            if let Outcome::Value(v) = eval(&w.sig, &e, 2_000).outcome {
                let t = infer_expr(&w.sig, &Context::new(), &v).unwrap();
                let ok = match &t {
                    Type::Arrow(..) => matches!(v, Expr::Lam(..)),
                    Type::Forall(..) => matches!(v, Expr::TLam(..)),
                    Type::Qual(..) => matches!(v, Expr::CLam(..)),
                    _ => true,
                };
                prop_assert!(ok, "value {v} has type {t}");
            }
        }
    }
}

fn arb_stype(env: &SurfaceEnv, rng: &mut impl Rng, depth: usize) -> SType {
    let vars = ["x", "y"];
    if depth <= 1 || rng.gen_bool(0.25) {
        let nullary: Vec<&Name> = env.ty_cons.iter().filter(|(_, k)| **k == 0).map(|(h, _)| h).collect();
        if nullary.is_empty() || rng.gen_bool(0.5) {
            return SType::var(vars[rng.gen_range(0..2)]);
        }
        return SType::Con(nullary[rng.gen_range(0..nullary.len())].clone(), vec![]);
    }
    match rng.gen_range(0..10) {
        0..=3 if !env.families.is_empty() => {
            let (f, info) = env.families.get_index(rng.gen_range(0..env.families.len())).unwrap();
            SType::Fam(f.clone(), (0..info.arity).map(|_| arb_stype(env, rng, depth - 1)).collect())
        }
        0..=7 => {
            let (h, k) = env.ty_cons.get_index(rng.gen_range(0..env.ty_cons.len())).unwrap();
            SType::Con(h.clone(), (0..*k).map(|_| arb_stype(env, rng, depth - 1)).collect())
        }
        _ => SType::arrow(arb_stype(env, rng, depth - 1), arb_stype(env, rng, depth - 1)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inferred_constraints_are_sound_and_minimal(seed in any::<u64>(), size in 3usize..9) {
        let w = gen_world(seed, size);
        let env = &w.env;
        prop_assume!(!env.ty_cons.is_empty());
        let mut rng = rng_for(seed, 1);
        for _ in 0..20 {
            let t = arb_stype(env, &mut rng, 4);
            let scope = t.free_vars();
            let preds = infer_constraints(env, &scope, &t);
            let sound = st_check_type(env, &preds, &scope, &t);
            prop_assert!(sound.is_ok(), "{t} with {preds:?}: {sound:?}");
            for i in 0..preds.len() {
                let mut fewer = preds.clone();
                fewer.remove(i);
                prop_assert!(st_check_type(env, &fewer, &scope, &t).is_err(), "{t}: {} is not needed", preds[i]);
            }
        }
    }

    #[test]
    fn entailment_is_monotone(seed in any::<u64>(), size in 3usize..9) {
        let w = gen_world(seed, size);
        let env = &w.env;
        prop_assume!(!env.ty_cons.is_empty());
        let mut rng = rng_for(seed, 2);
        for _ in 0..20 {
            let t = arb_stype(env, &mut rng, 4);
            let preds = infer_constraints(env, &t.free_vars(), &t);
            let u = arb_stype(env, &mut rng, 4);
            let extra = infer_constraints(env, &u.free_vars(), &u);
            let more: Vec<Pred> = preds.iter().chain(&extra).cloned().collect();
            for p in &preds {
                prop_assert!(entails(env, &preds, p).is_ok());
                prop_assert!(entails(env, &more, p).is_ok(), "adding {extra:?} lost {p}");
            }
        }
    }
}

#[test]
fn proved_total_families_reduce_on_small_tuples() {
    let mut families = 0;
    for seed in 0..60 {
        let w = gen_world(seed, 3 + seed as usize % 6);
        let pal = w.palette();
        for (f, info) in &w.env.families {
            if info.guard != Guard::Total || info.unsafe_total {
                continue;
            }
            families += 1;
            for args in arg_tuples(&pal, info.arity, TUPLE_SIZE) {
                assert!(top_reduce(&w.sig, f, &args).is_ok(), "seed {seed}: {f} {args:?} does not reduce");
            }
        }
    }
    assert!(families > 0);
}
