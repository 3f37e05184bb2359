//! Counterexample minimization by subterm replacement.

use cfc_core::subst::FreeVars;
use cfc_core::{Coercion, Expr, Type};

const MAX_ROUNDS: usize = 500;

/// Greedily replaces `start` by a strictly smaller candidate that still
/// fails, until none does. The result always satisfies `fails` when `start`
/// does.
pub fn shrink<T: Clone>(
    start: T,
    size: impl Fn(&T) -> usize,
    candidates: impl Fn(&T) -> Vec<T>,
    fails: impl Fn(&T) -> bool,
) -> T {
    let mut cur = start;
    for _ in 0..MAX_ROUNDS {
        let n = size(&cur);
        match candidates(&cur).into_iter().find(|c| size(c) < n && fails(c)) {
            Some(c) => cur = c,
            None => break,
        }
    }
    cur
}

/// Closed subterms of a type, and the type with one subterm replaced by
/// one of its own children.
pub fn type_candidates(t: &Type) -> Vec<Type> {
    let mut out = Vec::new();
    for p in t.paths() {
        let Some(sub) = t.at(&p) else { continue };
        if !p.is_empty() && sub.free_vars().is_empty() {
            out.push(sub.clone());
        }
        for c in sub.children() {
            if let Some(r) = t.replace_at(&p, c.clone()) {
                if r.free_vars().is_empty() {
                    out.push(r);
                }
            }
        }
    }
    out
}

fn expr_children(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Var(_) | Expr::Const(_) => vec![],
        Expr::Lam(_, _, b) | Expr::TLam(_, b) | Expr::CLam(_, _, b) | Expr::Assume(_, b) => vec![b],
        Expr::App(f, a) => vec![f, a],
        Expr::TApp(f, _) | Expr::CApp(f, _) | Expr::Cast(f, _) => vec![f],
    }
}

/// Closed proper subexpressions, largest first.
pub fn expr_candidates(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    let mut stack: Vec<&Expr> = expr_children(e);
    while let Some(s) = stack.pop() {
        if FreeVars::of_expr(s).is_empty() {
            out.push(s.clone());
        }
        stack.extend(expr_children(s));
    }
    out.sort_by_key(|x| std::cmp::Reverse(x.size()));
    out
}

fn co_children(g: &Coercion) -> Vec<&Coercion> {
    match g {
        Coercion::Refl(_) | Coercion::Var(_) | Coercion::Axiom(_) => vec![],
        Coercion::Sym(h) | Coercion::Forall(_, h) | Coercion::Nth(_, h) | Coercion::Inst(h, _) => vec![h],
        Coercion::Trans(a, b) | Coercion::Arrow(a, b) => vec![a, b],
        Coercion::Con(_, gs) | Coercion::Fam(_, gs) => gs.iter().collect(),
        Coercion::Qual(a, b, c) => vec![a, b, c],
    }
}

/// Closed proper subcoercions, largest first.
pub fn coercion_candidates(g: &Coercion) -> Vec<Coercion> {
    let mut out = Vec::new();
    let mut stack: Vec<&Coercion> = co_children(g);
    while let Some(s) = stack.pop() {
        if FreeVars::of_coercion(s).is_empty() {
            out.push(s.clone());
        }
        stack.extend(co_children(s));
    }
    out.sort_by_key(|x| std::cmp::Reverse(x.size()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_type() -> impl Strategy<Value = Type> {
        let leaf = prop_oneof![Just(Type::con("A", vec![])), Just(Type::con("B", vec![]))];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::con("P", vec![a, b])),
                inner.clone().prop_map(|a| Type::fam("F", vec![a])),
                (inner.clone(), inner).prop_map(|(a, b)| Type::arrow(a, b)),
            ]
        })
    }

    fn has_family(t: &Type) -> bool {
        t.fam_count() > 0
    }

    proptest! {
        #[test]
        fn minimization_preserves_failure(t in arb_type()) {
            prop_assume!(has_family(&t));
            let m = shrink(t.clone(), Type::size, type_candidates, has_family);
            prop_assert!(has_family(&m));
            prop_assert!(m.size() <= t.size());
        }

        #[test]
        fn minimization_reaches_a_local_minimum(t in arb_type()) {
            prop_assume!(has_family(&t));
            let m = shrink(t, Type::size, type_candidates, has_family);
            // The smallest type with a family application is `F leaf`.
            prop_assert_eq!(m.size(), 2);
        }
    }
}
