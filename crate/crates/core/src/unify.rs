//! First-order unification, one-sided matching, apartness and the
//! compatibility checks that decide when an equation may fire.
//!
//! Every free variable counts as a unification variable. Variables bound by
//! a `forall` inside the types are handled by pairing binders with a fresh
//! rigid skolem; a unifier that would let a skolem escape is rejected.
//! Family applications, if present, are compared structurally.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::alpha::alpha_eq_ty;
use crate::name::Name;
use crate::subst::Subst;
use crate::syntax::{Equation, EvalAssumption, Prop, Type};

/// An idempotent substitution on type variables, ordered for determinism.
pub type TySubst = BTreeMap<Name, Type>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum UnifyError {
    #[error("cannot unify `{0:?}` with `{1:?}`")]
    Clash(Type, Type),
    #[error("occurs check: `{0}` occurs in `{1:?}`")]
    Occurs(Name, Type),
    #[error("bound variable would escape its binder")]
    Escape,
    #[error("argument lists differ in length ({0} vs {1})")]
    Length(usize, usize),
}

fn is_skolem(n: &str) -> bool {
    n.starts_with('!')
}

pub fn apply(theta: &TySubst, t: &Type) -> Type {
    if theta.is_empty() {
        return t.clone();
    }
    Subst::from_tys(theta.iter().map(|(k, v)| (k.clone(), v.clone()))).apply_ty(t)
}

pub fn apply_all(theta: &TySubst, ts: &[Type]) -> Vec<Type> {
    if theta.is_empty() {
        return ts.to_vec();
    }
    let s = Subst::from_tys(theta.iter().map(|(k, v)| (k.clone(), v.clone())));
    ts.iter().map(|t| s.apply_ty(t)).collect()
}

/// Most general unifier of two argument lists.
pub fn unify(a: &[Type], b: &[Type]) -> Result<TySubst, UnifyError> {
    if a.len() != b.len() {
        return Err(UnifyError::Length(a.len(), b.len()));
    }
    let mut u = Unifier::default();
    let mut work: Vec<(Type, Type)> = a.iter().cloned().zip(b.iter().cloned()).rev().collect();
    while let Some((s, t)) = work.pop() {
        u.step(s, t, &mut work)?;
    }
    if u.theta.values().any(|t| t.free_vars().iter().any(|v| is_skolem(v))) {
        return Err(UnifyError::Escape);
    }
    Ok(u.theta)
}

pub fn unify_ty(a: &Type, b: &Type) -> Result<TySubst, UnifyError> {
    unify(std::slice::from_ref(a), std::slice::from_ref(b))
}

pub fn unifiable(a: &[Type], b: &[Type]) -> bool {
    unify(a, b).is_ok()
}

/// Two argument lists are apart when no substitution makes them equal.
pub fn apart(a: &[Type], b: &[Type]) -> bool {
    !unifiable(a, b)
}

#[derive(Default)]
struct Unifier {
    theta: TySubst,
    skolems: usize,
}

impl Unifier {
    fn skolem(&mut self) -> Type {
        self.skolems += 1;
        Type::Var(Name::from(format!("!{}", self.skolems)))
    }

    fn bind(&mut self, x: Name, t: Type) -> Result<(), UnifyError> {
        if let Type::Var(y) = &t {
            if *y == x {
                return Ok(());
            }
        }
        if t.mentions(&x) {
            return Err(UnifyError::Occurs(x, t));
        }
        let single = Subst::ty(&x, t.clone());
        for v in self.theta.values_mut() {
            if v.mentions(&x) {
                *v = single.apply_ty(v);
            }
        }
        self.theta.insert(x, t);
        Ok(())
    }

    fn step(&mut self, s: Type, t: Type, work: &mut Vec<(Type, Type)>) -> Result<(), UnifyError> {
        let s = apply(&self.theta, &s);
        let t = apply(&self.theta, &t);
        match (s, t) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(x), t) if !is_skolem(&x) => self.bind(x, t),
            (s, Type::Var(y)) if !is_skolem(&y) => self.bind(y, s),
            (Type::Con(h, xs), Type::Con(k, ys)) | (Type::Fam(h, xs), Type::Fam(k, ys))
                if h == k && xs.len() == ys.len() =>
            {
                work.extend(xs.into_iter().zip(ys).rev());
                Ok(())
            }
            (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => {
                work.push((*a2, *b2));
                work.push((*a1, *b1));
                Ok(())
            }
            (Type::Qual(p, a), Type::Qual(q, b)) => {
                work.push((*a, *b));
                work.push((p.rhs, q.rhs));
                work.push((p.lhs, q.lhs));
                Ok(())
            }
            (Type::Forall(x, a), Type::Forall(y, b)) => {
                let k = self.skolem();
                let a = Subst::ty(&x, k.clone()).apply_ty(&a);
                let b = Subst::ty(&y, k).apply_ty(&b);
                work.push((a, b));
                Ok(())
            }
            (s, t) => Err(UnifyError::Clash(s, t)),
        }
    }
}

/// One-sided matching: finds `theta` with `pattern[theta] = subject`, binding
/// only the free variables of `pattern`. Variables of `subject` are rigid.
/// Callers keep pattern and subject variables disjoint.
pub fn match_types(pattern: &[Type], subject: &[Type]) -> Option<TySubst> {
    if pattern.len() != subject.len() {
        return None;
    }
    let mut theta = TySubst::new();
    let mut env = Vec::new();
    for (p, s) in pattern.iter().zip(subject) {
        if !match_ty(p, s, &mut env, &mut theta) {
            return None;
        }
    }
    Some(theta)
}

fn mentions_any(t: &Type, names: &[(Name, Name)]) -> bool {
    names.iter().any(|(_, r)| t.mentions(r))
}

fn match_ty(p: &Type, s: &Type, env: &mut Vec<(Name, Name)>, theta: &mut TySubst) -> bool {
    match (p, s) {
        (Type::Var(x), _) => {
            if let Some(i) = env.iter().rposition(|(l, _)| l == x) {
                return matches!(s, Type::Var(y) if env.iter().rposition(|(_, r)| r == y) == Some(i));
            }
            if mentions_any(s, env) {
                return false;
            }
            match theta.get(x) {
                Some(bound) => alpha_eq_ty(bound, s),
                None => {
                    theta.insert(x.clone(), s.clone());
                    true
                }
            }
        }
        (Type::Con(h, xs), Type::Con(k, ys)) | (Type::Fam(h, xs), Type::Fam(k, ys)) => {
            h == k && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| match_ty(a, b, env, theta))
        }
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => match_ty(a1, b1, env, theta) && match_ty(a2, b2, env, theta),
        (Type::Qual(p1, a), Type::Qual(q1, b)) => {
            match_ty(&p1.lhs, &q1.lhs, env, theta)
                && match_ty(&p1.rhs, &q1.rhs, env, theta)
                && match_ty(a, b, env, theta)
        }
        (Type::Forall(x, a), Type::Forall(y, b)) => {
            env.push((x.clone(), y.clone()));
            let r = match_ty(a, b, env, theta);
            env.pop();
            r
        }
        _ => false,
    }
}

/// Renames every variable bound by `eq` by appending `#tag`. Source names
/// never contain `#`, so the result shares no variables with user types.
pub fn rename_equation(eq: &Equation, tag: &str) -> Equation {
    let fresh = |n: &Name| Name::from(format!("{n}#{tag}"));
    let mut s = Subst::new();
    for a in &eq.tyvars {
        s.tys.insert(a.clone(), Type::Var(fresh(a)));
    }
    let mut assumptions = Vec::with_capacity(eq.assumptions.len());
    for a in &eq.assumptions {
        let args = a.args.iter().map(|t| s.apply_ty(t)).collect();
        assumptions.push(EvalAssumption {
            tyvar: fresh(&a.tyvar),
            covar: fresh(&a.covar),
            family: a.family.clone(),
            args,
        });
        s.tys.insert(a.tyvar.clone(), Type::Var(fresh(&a.tyvar)));
    }
    Equation {
        tyvars: eq.tyvars.iter().map(fresh).collect(),
        assumptions,
        family: eq.family.clone(),
        lhs: eq.lhs.iter().map(|t| s.apply_ty(t)).collect(),
        rhs: s.apply_ty(&eq.rhs),
    }
}

/// Maps each assumption variable to the family application it stands for,
/// expanding earlier assumption variables inside later arguments.
pub fn assumption_subst(assumptions: &[EvalAssumption]) -> Subst {
    let mut s = Subst::new();
    for a in assumptions {
        let app = Type::Fam(a.family.clone(), a.args.iter().map(|t| s.apply_ty(t)).collect());
        s.tys.insert(a.tyvar.clone(), app);
    }
    s
}

/// Compatibility of two equations: their left-hand sides are apart, or they
/// agree on the right wherever the left-hand sides coincide.
pub fn compat(e1: &Equation, e2: &Equation) -> bool {
    let e1 = rename_equation(e1, "1");
    let e2 = rename_equation(e2, "2");
    if e1.family != e2.family {
        return true;
    }
    let theta = match unify(&e1.lhs, &e2.lhs) {
        Ok(theta) => theta,
        Err(_) => return true,
    };
    let r1 = apply(&theta, &assumption_subst(&e1.assumptions).apply_ty(&e1.rhs));
    let r2 = apply(&theta, &assumption_subst(&e2.assumptions).apply_ty(&e2.rhs));
    alpha_eq_ty(&r1, &r2)
}

/// Whether `earlier` (equation j) cannot block `current` (equation i) when
/// `current` is instantiated at `rho` (one type per `current.tyvars`).
pub fn no_conflict(earlier: &Equation, current: &Equation, rho: &[Type]) -> bool {
    let s = Subst::from_tys(current.tyvars.iter().cloned().zip(rho.iter().cloned()));
    let lhs_i: Vec<Type> = current.lhs.iter().map(|t| s.apply_ty(t)).collect();
    let ej = rename_equation(earlier, "j");
    apart(&ej.lhs, &lhs_i) || compat(current, earlier)
}

/// The proposition an instantiated equation proves, before resolution.
pub fn instantiate_lhs(eq: &Equation, rho: &[Type]) -> Prop {
    let s = Subst::from_tys(eq.tyvars.iter().cloned().zip(rho.iter().cloned()));
    Prop::new(Type::Fam(eq.family.clone(), eq.lhs.iter().map(|t| s.apply_ty(t)).collect()), s.apply_ty(&eq.rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> Type {
        Type::con(n, vec![])
    }
    fn v(n: &str) -> Type {
        Type::var(n)
    }
    fn app(h: &str, args: Vec<Type>) -> Type {
        Type::con(h, args)
    }

    #[test]
    fn unifies_pair_with_repeated_variable() {
        let th = unify(&[app("P", vec![v("a"), v("a")])], &[app("P", vec![c("Int"), v("b")])]).unwrap();
        assert_eq!(th.get("a"), Some(&c("Int")));
        assert_eq!(th.get("b"), Some(&c("Int")));
    }

    #[test]
    fn occurs_check_fails() {
        assert!(matches!(unify_ty(&v("a"), &app("List", vec![v("a")])), Err(UnifyError::Occurs(..))));
    }

    #[test]
    fn constructor_clash_is_apart() {
        assert!(apart(&[c("Int")], &[c("Bool")]));
        assert!(!apart(&[v("a")], &[c("Bool")]));
    }

    #[test]
    fn binders_unify_up_to_renaming_but_do_not_escape() {
        let a = Type::forall("x", Type::arrow(v("x"), v("b")));
        let b = Type::forall("y", Type::arrow(v("y"), c("Int")));
        assert_eq!(unify_ty(&a, &b).unwrap().get("b"), Some(&c("Int")));
        let esc = Type::forall("y", Type::arrow(v("y"), v("y")));
        assert_eq!(unify_ty(&a, &esc), Err(UnifyError::Escape));
    }

    #[test]
    fn matching_is_one_sided() {
        let pat = [app("S", vec![v("m")]), v("n")];
        let th = match_types(&pat, &[app("S", vec![c("Z")]), c("Z")]).unwrap();
        assert_eq!(th.get("m"), Some(&c("Z")));
        assert!(match_types(&[c("Z")], &[v("a")]).is_none());
        assert!(match_types(&[v("a"), v("a")], &[c("Int"), c("Bool")]).is_none());
    }

    #[test]
    fn matching_respects_subject_binders() {
        let subject = Type::forall("q", Type::arrow(v("q"), c("Int")));
        let ok = Type::forall("p", Type::arrow(v("p"), v("x")));
        assert_eq!(match_types(&[ok], std::slice::from_ref(&subject)).unwrap().get("x"), Some(&c("Int")));
        let bad = Type::forall("p", Type::arrow(v("x"), c("Int")));
        assert!(match_types(&[bad], &[subject]).is_none());
    }

    fn eq(vars: &[&str], fam: &str, lhs: Vec<Type>, rhs: Type) -> Equation {
        Equation {
            tyvars: vars.iter().map(|s| Name::new(s)).collect(),
            assumptions: vec![],
            family: fam.into(),
            lhs,
            rhs,
        }
    }

    #[test]
    fn compat_examples() {
        let true_eq = eq(&["a"], "Equ", vec![v("a"), v("a")], c("True"));
        let false_eq = eq(&["a", "b"], "Equ", vec![v("a"), v("b")], c("False"));
        assert!(!compat(&true_eq, &false_eq));
        let f_int = eq(&[], "F", vec![c("Int")], c("Bool"));
        let f_char = eq(&[], "F", vec![c("Char")], c("Int"));
        assert!(compat(&f_int, &f_char));
        let g1 = eq(&["a"], "G", vec![v("a"), c("Int")], v("a"));
        let g2 = eq(&["b"], "G", vec![c("Bool"), v("b")], c("Bool"));
        assert!(compat(&g1, &g2), "both sides are Bool at the overlap");
        let g2 = eq(&["b"], "G", vec![c("Bool"), v("b")], c("Int"));
        assert!(!compat(&g1, &g2));
        let g3 = eq(&["b"], "G", vec![c("Int"), v("b")], c("Int"));
        assert!(compat(&g1, &g3));
    }

    #[test]
    fn no_conflict_examples() {
        let true_eq = eq(&["a"], "Equ", vec![v("a"), v("a")], c("True"));
        let false_eq = eq(&["a", "b"], "Equ", vec![v("a"), v("b")], c("False"));
        assert!(no_conflict(&true_eq, &false_eq, &[c("Int"), c("Bool")]));
        assert!(!no_conflict(&true_eq, &false_eq, &[c("Int"), c("Int")]));
        // an open variable keeps the earlier equation possible
        assert!(!no_conflict(&true_eq, &false_eq, &[v("x"), c("Int")]));
    }

    #[test]
    fn compat_expands_assumptions() {
        // F (Maybe a) = G a  vs  F (Maybe Int) = G Int, written with assumptions
        let mk = |arg: Type, gi: Type| Equation {
            tyvars: arg.free_vars().into_iter().collect(),
            assumptions: vec![EvalAssumption {
                tyvar: "r".into(),
                covar: "c".into(),
                family: "G".into(),
                args: vec![gi],
            }],
            family: "F".into(),
            lhs: vec![app("Maybe", vec![arg])],
            rhs: v("r"),
        };
        assert!(compat(&mk(v("a"), v("a")), &mk(c("Int"), c("Int"))));
        assert!(!compat(&mk(v("a"), v("a")), &mk(c("Int"), c("Bool"))));
    }
}
