//! Alpha-equivalence. Bound names are paired up on the way down; a variable
//! matches another iff both resolve to the same binder pair, or both are free
//! and spelled the same.

use crate::name::Name;
use crate::syntax::{Coercion, EvalResolution, Expr, Prop, Type};

#[derive(Default)]
struct Env {
    ty: Vec<(Name, Name)>,
    co: Vec<(Name, Name)>,
    tm: Vec<(Name, Name)>,
}

fn var_eq(stack: &[(Name, Name)], x: &Name, y: &Name) -> bool {
    for (l, r) in stack.iter().rev() {
        if l == x || r == y {
            return l == x && r == y;
        }
    }
    x == y
}

pub fn alpha_eq_ty(a: &Type, b: &Type) -> bool {
    a == b || ty(a, b, &mut Env::default())
}

pub fn alpha_eq_prop(a: &Prop, b: &Prop) -> bool {
    alpha_eq_ty(&a.lhs, &b.lhs) && alpha_eq_ty(&a.rhs, &b.rhs)
}

pub fn alpha_eq_co(a: &Coercion, b: &Coercion) -> bool {
    a == b || co(a, b, &mut Env::default())
}

pub fn alpha_eq_expr(a: &Expr, b: &Expr) -> bool {
    a == b || expr(a, b, &mut Env::default())
}

pub fn alpha_eq_tys(a: &[Type], b: &[Type]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| alpha_eq_ty(x, y))
}

fn tys(a: &[Type], b: &[Type], env: &mut Env) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| ty(x, y, env))
}

fn ty(a: &Type, b: &Type, env: &mut Env) -> bool {
    match (a, b) {
        (Type::Var(x), Type::Var(y)) => var_eq(&env.ty, x, y),
        (Type::Con(h, xs), Type::Con(k, ys)) | (Type::Fam(h, xs), Type::Fam(k, ys)) => h == k && tys(xs, ys, env),
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => ty(a1, b1, env) && ty(a2, b2, env),
        (Type::Qual(p, s), Type::Qual(q, t)) => prop(p, q, env) && ty(s, t, env),
        (Type::Forall(x, s), Type::Forall(y, t)) => {
            env.ty.push((x.clone(), y.clone()));
            let r = ty(s, t, env);
            env.ty.pop();
            r
        }
        _ => false,
    }
}

fn prop(a: &Prop, b: &Prop, env: &mut Env) -> bool {
    ty(&a.lhs, &b.lhs, env) && ty(&a.rhs, &b.rhs, env)
}

fn cos(a: &[Coercion], b: &[Coercion], env: &mut Env) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| co(x, y, env))
}

fn res(a: &EvalResolution, b: &EvalResolution, env: &mut Env) -> bool {
    ty(&a.witness, &b.witness, env) && co(&a.proof, &b.proof, env)
}

fn co(a: &Coercion, b: &Coercion, env: &mut Env) -> bool {
    use Coercion as C;
    match (a, b) {
        (C::Refl(s), C::Refl(t)) => ty(s, t, env),
        (C::Sym(g), C::Sym(h)) => co(g, h, env),
        (C::Trans(g1, g2), C::Trans(h1, h2)) | (C::Arrow(g1, g2), C::Arrow(h1, h2)) => {
            co(g1, h1, env) && co(g2, h2, env)
        }
        (C::Con(h, gs), C::Con(k, hs)) | (C::Fam(h, gs), C::Fam(k, hs)) => h == k && cos(gs, hs, env),
        (C::Forall(x, g), C::Forall(y, h)) => {
            env.ty.push((x.clone(), y.clone()));
            let r = co(g, h, env);
            env.ty.pop();
            r
        }
        (C::Qual(a1, a2, a3), C::Qual(b1, b2, b3)) => co(a1, b1, env) && co(a2, b2, env) && co(a3, b3, env),
        (C::Nth(i, g), C::Nth(j, h)) => i == j && co(g, h, env),
        (C::Inst(g, s), C::Inst(h, t)) => co(g, h, env) && ty(s, t, env),
        (C::Var(c), C::Var(d)) => var_eq(&env.co, c, d),
        (C::Axiom(u), C::Axiom(v)) => {
            u.axiom == v.axiom
                && u.index == v.index
                && tys(&u.tys, &v.tys, env)
                && u.resolutions.len() == v.resolutions.len()
                && u.resolutions.iter().zip(&v.resolutions).all(|(x, y)| res(x, y, env))
        }
        _ => false,
    }
}

fn expr(a: &Expr, b: &Expr, env: &mut Env) -> bool {
    match (a, b) {
        (Expr::Var(x), Expr::Var(y)) => var_eq(&env.tm, x, y),
        (Expr::Const(k), Expr::Const(l)) => k == l,
        (Expr::Lam(x, s, e), Expr::Lam(y, t, f)) => {
            if !ty(s, t, env) {
                return false;
            }
            env.tm.push((x.clone(), y.clone()));
            let r = expr(e, f, env);
            env.tm.pop();
            r
        }
        (Expr::App(e1, e2), Expr::App(f1, f2)) => expr(e1, f1, env) && expr(e2, f2, env),
        (Expr::TLam(x, e), Expr::TLam(y, f)) => {
            env.ty.push((x.clone(), y.clone()));
            let r = expr(e, f, env);
            env.ty.pop();
            r
        }
        (Expr::TApp(e, s), Expr::TApp(f, t)) => expr(e, f, env) && ty(s, t, env),
        (Expr::CLam(c, p, e), Expr::CLam(d, q, f)) => {
            if !prop(p, q, env) {
                return false;
            }
            env.co.push((c.clone(), d.clone()));
            let r = expr(e, f, env);
            env.co.pop();
            r
        }
        (Expr::CApp(e, g), Expr::CApp(f, h)) | (Expr::Cast(e, g), Expr::Cast(f, h)) => expr(e, f, env) && co(g, h, env),
        (Expr::Assume(x, e), Expr::Assume(y, f)) => {
            if x.family != y.family || !tys(&x.args, &y.args, env) {
                return false;
            }
            env.ty.push((x.tyvar.clone(), y.tyvar.clone()));
            env.co.push((x.covar.clone(), y.covar.clone()));
            let r = expr(e, f, env);
            env.ty.pop();
            env.co.pop();
            r
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binders_can_be_renamed() {
        let a = Type::forall("a", Type::arrow(Type::var("a"), Type::var("b")));
        let b = Type::forall("c", Type::arrow(Type::var("c"), Type::var("b")));
        assert!(alpha_eq_ty(&a, &b));
    }

    #[test]
    fn free_variables_are_not_renamed() {
        let a = Type::forall("a", Type::var("b"));
        let b = Type::forall("a", Type::var("c"));
        assert!(!alpha_eq_ty(&a, &b));
    }

    #[test]
    fn capture_is_detected() {
        // forall a. forall b. a  vs  forall a. forall a. a
        let a = Type::forall("a", Type::forall("b", Type::var("a")));
        let b = Type::forall("a", Type::forall("a", Type::var("a")));
        assert!(!alpha_eq_ty(&a, &b));
        // forall a. b  vs  forall b. b
        assert!(!alpha_eq_ty(&Type::forall("a", Type::var("b")), &Type::forall("b", Type::var("b"))));
    }

    #[test]
    fn namespaces_are_separate() {
        let e = Expr::tlam("x", Expr::lam("x", Type::var("x"), Expr::var("x")));
        let f = Expr::tlam("y", Expr::lam("z", Type::var("y"), Expr::var("z")));
        assert!(alpha_eq_expr(&e, &f));
        let g = Expr::tlam("y", Expr::lam("z", Type::var("z"), Expr::var("z")));
        assert!(!alpha_eq_expr(&e, &g));
    }
}
