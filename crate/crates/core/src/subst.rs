//! Free variables and capture-avoiding simultaneous substitution.
//!
//! Three namespaces are substituted at once: type variables, coercion
//! variables and term variables. A binder is renamed (by appending primes)
//! only when it would capture a free variable of the substitution's range.

use std::collections::{HashMap, HashSet};

use crate::name::Name;
use crate::syntax::{AxiomUse, Coercion, EvalAssumption, EvalResolution, Expr, Prop, Type};

/// Free variables of a coercion or expression, split by namespace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub ty: HashSet<Name>,
    pub co: HashSet<Name>,
    pub tm: HashSet<Name>,
}

#[derive(Default)]
struct Bound {
    ty: Vec<Name>,
    co: Vec<Name>,
    tm: Vec<Name>,
}

impl FreeVars {
    pub fn of_type(t: &Type) -> Self {
        let mut fv = FreeVars::default();
        fv.add_type(t, &mut Bound::default());
        fv
    }

    pub fn of_coercion(g: &Coercion) -> Self {
        let mut fv = FreeVars::default();
        fv.add_co(g, &mut Bound::default());
        fv
    }

    pub fn of_expr(e: &Expr) -> Self {
        let mut fv = FreeVars::default();
        fv.add_expr(e, &mut Bound::default());
        fv
    }

    pub fn is_empty(&self) -> bool {
        self.ty.is_empty() && self.co.is_empty() && self.tm.is_empty()
    }

    fn add_type(&mut self, t: &Type, b: &mut Bound) {
        let mut acc = std::collections::BTreeSet::new();
        t.collect_fv(&mut b.ty, &mut acc);
        self.ty.extend(acc);
    }

    fn add_prop(&mut self, p: &Prop, b: &mut Bound) {
        self.add_type(&p.lhs, b);
        self.add_type(&p.rhs, b);
    }

    fn add_co(&mut self, g: &Coercion, b: &mut Bound) {
        match g {
            Coercion::Refl(t) => self.add_type(t, b),
            Coercion::Sym(g) | Coercion::Nth(_, g) => self.add_co(g, b),
            Coercion::Trans(x, y) | Coercion::Arrow(x, y) => {
                self.add_co(x, b);
                self.add_co(y, b);
            }
            Coercion::Con(_, gs) | Coercion::Fam(_, gs) => gs.iter().for_each(|g| self.add_co(g, b)),
            Coercion::Forall(a, g) => {
                b.ty.push(a.clone());
                self.add_co(g, b);
                b.ty.pop();
            }
            Coercion::Qual(x, y, z) => {
                self.add_co(x, b);
                self.add_co(y, b);
                self.add_co(z, b);
            }
            Coercion::Inst(g, t) => {
                self.add_co(g, b);
                self.add_type(t, b);
            }
            Coercion::Var(c) => {
                if !b.co.contains(c) {
                    self.co.insert(c.clone());
                }
            }
            Coercion::Axiom(u) => {
                u.tys.iter().for_each(|t| self.add_type(t, b));
                for r in &u.resolutions {
                    self.add_type(&r.witness, b);
                    self.add_co(&r.proof, b);
                }
            }
        }
    }

    fn add_expr(&mut self, e: &Expr, b: &mut Bound) {
        match e {
            Expr::Var(x) => {
                if !b.tm.contains(x) {
                    self.tm.insert(x.clone());
                }
            }
            Expr::Const(_) => {}
            Expr::Lam(x, t, body) => {
                self.add_type(t, b);
                b.tm.push(x.clone());
                self.add_expr(body, b);
                b.tm.pop();
            }
            Expr::App(f, a) => {
                self.add_expr(f, b);
                self.add_expr(a, b);
            }
            Expr::TLam(a, body) => {
                b.ty.push(a.clone());
                self.add_expr(body, b);
                b.ty.pop();
            }
            Expr::TApp(e, t) => {
                self.add_expr(e, b);
                self.add_type(t, b);
            }
            Expr::CLam(c, p, body) => {
                self.add_prop(p, b);
                b.co.push(c.clone());
                self.add_expr(body, b);
                b.co.pop();
            }
            Expr::CApp(e, g) | Expr::Cast(e, g) => {
                self.add_expr(e, b);
                self.add_co(g, b);
            }
            Expr::Assume(a, body) => {
                a.args.iter().for_each(|t| self.add_type(t, b));
                b.ty.push(a.tyvar.clone());
                b.co.push(a.covar.clone());
                self.add_expr(body, b);
                b.ty.pop();
                b.co.pop();
            }
        }
    }
}

/// A simultaneous substitution over all three namespaces.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Subst {
    pub tys: HashMap<Name, Type>,
    pub cos: HashMap<Name, Coercion>,
    pub tms: HashMap<Name, Expr>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn from_tys<I: IntoIterator<Item = (Name, Type)>>(pairs: I) -> Self {
        Subst { tys: pairs.into_iter().collect(), ..Subst::default() }
    }

    pub fn ty(a: &Name, t: Type) -> Self {
        Subst::from_tys([(a.clone(), t)])
    }

    pub fn co(c: &Name, g: Coercion) -> Self {
        Subst { cos: [(c.clone(), g)].into_iter().collect(), ..Subst::default() }
    }

    pub fn tm(x: &Name, e: Expr) -> Self {
        Subst { tms: [(x.clone(), e)].into_iter().collect(), ..Subst::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.tys.is_empty() && self.cos.is_empty() && self.tms.is_empty()
    }

    pub fn apply_ty(&self, t: &Type) -> Type {
        if self.tys.is_empty() {
            return t.clone();
        }
        Applier::new(self).ty(t)
    }

    pub fn apply_prop(&self, p: &Prop) -> Prop {
        if self.tys.is_empty() {
            return p.clone();
        }
        Applier::new(self).prop(p)
    }

    pub fn apply_co(&self, g: &Coercion) -> Coercion {
        if self.tys.is_empty() && self.cos.is_empty() {
            return g.clone();
        }
        Applier::new(self).co(g)
    }

    pub fn apply_expr(&self, e: &Expr) -> Expr {
        if self.is_empty() {
            return e.clone();
        }
        Applier::new(self).expr(e)
    }

    pub fn apply_assumption(&self, a: &EvalAssumption) -> EvalAssumption {
        EvalAssumption { args: a.args.iter().map(|t| self.apply_ty(t)).collect(), ..a.clone() }
    }
}

struct Applier {
    tys: HashMap<Name, Type>,
    cos: HashMap<Name, Coercion>,
    tms: HashMap<Name, Expr>,
    avoid_ty: HashSet<Name>,
    avoid_co: HashSet<Name>,
    avoid_tm: HashSet<Name>,
}

enum Ns {
    Ty,
    Co,
    Tm,
}

impl Applier {
    fn new(s: &Subst) -> Self {
        let mut range = FreeVars::default();
        for t in s.tys.values() {
            range.add_type(t, &mut Bound::default());
        }
        for g in s.cos.values() {
            range.add_co(g, &mut Bound::default());
        }
        for e in s.tms.values() {
            range.add_expr(e, &mut Bound::default());
        }
        Applier {
            tys: s.tys.clone(),
            cos: s.cos.clone(),
            tms: s.tms.clone(),
            avoid_ty: range.ty,
            avoid_co: range.co,
            avoid_tm: range.tm,
        }
    }

    /// Runs `f` under a binder for `a`, shadowing or renaming as needed.
    /// `body_fv` is only computed when a rename is required.
    fn under<R>(
        &mut self,
        ns: Ns,
        a: &Name,
        body_fv: impl FnOnce() -> HashSet<Name>,
        f: impl FnOnce(&mut Self) -> R,
    ) -> (Name, R) {
        macro_rules! go {
            ($map:ident, $avoid:ident, $mk:expr) => {{
                let old = self.$map.remove(a);
                let mut renamed = None;
                if self.$avoid.contains(a) {
                    let fv = body_fv();
                    let n = a.fresh(|s| self.$avoid.contains(s) || fv.contains(s));
                    self.$map.insert(a.clone(), $mk(n.clone()));
                    let added = self.$avoid.insert(n.clone());
                    renamed = Some((n, added));
                }
                let r = f(self);
                let name = match renamed {
                    Some((n, added)) => {
                        self.$map.remove(a);
                        if added {
                            self.$avoid.remove(&n);
                        }
                        n
                    }
                    None => a.clone(),
                };
                if let Some(o) = old {
                    self.$map.insert(a.clone(), o);
                }
                (name, r)
            }};
        }
        match ns {
            Ns::Ty => go!(tys, avoid_ty, Type::Var),
            Ns::Co => go!(cos, avoid_co, Coercion::Var),
            Ns::Tm => go!(tms, avoid_tm, Expr::Var),
        }
    }

    fn ty(&mut self, t: &Type) -> Type {
        if self.tys.is_empty() {
            return t.clone();
        }
        match t {
            Type::Var(a) => self.tys.get(a).cloned().unwrap_or_else(|| t.clone()),
            Type::Con(h, args) => Type::Con(h.clone(), args.iter().map(|x| self.ty(x)).collect()),
            Type::Fam(f, args) => Type::Fam(f.clone(), args.iter().map(|x| self.ty(x)).collect()),
            Type::Arrow(a, b) => Type::Arrow(Box::new(self.ty(a)), Box::new(self.ty(b))),
            Type::Qual(p, b) => Type::Qual(Box::new(self.prop(p)), Box::new(self.ty(b))),
            Type::Forall(a, body) => {
                let (n, body) = self.under(Ns::Ty, a, || body.free_vars().into_iter().collect(), |s| s.ty(body));
                Type::Forall(n, Box::new(body))
            }
        }
    }

    fn prop(&mut self, p: &Prop) -> Prop {
        Prop { lhs: self.ty(&p.lhs), rhs: self.ty(&p.rhs) }
    }

    fn co(&mut self, g: &Coercion) -> Coercion {
        if self.tys.is_empty() && self.cos.is_empty() {
            return g.clone();
        }
        match g {
            Coercion::Refl(t) => Coercion::Refl(self.ty(t)),
            Coercion::Sym(g) => Coercion::Sym(Box::new(self.co(g))),
            Coercion::Trans(a, b) => Coercion::Trans(Box::new(self.co(a)), Box::new(self.co(b))),
            Coercion::Con(h, gs) => Coercion::Con(h.clone(), gs.iter().map(|g| self.co(g)).collect()),
            Coercion::Fam(f, gs) => Coercion::Fam(f.clone(), gs.iter().map(|g| self.co(g)).collect()),
            Coercion::Arrow(a, b) => Coercion::Arrow(Box::new(self.co(a)), Box::new(self.co(b))),
            Coercion::Qual(a, b, c) => Coercion::Qual(Box::new(self.co(a)), Box::new(self.co(b)), Box::new(self.co(c))),
            Coercion::Nth(i, g) => Coercion::Nth(*i, Box::new(self.co(g))),
            Coercion::Inst(g, t) => Coercion::Inst(Box::new(self.co(g)), self.ty(t)),
            Coercion::Var(c) => self.cos.get(c).cloned().unwrap_or_else(|| g.clone()),
            Coercion::Forall(a, body) => {
                let (n, body) = self.under(Ns::Ty, a, || FreeVars::of_coercion(body).ty, |s| s.co(body));
                Coercion::Forall(n, Box::new(body))
            }
            Coercion::Axiom(u) => Coercion::Axiom(AxiomUse {
                axiom: u.axiom.clone(),
                index: u.index,
                tys: u.tys.iter().map(|t| self.ty(t)).collect(),
                resolutions: u
                    .resolutions
                    .iter()
                    .map(|r| EvalResolution { witness: self.ty(&r.witness), proof: self.co(&r.proof) })
                    .collect(),
            }),
        }
    }

    fn expr(&mut self, e: &Expr) -> Expr {
        match e {
            Expr::Var(x) => self.tms.get(x).cloned().unwrap_or_else(|| e.clone()),
            Expr::Const(_) => e.clone(),
            Expr::App(f, a) => Expr::App(Box::new(self.expr(f)), Box::new(self.expr(a))),
            Expr::TApp(f, t) => Expr::TApp(Box::new(self.expr(f)), self.ty(t)),
            Expr::CApp(f, g) => Expr::CApp(Box::new(self.expr(f)), self.co(g)),
            Expr::Cast(f, g) => Expr::Cast(Box::new(self.expr(f)), self.co(g)),
            Expr::Lam(x, t, body) => {
                let t = self.ty(t);
                let (n, body) = self.under(Ns::Tm, x, || FreeVars::of_expr(body).tm, |s| s.expr(body));
                Expr::Lam(n, t, Box::new(body))
            }
            Expr::TLam(a, body) => {
                let (n, body) = self.under(Ns::Ty, a, || FreeVars::of_expr(body).ty, |s| s.expr(body));
                Expr::TLam(n, Box::new(body))
            }
            Expr::CLam(c, p, body) => {
                let p = self.prop(p);
                let (n, body) = self.under(Ns::Co, c, || FreeVars::of_expr(body).co, |s| s.expr(body));
                Expr::CLam(n, p, Box::new(body))
            }
            Expr::Assume(a, body) => {
                let args = a.args.iter().map(|t| self.ty(t)).collect();
                let (tv, (cv, body)) = self.under(
                    Ns::Ty,
                    &a.tyvar,
                    || FreeVars::of_expr(body).ty,
                    |s| s.under(Ns::Co, &a.covar, || FreeVars::of_expr(body).co, |s| s.expr(body)),
                );
                Expr::Assume(EvalAssumption { tyvar: tv, covar: cv, family: a.family.clone(), args }, Box::new(body))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::{alpha_eq_expr, alpha_eq_ty};

    #[test]
    fn substitution_avoids_capture() {
        // (forall b. a -> b)[b/a] = forall b'. b -> b'
        let t = Type::forall("b", Type::arrow(Type::var("a"), Type::var("b")));
        let out = Subst::ty(&"a".into(), Type::var("b")).apply_ty(&t);
        assert_eq!(out, Type::forall("b'", Type::arrow(Type::var("b"), Type::var("b'"))));
    }

    #[test]
    fn renamed_binder_avoids_inner_binder_names() {
        // forall b. forall b'. a -> b -> b'  with a := b
        let t = Type::forall(
            "b",
            Type::forall("b'", Type::arrow(Type::var("a"), Type::arrow(Type::var("b"), Type::var("b'")))),
        );
        let out = Subst::ty(&"a".into(), Type::var("b")).apply_ty(&t);
        let expected = Type::forall(
            "x",
            Type::forall("y", Type::arrow(Type::var("b"), Type::arrow(Type::var("x"), Type::var("y")))),
        );
        assert!(alpha_eq_ty(&out, &expected), "{out:?}");
    }

    #[test]
    fn shadowed_variables_are_untouched() {
        let t = Type::forall("a", Type::var("a"));
        assert_eq!(Subst::ty(&"a".into(), Type::con("Int", vec![])).apply_ty(&t), t);
    }

    #[test]
    fn term_substitution_goes_under_type_binders() {
        // (/\a. x)[y/x]
        let e = Expr::tlam("a", Expr::var("x"));
        let out = Subst::tm(&"x".into(), Expr::var("y")).apply_expr(&e);
        assert!(alpha_eq_expr(&out, &Expr::tlam("a", Expr::var("y"))));
    }

    #[test]
    fn assume_binders_are_respected() {
        let a = EvalAssumption { tyvar: "r".into(), covar: "c".into(), family: "F".into(), args: vec![Type::var("r")] };
        let e = Expr::assume(a, Expr::cast(Expr::konst("K"), Coercion::Var("c".into())));
        let s = Subst {
            tys: [(Name::new("r"), Type::con("Int", vec![]))].into_iter().collect(),
            cos: [(Name::new("c"), Coercion::refl(Type::con("Int", vec![])))].into_iter().collect(),
            ..Subst::default()
        };
        let out = s.apply_expr(&e);
        match out {
            Expr::Assume(a, body) => {
                assert_eq!(a.args, vec![Type::con("Int", vec![])]);
                assert_eq!(*body, Expr::cast(Expr::konst("K"), Coercion::Var("c".into())));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_vars_split_by_namespace() {
        let e = Expr::lam(
            "x",
            Type::var("a"),
            Expr::cast(Expr::app(Expr::var("x"), Expr::var("y")), Coercion::Var("c".into())),
        );
        let fv = FreeVars::of_expr(&e);
        assert_eq!(fv.ty, ["a".into()].into_iter().collect());
        assert_eq!(fv.co, ["c".into()].into_iter().collect());
        assert_eq!(fv.tm, ["y".into()].into_iter().collect());
    }
}
