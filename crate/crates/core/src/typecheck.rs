//! Well-formedness of types, propositions and contexts; typing of
//! coercions and expressions.
//!
//! All checks are syntax-directed. Binders that clash with a name already in
//! the context are renamed before going under them.

use thiserror::Error;

use crate::alpha::{alpha_eq_prop, alpha_eq_ty};
use crate::name::Name;
use crate::subst::{FreeVars, Subst};
use crate::syntax::{Binding, Coercion, Context, EvalResolution, Expr, Prop, Signature, Type};
use crate::unify::no_conflict;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeErrorKind {
    #[error("family application `{0}` may only appear on the left of a proposition")]
    FamilyOutsideProp(Type),
    #[error("unbound type variable `{0}`")]
    UnboundTyVar(Name),
    #[error("`{name}` expects {expected} argument(s) but was given {found}")]
    ArityMismatch { name: Name, expected: usize, found: usize },
    #[error("undeclared type constructor `{0}`")]
    UndeclaredTyCon(Name),
    #[error("undeclared type family `{0}`")]
    UndeclaredFamily(Name),
    #[error("family application nested inside the arguments or right-hand side of `{0}`")]
    NestedFamilyInProp(Prop),
    #[error("`{0}` is bound twice in the context")]
    DuplicateBinding(Name),
    #[error("binding for `{name}` is ill-formed: {reason}")]
    IllFormedBindingType { name: Name, reason: Box<TypeError> },
    #[error("unbound coercion variable `{0}`")]
    UnboundCoVar(Name),
    #[error("cannot take component {index} of `{prop}`")]
    BadDecomposition { index: usize, prop: Prop },
    #[error("instantiation needs a coercion between foralls, found `{0}`")]
    BadInstantiation(Prop),
    #[error("undeclared axiom `{0}`")]
    UndeclaredAxiom(Name),
    #[error("axiom `{axiom}` has {len} equation(s); index {index} is out of range")]
    AxiomIndexOutOfRange { axiom: Name, index: usize, len: usize },
    #[error("axiom use expects {expected} {what} but was given {found}")]
    ResolutionMismatch { what: &'static str, expected: usize, found: usize },
    #[error("equation {index} of `{axiom}` is blocked by equation {earlier} at this instantiation")]
    ConflictWithEarlierEquation { axiom: Name, index: usize, earlier: usize },
    #[error("transitivity mismatch: `{left}` is not `{right}`")]
    TransMismatch { left: Type, right: Type },
    #[error("resolution witness `{0}` is not a proper type")]
    ImproperWitness(Type),
    #[error("resolution proof has type `{found}` but `{expected}` was required")]
    ProofPropMismatch { expected: Prop, found: Prop },
    #[error("unbound variable `{0}`")]
    UnboundVar(Name),
    #[error("undeclared constant `{0}`")]
    UndeclaredConst(Name),
    #[error("expected {expected}, found an expression of type `{found}`")]
    AppShapeMismatch { expected: &'static str, found: Type },
    #[error("argument has type `{found}` but `{expected}` was expected")]
    ArgTypeMismatch { expected: Type, found: Type },
    #[error("coercion argument proves `{found}` but `{expected}` was expected")]
    CoArgMismatch { expected: Prop, found: Prop },
    #[error("cast coercion starts at `{found}` but the expression has type `{expected}`")]
    CastPropMismatch { expected: Type, found: Type },
    #[error("cast target `{0}` is not a proper type")]
    ImproperCastTarget(Type),
    #[error("`assume` needs a total family, `{0}` is partial")]
    AssumeOnPartialFamily(Name),
    #[error("assumed variable `{var}` escapes in result type `{ty}`")]
    SkolemEscape { var: Name, ty: Type },
}

/// A typing failure together with the rule that rejected the input.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("[{rule}] {kind}")]
pub struct TypeError {
    pub rule: &'static str,
    pub kind: Box<TypeErrorKind>,
}

impl TypeError {
    pub fn new(rule: &'static str, kind: TypeErrorKind) -> Self {
        TypeError { rule, kind: Box::new(kind) }
    }

    /// Stable machine-readable code, the variant name.
    pub fn code(&self) -> &'static str {
        use TypeErrorKind::*;
        match &*self.kind {
            FamilyOutsideProp(_) => "FamilyOutsideProp",
            UnboundTyVar(_) => "UnboundTyVar",
            ArityMismatch { .. } => "ArityMismatch",
            UndeclaredTyCon(_) => "UndeclaredTyCon",
            UndeclaredFamily(_) => "UndeclaredFamily",
            NestedFamilyInProp(_) => "NestedFamilyInProp",
            DuplicateBinding(_) => "DuplicateBinding",
            IllFormedBindingType { .. } => "IllFormedBindingType",
            UnboundCoVar(_) => "UnboundCoVar",
            BadDecomposition { .. } => "BadDecomposition",
            BadInstantiation(_) => "BadDecomposition",
            UndeclaredAxiom(_) => "UndeclaredAxiom",
            AxiomIndexOutOfRange { .. } => "AxiomIndexOutOfRange",
            ResolutionMismatch { .. } => "ResolutionMismatch",
            ConflictWithEarlierEquation { .. } => "ConflictWithEarlierEquation",
            TransMismatch { .. } => "TransMismatch",
            ImproperWitness(_) => "ImproperWitness",
            ProofPropMismatch { .. } => "ProofPropMismatch",
            UnboundVar(_) => "UnboundVar",
            UndeclaredConst(_) => "UndeclaredConst",
            AppShapeMismatch { .. } => "AppShapeMismatch",
            ArgTypeMismatch { .. } => "ArgTypeMismatch",
            CoArgMismatch { .. } => "CoArgMismatch",
            CastPropMismatch { .. } => "CastPropMismatch",
            ImproperCastTarget(_) => "ImproperCastTarget",
            AssumeOnPartialFamily(_) => "AssumeOnPartialFamily",
            SkolemEscape { .. } => "SkolemEscape",
        }
    }
}

type Result<T> = std::result::Result<T, TypeError>;

fn err<T>(rule: &'static str, kind: TypeErrorKind) -> Result<T> {
    Err(TypeError::new(rule, kind))
}

/// Is `t` a proper type in `ctx`?
pub fn check_type(sig: &Signature, ctx: &Context, t: &Type) -> Result<()> {
    Checker::new(sig, ctx).ty(t)
}

/// Is `p` a well-formed proposition in `ctx`?
pub fn check_prop(sig: &Signature, ctx: &Context, p: &Prop) -> Result<()> {
    Checker::new(sig, ctx).prop(p)
}

/// Is `t` a well-scoped pretype (families allowed anywhere)?
pub fn check_pretype(sig: &Signature, ctx: &Context, t: &Type) -> Result<()> {
    Checker::new(sig, ctx).pretype(t)
}

/// Is every binding well-formed in the context before it, with no name bound twice?
pub fn check_ctx(sig: &Signature, ctx: &Context) -> Result<()> {
    let mut prefix = Context::new();
    for b in &ctx.0 {
        if prefix.binds(b.name()) {
            return err("G_Distinct", TypeErrorKind::DuplicateBinding(b.name().clone()));
        }
        let wrap = |rule, reason: TypeError| {
            TypeError::new(
                rule,
                TypeErrorKind::IllFormedBindingType { name: b.name().clone(), reason: Box::new(reason) },
            )
        };
        match b {
            Binding::Ty(_) => {}
            Binding::Co(_, p) => check_prop(sig, &prefix, p).map_err(|e| wrap("G_CoVar", e))?,
            Binding::Tm(_, t) => check_type(sig, &prefix, t).map_err(|e| wrap("G_Var", e))?,
        }
        prefix.push(b.clone());
    }
    Ok(())
}

/// The proposition proved by `g`. Assumes `ctx` is well-formed.
pub fn check_coercion(sig: &Signature, ctx: &Context, g: &Coercion) -> Result<Prop> {
    Checker::new(sig, ctx).co(g)
}

/// The type of `e`. Assumes `ctx` is well-formed.
pub fn infer_expr(sig: &Signature, ctx: &Context, e: &Expr) -> Result<Type> {
    Checker::new(sig, ctx).expr(e)
}

struct Checker<'a> {
    sig: &'a Signature,
    ctx: Context,
}

impl<'a> Checker<'a> {
    fn new(sig: &'a Signature, ctx: &Context) -> Self {
        Checker { sig, ctx: ctx.clone() }
    }

    /// Picks a name for a type binder that does not clash with the context.
    fn fresh_tyvar(&self, a: &Name, body_fv: impl FnOnce() -> FreeVars) -> Option<Name> {
        if !self.ctx.binds(a) {
            return None;
        }
        let fv = body_fv().ty;
        Some(a.fresh(|s| self.ctx.binds(s) || fv.contains(s)))
    }

    fn con_arity(&self, rule: &'static str, h: &Name, n: usize) -> Result<()> {
        match self.sig.ty_cons.get(h) {
            None => err(rule, TypeErrorKind::UndeclaredTyCon(h.clone())),
            Some(&k) if k != n => err(rule, TypeErrorKind::ArityMismatch { name: h.clone(), expected: k, found: n }),
            Some(_) => Ok(()),
        }
    }

    fn fam_arity(&self, rule: &'static str, f: &Name, n: usize) -> Result<()> {
        match self.sig.families.get(f) {
            None => err(rule, TypeErrorKind::UndeclaredFamily(f.clone())),
            Some(d) if d.arity != n => {
                err(rule, TypeErrorKind::ArityMismatch { name: f.clone(), expected: d.arity, found: n })
            }
            Some(_) => Ok(()),
        }
    }

    fn with_ty<R>(&mut self, a: &Name, f: impl FnOnce(&mut Self) -> R) -> R {
        self.ctx.push(Binding::Ty(a.clone()));
        let r = f(self);
        self.ctx.pop();
        r
    }

    fn ty(&mut self, t: &Type) -> Result<()> {
        match t {
            Type::Var(a) => {
                if self.ctx.has_tyvar(a) {
                    Ok(())
                } else {
                    err("T_Var", TypeErrorKind::UnboundTyVar(a.clone()))
                }
            }
            Type::Con(h, args) => {
                self.con_arity("T_Con", h, args.len())?;
                args.iter().try_for_each(|a| self.ty(a))
            }
            Type::Arrow(a, b) => {
                self.ty(a)?;
                self.ty(b)
            }
            Type::Forall(a, body) => self.with_ty(a, |c| c.ty(body)),
            Type::Qual(p, body) => {
                self.prop(p)?;
                self.ty(body)
            }
            Type::Fam(..) => err("T_Fam", TypeErrorKind::FamilyOutsideProp(t.clone())),
        }
    }

    fn prop(&mut self, p: &Prop) -> Result<()> {
        match &p.lhs {
            Type::Fam(f, args) => {
                self.fam_arity("P_Family", f, args.len())?;
                if !args.iter().all(Type::is_family_free) || !p.rhs.is_family_free() {
                    return err("P_Family", TypeErrorKind::NestedFamilyInProp(p.clone()));
                }
                args.iter().try_for_each(|a| self.ty(a))?;
                self.ty(&p.rhs)
            }
            lhs => {
                if let Type::Fam(..) = p.rhs {
                    return err("P_Types", TypeErrorKind::NestedFamilyInProp(p.clone()));
                }
                self.ty(lhs)?;
                self.ty(&p.rhs)
            }
        }
    }

    fn pretype(&mut self, t: &Type) -> Result<()> {
        match t {
            Type::Var(a) => {
                if self.ctx.has_tyvar(a) {
                    Ok(())
                } else {
                    err("C_Refl", TypeErrorKind::UnboundTyVar(a.clone()))
                }
            }
            Type::Con(h, args) => {
                self.con_arity("C_Refl", h, args.len())?;
                args.iter().try_for_each(|a| self.pretype(a))
            }
            Type::Fam(f, args) => {
                self.fam_arity("C_Refl", f, args.len())?;
                args.iter().try_for_each(|a| self.pretype(a))
            }
            Type::Arrow(a, b) => {
                self.pretype(a)?;
                self.pretype(b)
            }
            Type::Forall(a, body) => self.with_ty(a, |c| c.pretype(body)),
            Type::Qual(p, body) => {
                self.pretype(&p.lhs)?;
                self.pretype(&p.rhs)?;
                self.pretype(body)
            }
        }
    }

    fn co(&mut self, g: &Coercion) -> Result<Prop> {
        use Coercion as C;
        match g {
            C::Refl(t) => {
                self.pretype(t)?;
                Ok(Prop::new(t.clone(), t.clone()))
            }
            C::Sym(h) => Ok(self.co(h)?.swap()),
            C::Trans(a, b) => {
                let p = self.co(a)?;
                let q = self.co(b)?;
                if !alpha_eq_ty(&p.rhs, &q.lhs) {
                    return err("C_Trans", TypeErrorKind::TransMismatch { left: p.rhs, right: q.lhs });
                }
                Ok(Prop::new(p.lhs, q.rhs))
            }
            C::Con(h, gs) => {
                self.con_arity("C_Con", h, gs.len())?;
                let ps = gs.iter().map(|g| self.co(g)).collect::<Result<Vec<_>>>()?;
                let (l, r) = ps.into_iter().map(|p| (p.lhs, p.rhs)).unzip();
                Ok(Prop::new(Type::Con(h.clone(), l), Type::Con(h.clone(), r)))
            }
            C::Fam(f, gs) => {
                self.fam_arity("C_Fam", f, gs.len())?;
                let ps = gs.iter().map(|g| self.co(g)).collect::<Result<Vec<_>>>()?;
                let (l, r) = ps.into_iter().map(|p| (p.lhs, p.rhs)).unzip();
                Ok(Prop::new(Type::Fam(f.clone(), l), Type::Fam(f.clone(), r)))
            }
            C::Arrow(a, b) => {
                let p = self.co(a)?;
                let q = self.co(b)?;
                Ok(Prop::new(Type::arrow(p.lhs, q.lhs), Type::arrow(p.rhs, q.rhs)))
            }
            C::Qual(a, b, c) => {
                let p1 = self.co(a)?;
                let p2 = self.co(b)?;
                let p3 = self.co(c)?;
                Ok(Prop::new(
                    Type::qual(Prop::new(p1.lhs, p2.lhs), p3.lhs),
                    Type::qual(Prop::new(p1.rhs, p2.rhs), p3.rhs),
                ))
            }
            C::Forall(a, body) => {
                let (a, body) = match self.fresh_tyvar(a, || FreeVars::of_coercion(body)) {
                    Some(n) => (n.clone(), Subst::ty(a, Type::Var(n)).apply_co(body)),
                    None => (a.clone(), (**body).clone()),
                };
                let p = self.with_ty(&a, |c| c.co(&body))?;
                Ok(Prop::new(Type::Forall(a.clone(), Box::new(p.lhs)), Type::Forall(a, Box::new(p.rhs))))
            }
            C::Nth(i, h) => {
                let p = self.co(h)?;
                nth(*i, &p)
                    .ok_or_else(|| TypeError::new("C_Nth", TypeErrorKind::BadDecomposition { index: *i, prop: p }))
            }
            C::Inst(h, t) => {
                let p = self.co(h)?;
                self.ty(t).map_err(|e| TypeError { rule: "C_Inst", ..e })?;
                match (&p.lhs, &p.rhs) {
                    (Type::Forall(a, s1), Type::Forall(b, s2)) => {
                        Ok(Prop::new(Subst::ty(a, t.clone()).apply_ty(s1), Subst::ty(b, t.clone()).apply_ty(s2)))
                    }
                    _ => err("C_Inst", TypeErrorKind::BadInstantiation(p)),
                }
            }
            C::Var(c) => match self.ctx.lookup_co(c) {
                Some(p) => Ok(p.clone()),
                None => err("C_Var", TypeErrorKind::UnboundCoVar(c.clone())),
            },
            C::Axiom(u) => self.axiom(&u.axiom, u.index, &u.tys, &u.resolutions),
        }
    }

    fn axiom(&mut self, name: &Name, index: usize, tys: &[Type], res: &[EvalResolution]) -> Result<Prop> {
        let sig = self.sig;
        let ax = sig
            .axioms
            .get(name)
            .ok_or_else(|| TypeError::new("C_Axiom", TypeErrorKind::UndeclaredAxiom(name.clone())))?;
        let eq = ax.equations.get(index).ok_or_else(|| {
            TypeError::new(
                "C_Axiom",
                TypeErrorKind::AxiomIndexOutOfRange { axiom: name.clone(), index, len: ax.equations.len() },
            )
        })?;
        if tys.len() != eq.tyvars.len() {
            return err(
                "C_Axiom",
                TypeErrorKind::ResolutionMismatch {
                    what: "type argument(s)",
                    expected: eq.tyvars.len(),
                    found: tys.len(),
                },
            );
        }
        if res.len() != eq.assumptions.len() {
            return err(
                "C_Axiom",
                TypeErrorKind::ResolutionMismatch {
                    what: "resolution(s)",
                    expected: eq.assumptions.len(),
                    found: res.len(),
                },
            );
        }
        for t in tys {
            self.ty(t).map_err(|e| TypeError { rule: "C_Axiom", ..e })?;
        }
        let eq = crate::unify::rename_equation(eq, "ax");
        let mut theta = Subst::from_tys(eq.tyvars.iter().cloned().zip(tys.iter().cloned()));
        for (chi, q) in eq.assumptions.iter().zip(res) {
            let expected = Prop::new(
                Type::Fam(chi.family.clone(), chi.args.iter().map(|t| theta.apply_ty(t)).collect()),
                q.witness.clone(),
            );
            if self.ty(&q.witness).is_err() {
                return err("A_Cons", TypeErrorKind::ImproperWitness(q.witness.clone()));
            }
            let found = self.co(&q.proof)?;
            if !alpha_eq_prop(&found, &expected) {
                return err("A_Cons", TypeErrorKind::ProofPropMismatch { expected, found });
            }
            theta.tys.insert(chi.tyvar.clone(), q.witness.clone());
        }
        let original = &ax.equations[index];
        for j in 0..index {
            if !no_conflict(&ax.equations[j], original, tys) {
                return err(
                    "C_Axiom",
                    TypeErrorKind::ConflictWithEarlierEquation { axiom: name.clone(), index, earlier: j },
                );
            }
        }
        let lhs = Type::Fam(eq.family.clone(), eq.lhs.iter().map(|t| theta.apply_ty(t)).collect());
        Ok(Prop::new(lhs, theta.apply_ty(&eq.rhs)))
    }

    fn expr(&mut self, e: &Expr) -> Result<Type> {
        match e {
            Expr::Var(x) => match self.ctx.lookup_tm(x) {
                Some(t) => Ok(t.clone()),
                None => err("E_Var", TypeErrorKind::UnboundVar(x.clone())),
            },
            Expr::Const(k) => match self.sig.consts.get(k) {
                Some(t) => Ok(t.clone()),
                None => err("E_Const", TypeErrorKind::UndeclaredConst(k.clone())),
            },
            Expr::Lam(x, t, body) => {
                self.ty(t).map_err(|e| TypeError { rule: "E_Lam", ..e })?;
                self.ctx.push(Binding::Tm(x.clone(), t.clone()));
                let r = self.expr(body);
                self.ctx.pop();
                Ok(Type::arrow(t.clone(), r?))
            }
            Expr::App(f, a) => {
                let ft = self.expr(f)?;
                let at = self.expr(a)?;
                match ft {
                    Type::Arrow(dom, cod) => {
                        if alpha_eq_ty(&dom, &at) {
                            Ok(*cod)
                        } else {
                            err("E_App", TypeErrorKind::ArgTypeMismatch { expected: *dom, found: at })
                        }
                    }
                    other => err("E_App", TypeErrorKind::AppShapeMismatch { expected: "a function", found: other }),
                }
            }
            Expr::TLam(a, body) => {
                let (a, body) = match self.fresh_tyvar(a, || FreeVars::of_expr(body)) {
                    Some(n) => (n.clone(), Subst::ty(a, Type::Var(n)).apply_expr(body)),
                    None => (a.clone(), (**body).clone()),
                };
                let t = self.with_ty(&a, |c| c.expr(&body))?;
                Ok(Type::Forall(a, Box::new(t)))
            }
            Expr::TApp(f, t) => {
                let ft = self.expr(f)?;
                self.ty(t).map_err(|e| TypeError { rule: "E_TApp", ..e })?;
                match ft {
                    Type::Forall(a, body) => Ok(Subst::ty(&a, t.clone()).apply_ty(&body)),
                    other => {
                        err("E_TApp", TypeErrorKind::AppShapeMismatch { expected: "a polymorphic value", found: other })
                    }
                }
            }
            Expr::CLam(c, p, body) => {
                self.prop(p).map_err(|e| TypeError { rule: "E_CLam", ..e })?;
                self.ctx.push(Binding::Co(c.clone(), p.clone()));
                let r = self.expr(body);
                self.ctx.pop();
                Ok(Type::qual(p.clone(), r?))
            }
            Expr::CApp(f, g) => {
                let ft = self.expr(f)?;
                let found = self.co(g)?;
                match ft {
                    Type::Qual(p, body) => {
                        if alpha_eq_prop(&p, &found) {
                            Ok(*body)
                        } else {
                            err("E_CApp", TypeErrorKind::CoArgMismatch { expected: *p, found })
                        }
                    }
                    other => {
                        err("E_CApp", TypeErrorKind::AppShapeMismatch { expected: "a qualified value", found: other })
                    }
                }
            }
            Expr::Cast(inner, g) => {
                let t = self.expr(inner)?;
                let p = self.co(g)?;
                if !alpha_eq_ty(&t, &p.lhs) {
                    return err("E_Cast", TypeErrorKind::CastPropMismatch { expected: t, found: p.lhs });
                }
                if self.ty(&p.rhs).is_err() {
                    return err("E_Cast", TypeErrorKind::ImproperCastTarget(p.rhs));
                }
                Ok(p.rhs)
            }
            Expr::Assume(chi, body) => {
                if !self.sig.is_total(&chi.family) {
                    if !self.sig.families.contains_key(&chi.family) {
                        return err("E_Assume", TypeErrorKind::UndeclaredFamily(chi.family.clone()));
                    }
                    return err("E_Assume", TypeErrorKind::AssumeOnPartialFamily(chi.family.clone()));
                }
                let mut tyvar = chi.tyvar.clone();
                let mut body = (**body).clone();
                if let Some(n) = self.fresh_tyvar(&chi.tyvar, || FreeVars::of_expr(&body)) {
                    body = Subst::ty(&chi.tyvar, Type::Var(n.clone())).apply_expr(&body);
                    tyvar = n;
                }
                let prop = Prop::new(Type::Fam(chi.family.clone(), chi.args.clone()), Type::Var(tyvar.clone()));
                self.ctx.push(Binding::Ty(tyvar.clone()));
                let checked = self.prop(&prop).map_err(|e| TypeError { rule: "E_Assume", ..e });
                self.ctx.push(Binding::Co(chi.covar.clone(), prop));
                let r = checked.and_then(|_| self.expr(&body));
                self.ctx.pop();
                self.ctx.pop();
                let t = r?;
                if t.mentions(&tyvar) {
                    return err("E_Assume", TypeErrorKind::SkolemEscape { var: tyvar, ty: t });
                }
                Ok(t)
            }
        }
    }
}

/// Component `i` of a proposition relating two types with the same head.
pub fn nth(i: usize, p: &Prop) -> Option<Prop> {
    match (&p.lhs, &p.rhs) {
        (Type::Con(h, xs), Type::Con(k, ys)) if h == k && xs.len() == ys.len() && i < xs.len() => {
            Some(Prop::new(xs[i].clone(), ys[i].clone()))
        }
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => match i {
            0 => Some(Prop::new((**a1).clone(), (**b1).clone())),
            1 => Some(Prop::new((**a2).clone(), (**b2).clone())),
            _ => None,
        },
        (Type::Qual(p1, a), Type::Qual(q1, b)) => match i {
            0 => Some(Prop::new(p1.lhs.clone(), q1.lhs.clone())),
            1 => Some(Prop::new(p1.rhs.clone(), q1.rhs.clone())),
            2 => Some(Prop::new((**a).clone(), (**b).clone())),
            _ => None,
        },
        _ => None,
    }
}
