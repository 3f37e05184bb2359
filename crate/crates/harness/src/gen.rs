//! Type-directed generators over a world.
//!
//! Expressions are built bottom-up together with their types, so every
//! generated expression has a derivation by construction. Coercions used in
//! casts are "detours": they leave a type and come back to it, passing
//! through family applications, congruences, projections and instantiations.

use std::collections::BTreeSet;

use cfc_core::alpha::alpha_eq_ty;
use cfc_core::rewrite::top_reduce;
use cfc_core::subst::Subst;
use cfc_core::{Binding, Coercion, Context, EvalAssumption, Expr, Name, Prop, Type};
use rand::Rng;

use crate::world::{Palette, World};

/// Share of generated closed types that are forced to contain a family
/// application under a constructor.
pub const FAMILY_UNDER_CON_BIAS: f64 = 0.3;

pub struct Gen<'w, 'r, R: Rng> {
    w: &'w World,
    pal: Palette,
    rng: &'r mut R,
    next: usize,
    ctx: Context,
    /// Type variables introduced by `assume`; they never appear in
    /// annotations, so they cannot escape.
    hidden: BTreeSet<Name>,
    /// Binders enclosing the type being generated by `pre`.
    bound: Vec<Name>,
}

impl<'w, 'r, R: Rng> Gen<'w, 'r, R> {
    pub fn new(w: &'w World, rng: &'r mut R) -> Self {
        Gen { w, pal: w.palette(), rng, next: 0, ctx: Context::new(), hidden: BTreeSet::new(), bound: vec![] }
    }

    fn fresh(&mut self, prefix: &str) -> Name {
        self.next += 1;
        Name::from(format!("{prefix}{}", self.next))
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> Option<&'a T> {
        if xs.is_empty() {
            None
        } else {
            Some(&xs[self.rng.gen_range(0..xs.len())])
        }
    }

    fn nullary(&mut self) -> Type {
        let n: Vec<Name> = self.pal.cons.iter().filter(|(_, k)| *k == 0).map(|(h, _)| h.clone()).collect();
        Type::Con(self.pick(&n).expect("worlds have nullary constructors").clone(), vec![])
    }

    fn con(&mut self) -> (Name, usize) {
        self.pal.cons[self.rng.gen_range(0..self.pal.cons.len())].clone()
    }

    fn families(&self) -> Vec<(Name, usize)> {
        self.w.sig.families.iter().map(|(f, d)| (f.clone(), d.arity)).collect()
    }

    fn total_families(&self) -> Vec<(Name, usize)> {
        self.w.sig.families.iter().filter(|(_, d)| d.total).map(|(f, d)| (f.clone(), d.arity)).collect()
    }

    fn visible_tyvars(&self) -> Vec<Name> {
        self.ctx.tyvars().filter(|a| !self.hidden.contains(*a)).cloned().collect()
    }

    fn with<T>(&mut self, b: Binding, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ctx.push(b);
        let r = f(self);
        self.ctx.pop();
        r
    }

    // ---- types ----

    /// A proper type well-formed in the current context.
    pub fn proper(&mut self, depth: usize) -> Type {
        let vars = self.visible_tyvars();
        if depth <= 1 || self.chance(0.3) {
            if !vars.is_empty() && self.chance(0.4) {
                return Type::Var(self.pick(&vars).unwrap().clone());
            }
            return self.nullary();
        }
        match self.rng.gen_range(0..100) {
            0..=69 => {
                let (h, k) = self.con();
                Type::Con(h, (0..k).map(|_| self.proper(depth - 1)).collect())
            }
            70..=93 => Type::arrow(self.proper(depth - 1), self.proper(depth - 1)),
            _ => {
                let b = self.fresh("b");
                let body = self.with(Binding::Ty(b.clone()), |g| g.proper(depth - 1));
                Type::Forall(b.clone(), Box::new(Type::arrow(Type::Var(b), body)))
            }
        }
    }

    /// A closed pretype. A fixed share of them carry a family application
    /// under a constructor.
    pub fn pretype(&mut self) -> Type {
        if self.w.sig.families.is_empty() {
            return self.pal.ground_any(self.rng, 3);
        }
        if self.chance(FAMILY_UNDER_CON_BIAS) {
            self.family_under_con(3)
        } else {
            self.pre(4, 0.2)
        }
    }

    /// A pretype rich in redexes, for the rewriting suites.
    pub fn redex_rich(&mut self) -> Type {
        if self.w.sig.families.is_empty() {
            return self.pal.ground_any(self.rng, 3);
        }
        match self.rng.gen_range(0..6) {
            0 => self.family_under_con(3),
            1 => self.pre(4, 0.35),
            2 => {
                let (h, k) = self.wide_con();
                Type::Con(h, (0..k).map(|_| self.family_under_con(2)).collect())
            }
            _ if self.w.table.is_empty() => self.family_under_con(3),
            3 => Type::arrow(self.seeded(3), self.seeded(3)),
            _ => {
                let (h, k) = self.wide_con();
                Type::Con(h, (0..k).map(|_| self.seeded(3)).collect())
            }
        }
    }

    /// A closed type that rewrites to a reduct from the resolution table,
    /// with further reducible applications nested in its arguments.
    fn seeded(&mut self, depth: usize) -> Type {
        let w = self.w;
        let r = &w.table[self.rng.gen_range(0..w.table.len())];
        let t = r.reduct.clone();
        self.unreduce(&t, depth)
    }

    /// Replaces subterms of a closed proper type by table entries that
    /// reduce to them.
    fn unreduce(&mut self, t: &Type, depth: usize) -> Type {
        if depth == 0 {
            return t.clone();
        }
        let w = self.w;
        let sources: Vec<&crate::world::Resolved> = w.proofs_of(t).collect();
        if !sources.is_empty() && self.chance(0.7) {
            let r = sources[self.rng.gen_range(0..sources.len())];
            let args = r.args.iter().map(|a| self.unreduce(a, depth - 1)).collect();
            return Type::Fam(r.family.clone(), args);
        }
        match t {
            Type::Con(h, args) => Type::Con(h.clone(), args.iter().map(|a| self.unreduce(a, depth - 1)).collect()),
            Type::Arrow(a, b) => Type::arrow(self.unreduce(a, depth - 1), self.unreduce(b, depth - 1)),
            _ => t.clone(),
        }
    }

    fn wide_con(&mut self) -> (Name, usize) {
        let best = self.pal.cons.iter().map(|(_, k)| *k).max().unwrap_or(0);
        let wide: Vec<(Name, usize)> = self.pal.cons.iter().filter(|(_, k)| *k == best).cloned().collect();
        self.pick(&wide).unwrap().clone()
    }

    fn leaf(&mut self) -> Type {
        if !self.bound.is_empty() && self.chance(0.3) {
            let b = self.bound.clone();
            return Type::Var(self.pick(&b).unwrap().clone());
        }
        self.nullary()
    }

    fn fam_app(&mut self, depth: usize, pfam: f64) -> Type {
        let fams = self.families();
        let (f, k) = self.pick(&fams).unwrap().clone();
        let args = (0..k)
            .map(|_| {
                if self.chance(0.25) {
                    self.pre(depth.saturating_sub(1), pfam)
                } else if !self.bound.is_empty() && self.chance(0.2) {
                    self.leaf()
                } else {
                    self.pal.ground_any(self.rng, depth.max(1))
                }
            })
            .collect();
        Type::Fam(f, args)
    }

    fn pre(&mut self, depth: usize, pfam: f64) -> Type {
        if depth <= 1 {
            return self.leaf();
        }
        let r: f64 = self.rng.gen();
        if r < pfam {
            return self.fam_app(depth, pfam);
        }
        match self.rng.gen_range(0..100) {
            0..=69 => {
                let (h, k) = self.con();
                Type::Con(h, (0..k).map(|_| self.pre(depth - 1, pfam)).collect())
            }
            70..=89 => Type::arrow(self.pre(depth - 1, pfam), self.pre(depth - 1, pfam)),
            _ => {
                let b = self.fresh("b");
                self.bound.push(b.clone());
                let body = self.pre(depth - 1, pfam);
                self.bound.pop();
                Type::Forall(b, Box::new(body))
            }
        }
    }

    fn family_under_con(&mut self, depth: usize) -> Type {
        let with_args: Vec<(Name, usize)> = self.pal.cons.iter().filter(|(_, k)| *k > 0).cloned().collect();
        let Some((h, k)) = self.pick(&with_args).cloned() else {
            return Type::arrow(self.fam_app(depth, 0.2), self.pre(depth, 0.2));
        };
        let at = self.rng.gen_range(0..k);
        let args = (0..k)
            .map(|i| if i == at { self.fam_app(depth, 0.2) } else { self.pre(depth.saturating_sub(1), 0.3) })
            .collect();
        Type::Con(h, args)
    }

    // ---- coercions ----

    /// Proofs `X ~ t` for some family application `X`: table entries and
    /// coercion variables in scope.
    fn proofs_into(&self, t: &Type) -> Vec<(Type, Coercion)> {
        let mut out: Vec<(Type, Coercion)> = self.w.proofs_of(t).map(|r| (r.app(), r.proof.clone())).collect();
        for b in &self.ctx.0 {
            if let Binding::Co(c, p) = b {
                if matches!(p.lhs, Type::Fam(..)) && alpha_eq_ty(&p.rhs, t) {
                    out.push((p.lhs.clone(), Coercion::Var(c.clone())));
                }
            }
        }
        out
    }

    /// A coercion `t ~ t` (up to alpha) for a proper type `t`.
    pub fn detour(&mut self, t: &Type, depth: usize) -> Coercion {
        if depth == 0 {
            return Coercion::Refl(t.clone());
        }
        match self.rng.gen_range(0..100) {
            0..=19 => Coercion::Refl(t.clone()),
            20..=49 => self.congruence(t, depth),
            50..=74 => {
                let proofs = self.proofs_into(t);
                match self.pick(&proofs).cloned() {
                    None => self.congruence(t, depth),
                    Some((app, g)) => {
                        let mid = match (&app, self.chance(0.5)) {
                            (Type::Fam(f, args), true) => {
                                let inner = args.iter().map(|a| self.detour(a, depth - 1)).collect();
                                Coercion::trans(Coercion::Fam(f.clone(), inner), g.clone())
                            }
                            _ => g.clone(),
                        };
                        Coercion::trans(Coercion::sym(g), mid)
                    }
                }
            }
            75..=84 => {
                let with_args: Vec<(Name, usize)> = self.pal.cons.iter().filter(|(_, k)| *k > 0).cloned().collect();
                let Some((h, k)) = self.pick(&with_args).cloned() else { return Coercion::Refl(t.clone()) };
                let at = self.rng.gen_range(0..k);
                let gs =
                    (0..k)
                        .map(|i| {
                            if i == at {
                                self.detour(t, depth - 1)
                            } else {
                                Coercion::Refl(self.pal.ground(self.rng, 2))
                            }
                        })
                        .collect();
                Coercion::nth(at, Coercion::Con(h, gs))
            }
            85..=91 => {
                let b = self.fresh("b");
                Coercion::inst(Coercion::Forall(b.clone(), Box::new(Coercion::Refl(Type::Var(b)))), t.clone())
            }
            92..=95 => Coercion::sym(self.detour(t, depth - 1)),
            _ => Coercion::trans(self.detour(t, depth - 1), self.detour(t, depth - 1)),
        }
    }

    fn congruence(&mut self, t: &Type, depth: usize) -> Coercion {
        match t {
            Type::Con(h, args) => Coercion::Con(h.clone(), args.iter().map(|a| self.detour(a, depth - 1)).collect()),
            Type::Arrow(a, b) => {
                Coercion::Arrow(Box::new(self.detour(a, depth - 1)), Box::new(self.detour(b, depth - 1)))
            }
            Type::Forall(a, body) => {
                let inner = self.with(Binding::Ty(a.clone()), |g| g.detour(body, depth - 1));
                Coercion::Forall(a.clone(), Box::new(inner))
            }
            Type::Qual(p, body) => {
                let lhs = match &p.lhs {
                    Type::Fam(f, args) => {
                        Coercion::Fam(f.clone(), args.iter().map(|a| self.detour(a, depth - 1)).collect())
                    }
                    other => self.detour(other, depth - 1),
                };
                let rhs = self.detour(&p.rhs, depth - 1);
                Coercion::Qual(Box::new(lhs), Box::new(rhs), Box::new(self.detour(body, depth - 1)))
            }
            Type::Var(_) | Type::Fam(..) => Coercion::Refl(t.clone()),
        }
    }

    /// A proposition valid in the current context together with a proof.
    fn prop_with_proof(&mut self) -> (Prop, Coercion) {
        let r = self.rng.gen_range(0..100);
        if r < 40 {
            let w = self.w;
            if let Some(res) = self.pick(&w.table) {
                return (World::resolved_prop(res), res.proof.clone());
            }
        }
        if r < 70 {
            let fams = self.families();
            if let Some((f, k)) = self.pick(&fams).cloned() {
                let args: Vec<Type> = (0..k).map(|_| self.proper(2)).collect();
                if let Ok(red) = top_reduce(&self.w.sig, &f, &args) {
                    return (Prop::new(Type::Fam(f, args), red.ty.clone()), red.proof());
                }
            }
        }
        let t = self.proper(2);
        let g = self.detour(&t, 2);
        (Prop::new(t.clone(), t), g)
    }

    /// A coercion out of the closed pretype `t`, and its right endpoint.
    pub fn coercion_from(&mut self, t: &Type, depth: usize) -> (Coercion, Type) {
        let refl = |t: &Type| (Coercion::Refl(t.clone()), t.clone());
        if depth == 0 {
            return refl(t);
        }
        let r = self.rng.gen_range(0..100);
        if r < 10 {
            return refl(t);
        }
        if r < 35 {
            if let Type::Fam(f, args) = t {
                if let Ok(red) = top_reduce(&self.w.sig, f, args) {
                    return (red.proof(), red.ty.clone());
                }
            }
            if t.is_family_free() {
                let back: Vec<(Type, Coercion)> = self.proofs_into(t);
                if let Some((app, g)) = self.pick(&back).cloned() {
                    return (Coercion::sym(g), app);
                }
            }
        }
        if r < 50 {
            let (g1, t1) = self.coercion_from(t, depth - 1);
            let (g2, t2) = self.coercion_from(&t1, depth - 1);
            return (Coercion::trans(g1, g2), t2);
        }
        if r < 58 {
            let with_args: Vec<(Name, usize)> = self.pal.cons.iter().filter(|(_, k)| *k > 0).cloned().collect();
            if let Some((h, k)) = self.pick(&with_args).cloned() {
                let at = self.rng.gen_range(0..k);
                let mut rhs = t.clone();
                let gs = (0..k)
                    .map(|i| {
                        if i == at {
                            let (g, u) = self.coercion_from(t, depth - 1);
                            rhs = u;
                            g
                        } else {
                            Coercion::Refl(self.pal.ground(self.rng, 2))
                        }
                    })
                    .collect();
                return (Coercion::nth(at, Coercion::Con(h, gs)), rhs);
            }
        }
        if r < 63 && t.is_family_free() {
            let b = self.fresh("b");
            let g = Coercion::inst(Coercion::Forall(b.clone(), Box::new(Coercion::Refl(Type::Var(b)))), t.clone());
            return (g, t.clone());
        }
        if r < 68 {
            let (g, _) = self.coercion_from(t, depth - 1);
            return (Coercion::trans(g.clone(), Coercion::sym(g)), t.clone());
        }
        match t {
            Type::Con(h, args) => {
                let (gs, us): (Vec<_>, Vec<_>) = args.iter().map(|a| self.coercion_from(a, depth - 1)).unzip();
                (Coercion::Con(h.clone(), gs), Type::Con(h.clone(), us))
            }
            Type::Fam(f, args) => {
                let (gs, us): (Vec<_>, Vec<_>) = args.iter().map(|a| self.coercion_from(a, depth - 1)).unzip();
                (Coercion::Fam(f.clone(), gs), Type::Fam(f.clone(), us))
            }
            Type::Arrow(a, b) => {
                let (g1, u1) = self.coercion_from(a, depth - 1);
                let (g2, u2) = self.coercion_from(b, depth - 1);
                (Coercion::Arrow(Box::new(g1), Box::new(g2)), Type::arrow(u1, u2))
            }
            Type::Forall(a, body) => {
                let (g, u) = self.with(Binding::Ty(a.clone()), |s| s.coercion_from(body, depth - 1));
                (Coercion::Forall(a.clone(), Box::new(g)), Type::Forall(a.clone(), Box::new(u)))
            }
            Type::Qual(p, body) => {
                let (g1, u1) = self.coercion_from(&p.lhs, depth - 1);
                let (g2, u2) = self.coercion_from(&p.rhs, depth - 1);
                let (g3, u3) = self.coercion_from(body, depth - 1);
                (Coercion::Qual(Box::new(g1), Box::new(g2), Box::new(g3)), Type::qual(Prop::new(u1, u2), u3))
            }
            Type::Var(_) => refl(t),
        }
    }

    /// A closed coercion built from a random closed pretype.
    pub fn coercion(&mut self) -> Coercion {
        let t = self.redex_rich();
        let (g, _) = self.coercion_from(&t, 4);
        if self.chance(0.3) {
            Coercion::sym(g)
        } else {
            g
        }
    }

    // ---- expressions ----

    /// A closed expression and its type.
    pub fn expr(&mut self) -> (Expr, Type) {
        self.next = 0;
        self.ctx = Context::new();
        self.hidden.clear();
        let depth = self.rng.gen_range(2..=5);
        let (mut e, mut t) = self.expr_at(depth);
        // Saturate, so that evaluation runs under the outer binders.
        for _ in 0..4 {
            match t.clone() {
                Type::Arrow(dom, cod) => match self.inhabit(&dom, 2) {
                    Some(a) => (e, t) = (Expr::app(e, a), *cod),
                    None => break,
                },
                Type::Forall(a, body) if self.chance(0.8) => {
                    let u = self.proper(2);
                    t = Subst::ty(&a, u.clone()).apply_ty(&body);
                    e = Expr::tapp(e, u);
                }
                _ => break,
            }
        }
        (e, t)
    }

    fn consts(&self) -> Vec<(Name, Type)> {
        self.w.sig.consts.iter().map(|(k, t)| (k.clone(), t.clone())).collect()
    }

    fn tm_vars(&self) -> Vec<(Name, Type)> {
        self.ctx
            .0
            .iter()
            .filter_map(|b| match b {
                Binding::Tm(x, t) => Some((x.clone(), t.clone())),
                _ => None,
            })
            .collect()
    }

    /// A term variable is only usable if no later binding shadows it.
    fn usable_vars(&self) -> Vec<(Name, Type)> {
        let all = self.tm_vars();
        all.iter()
            .enumerate()
            .filter(|(i, (x, _))| !all[i + 1..].iter().any(|(y, _)| y == x))
            .map(|(_, v)| v.clone())
            .collect()
    }

    fn leaf_expr(&mut self) -> (Expr, Type) {
        let vars = self.usable_vars();
        if !vars.is_empty() && self.chance(0.5) {
            let (x, t) = self.pick(&vars).unwrap().clone();
            return (Expr::Var(x), t);
        }
        let ks = self.consts();
        let (k, t) = self.pick(&ks).expect("worlds have constants").clone();
        (Expr::Const(k), t)
    }

    fn expr_at(&mut self, depth: usize) -> (Expr, Type) {
        if depth == 0 || self.chance(0.15) {
            return self.leaf_expr();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..100) {
            0..=13 => {
                let t = self.proper(2);
                let x = self.fresh("x");
                let (b, bt) = self.with(Binding::Tm(x.clone(), t.clone()), |g| g.expr_at(d));
                (Expr::lam(&x, t.clone(), b), Type::arrow(t, bt))
            }
            14..=30 => {
                let (a, at) = self.expr_at(d);
                let x = self.fresh("x");
                let (b, bt) = self.with(Binding::Tm(x.clone(), at.clone()), |g| g.expr_at(d));
                (Expr::app(Expr::lam(&x, at, b), a), bt)
            }
            31..=40 => {
                let (f, ft) = self.expr_at(d);
                if let Type::Arrow(dom, cod) = &ft {
                    if let Some(arg) = self.inhabit(dom, d) {
                        return (Expr::app(f, arg), (**cod).clone());
                    }
                }
                (f, ft)
            }
            41..=53 => {
                let a = self.fresh("a");
                let (b, bt) = self.with(Binding::Ty(a.clone()), |g| g.expr_at(d));
                let e = Expr::tlam(&a, b);
                if self.chance(0.7) {
                    let t = self.proper(2);
                    let rt = Subst::ty(&a, t.clone()).apply_ty(&bt);
                    (Expr::tapp(e, t), rt)
                } else {
                    (e, Type::Forall(a, Box::new(bt)))
                }
            }
            54..=65 => {
                let (p, g) = self.prop_with_proof();
                let c = self.fresh("c");
                let (b, bt) = self.with(Binding::Co(c.clone(), p.clone()), |s| s.expr_at(d));
                let e = Expr::clam(&c, p.clone(), b);
                if self.chance(0.7) {
                    (Expr::capp(e, g), bt)
                } else {
                    (e, Type::qual(p, bt))
                }
            }
            66..=85 => {
                let (e, t) = self.expr_at(d);
                let g = self.detour(&t, 3);
                (Expr::cast(e, g), t)
            }
            _ => self.assume(d),
        }
    }

    /// `assume (v | c : F args ~ v) in body`, where the body passes a value
    /// through `v` and back when a proof for `F args` is at hand.
    fn assume(&mut self, d: usize) -> (Expr, Type) {
        let totals = self.total_families();
        let Some((f, k)) = self.pick(&totals).cloned() else { return self.expr_at(d) };
        let args: Vec<Type> = (0..k).map(|_| self.proper(2)).collect();
        let v = self.fresh("v");
        let c = self.fresh("c");
        let prop = Prop::new(Type::Fam(f.clone(), args.clone()), Type::Var(v.clone()));
        let known = top_reduce(&self.w.sig, &f, &args).ok().map(|r| (r.ty.clone(), r.proof()));
        self.ctx.push(Binding::Ty(v.clone()));
        self.hidden.insert(v.clone());
        self.ctx.push(Binding::Co(c.clone(), prop));
        let mut body = None;
        if let Some((r, g)) = known {
            if self.chance(0.7) {
                if let Some(er) = self.inhabit(&r, d) {
                    let cv = Coercion::Var(c.clone());
                    let into = Coercion::trans(Coercion::sym(g.clone()), cv.clone());
                    let back = Coercion::trans(Coercion::sym(cv), g);
                    let x = self.fresh("x");
                    let e = Expr::app(
                        Expr::lam(&x, Type::Var(v.clone()), Expr::cast(Expr::var(&x), back)),
                        Expr::cast(er, into),
                    );
                    body = Some((e, r));
                }
            }
        }
        let (b, bt) = match body {
            Some(x) => x,
            None => self.expr_at(d),
        };
        self.ctx.pop();
        self.ctx.pop();
        self.hidden.remove(&v);
        let chi = EvalAssumption { tyvar: v, covar: c, family: f, args };
        (Expr::assume(chi, b), bt)
    }

    /// Some expression of type `t`, if one is easy to build.
    pub fn inhabit(&mut self, t: &Type, depth: usize) -> Option<Expr> {
        let vars: Vec<(Name, Type)> = self.usable_vars().into_iter().filter(|(_, u)| alpha_eq_ty(u, t)).collect();
        if !vars.is_empty() && self.chance(0.4) {
            return Some(Expr::Var(self.pick(&vars).unwrap().0.clone()));
        }
        if depth > 0 && self.chance(0.2) {
            let (a, at) = self.expr_at(depth - 1);
            let x = self.fresh("x");
            let body = self.with(Binding::Tm(x.clone(), at.clone()), |g| g.inhabit(t, depth - 1))?;
            return Some(Expr::app(Expr::lam(&x, at, body), a));
        }
        if depth > 0 && self.chance(0.15) {
            let inner = self.inhabit(t, depth - 1)?;
            let g = self.detour(t, 2);
            return Some(Expr::cast(inner, g));
        }
        match t {
            Type::Arrow(dom, cod) => {
                let x = self.fresh("x");
                let body = self.with(Binding::Tm(x.clone(), (**dom).clone()), |g| g.inhabit(cod, depth))?;
                Some(Expr::lam(&x, (**dom).clone(), body))
            }
            Type::Forall(a, body) => {
                let b = self.fresh("a");
                let body = Subst::ty(a, Type::Var(b.clone())).apply_ty(body);
                let e = self.with(Binding::Ty(b.clone()), |g| g.inhabit(&body, depth))?;
                Some(Expr::tlam(&b, e))
            }
            Type::Qual(p, body) => {
                let c = self.fresh("c");
                let e = self.with(Binding::Co(c.clone(), (**p).clone()), |g| g.inhabit(body, depth))?;
                Some(Expr::clam(&c, (**p).clone(), e))
            }
            Type::Con(..) => {
                let ks: Vec<Name> =
                    self.consts().into_iter().filter(|(_, u)| alpha_eq_ty(u, t)).map(|(k, _)| k).collect();
                if let Some(k) = self.pick(&ks) {
                    return Some(Expr::Const(k.clone()));
                }
                vars.first().map(|(x, _)| Expr::Var(x.clone()))
            }
            Type::Var(_) | Type::Fam(..) => vars.first().map(|(x, _)| Expr::Var(x.clone())),
        }
    }
}
