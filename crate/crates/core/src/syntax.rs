//! Kernel syntax: types, propositions, coercions, expressions, equations,
//! signatures and typing contexts.

use std::collections::BTreeSet;

use indexmap::IndexMap;

use crate::name::Name;

/// Types and pretypes. A `Fam` node is only well-formed on the left of a
/// proposition; anywhere else the value is a pretype.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Con(Name, Vec<Type>),
    Arrow(Box<Type>, Box<Type>),
    Var(Name),
    Forall(Name, Box<Type>),
    Qual(Box<Prop>, Box<Type>),
    Fam(Name, Vec<Type>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prop {
    pub lhs: Type,
    pub rhs: Type,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coercion {
    Refl(Type),
    Sym(Box<Coercion>),
    Trans(Box<Coercion>, Box<Coercion>),
    Con(Name, Vec<Coercion>),
    Arrow(Box<Coercion>, Box<Coercion>),
    Forall(Name, Box<Coercion>),
    Qual(Box<Coercion>, Box<Coercion>, Box<Coercion>),
    Fam(Name, Vec<Coercion>),
    Nth(usize, Box<Coercion>),
    Inst(Box<Coercion>, Type),
    Var(Name),
    Axiom(AxiomUse),
}

/// `xi[index] tys {resolutions}`: instantiation of one equation of an axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AxiomUse {
    pub axiom: Name,
    pub index: usize,
    pub tys: Vec<Type>,
    pub resolutions: Vec<EvalResolution>,
}

/// `(tyvar | covar : family args ~ tyvar)`. Binds both variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvalAssumption {
    pub tyvar: Name,
    pub covar: Name,
    pub family: Name,
    pub args: Vec<Type>,
}

/// `(witness | proof)` where `proof : F args ~ witness`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvalResolution {
    pub witness: Type,
    pub proof: Coercion,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(Name),
    Const(Name),
    Lam(Name, Type, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    TLam(Name, Box<Expr>),
    TApp(Box<Expr>, Type),
    CLam(Name, Prop, Box<Expr>),
    CApp(Box<Expr>, Coercion),
    Cast(Box<Expr>, Coercion),
    Assume(EvalAssumption, Box<Expr>),
}

/// `forall tyvars assumptions. family lhs ~ rhs`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub tyvars: Vec<Name>,
    pub assumptions: Vec<EvalAssumption>,
    pub family: Name,
    pub lhs: Vec<Type>,
    pub rhs: Type,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FamilyDecl {
    pub arity: usize,
    pub total: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub family: Name,
    pub equations: Vec<Equation>,
}

impl Axiom {
    /// A multi-equation axiom is the whole definition of a closed family.
    pub fn is_closed(&self) -> bool {
        self.equations.len() > 1
    }
}

/// Declarations in scope for checking. Maps preserve declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub ty_cons: IndexMap<Name, usize>,
    pub consts: IndexMap<Name, Type>,
    pub families: IndexMap<Name, FamilyDecl>,
    pub axioms: IndexMap<Name, Axiom>,
}

impl Signature {
    pub fn is_total(&self, family: &str) -> bool {
        self.families.get(family).is_some_and(|d| d.total)
    }

    /// Axioms whose equations define `family`, in declaration order.
    pub fn axioms_for<'a>(&'a self, family: &'a str) -> impl Iterator<Item = (&'a Name, &'a Axiom)> + 'a {
        self.axioms.iter().filter(move |(_, ax)| &*ax.family == family)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Binding {
    Ty(Name),
    Co(Name, Prop),
    Tm(Name, Type),
}

impl Binding {
    pub fn name(&self) -> &Name {
        match self {
            Binding::Ty(n) | Binding::Co(n, _) | Binding::Tm(n, _) => n,
        }
    }
}

/// A typing context, innermost binding last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context(pub Vec<Binding>);

impl Context {
    pub fn new() -> Self {
        Context(Vec::new())
    }

    pub fn with_tyvars<I: IntoIterator<Item = Name>>(vars: I) -> Self {
        Context(vars.into_iter().map(Binding::Ty).collect())
    }

    pub fn push(&mut self, b: Binding) {
        self.0.push(b);
    }

    pub fn pop(&mut self) -> Option<Binding> {
        self.0.pop()
    }

    pub fn has_tyvar(&self, a: &str) -> bool {
        self.0.iter().any(|b| matches!(b, Binding::Ty(n) if &**n == a))
    }

    pub fn lookup_co(&self, c: &str) -> Option<&Prop> {
        self.0.iter().rev().find_map(|b| match b {
            Binding::Co(n, p) if &**n == c => Some(p),
            _ => None,
        })
    }

    pub fn lookup_tm(&self, x: &str) -> Option<&Type> {
        self.0.iter().rev().find_map(|b| match b {
            Binding::Tm(n, t) if &**n == x => Some(t),
            _ => None,
        })
    }

    pub fn binds(&self, n: &str) -> bool {
        self.0.iter().any(|b| &**b.name() == n)
    }

    pub fn tyvars(&self) -> impl Iterator<Item = &Name> {
        self.0.iter().filter_map(|b| match b {
            Binding::Ty(n) => Some(n),
            _ => None,
        })
    }
}

/// A path from the root of a type to one of its subterms. Child indices:
/// constructor and family arguments by position, `0`/`1` for the two sides
/// of an arrow, `0` for a forall body, and `0`/`1`/`2` for the proposition
/// sides and body of a qualified type.
pub type Path = Vec<usize>;

impl Type {
    pub fn con(name: &str, args: Vec<Type>) -> Type {
        Type::Con(Name::new(name), args)
    }

    pub fn fam(name: &str, args: Vec<Type>) -> Type {
        Type::Fam(Name::new(name), args)
    }

    pub fn var(name: &str) -> Type {
        Type::Var(Name::new(name))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn forall(a: &str, body: Type) -> Type {
        Type::Forall(Name::new(a), Box::new(body))
    }

    pub fn qual(p: Prop, body: Type) -> Type {
        Type::Qual(Box::new(p), Box::new(body))
    }

    /// Number of family application nodes anywhere in the type.
    pub fn fam_count(&self) -> usize {
        match self {
            Type::Var(_) => 0,
            Type::Con(_, args) => args.iter().map(Type::fam_count).sum(),
            Type::Fam(_, args) => 1 + args.iter().map(Type::fam_count).sum::<usize>(),
            Type::Arrow(a, b) => a.fam_count() + b.fam_count(),
            Type::Forall(_, b) => b.fam_count(),
            Type::Qual(p, b) => p.lhs.fam_count() + p.rhs.fam_count() + b.fam_count(),
        }
    }

    pub fn is_family_free(&self) -> bool {
        match self {
            Type::Var(_) => true,
            Type::Con(_, args) => args.iter().all(Type::is_family_free),
            Type::Fam(..) => false,
            Type::Arrow(a, b) => a.is_family_free() && b.is_family_free(),
            Type::Forall(_, b) => b.is_family_free(),
            Type::Qual(p, b) => p.lhs.is_family_free() && p.rhs.is_family_free() && b.is_family_free(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_fv(&mut Vec::new(), &mut out);
        out
    }

    pub fn mentions(&self, a: &str) -> bool {
        match self {
            Type::Var(v) => &**v == a,
            Type::Forall(b, body) => &**b != a && body.mentions(a),
            _ => self.children().iter().any(|c| c.mentions(a)),
        }
    }

    pub(crate) fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Type::Forall(a, body) => {
                bound.push(a.clone());
                body.collect_fv(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_fv(bound, out);
                }
            }
        }
    }

    pub fn children(&self) -> Vec<&Type> {
        match self {
            Type::Var(_) => vec![],
            Type::Con(_, args) | Type::Fam(_, args) => args.iter().collect(),
            Type::Arrow(a, b) => vec![a, b],
            Type::Forall(_, b) => vec![b],
            Type::Qual(p, b) => vec![&p.lhs, &p.rhs, b],
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut Type> {
        match self {
            Type::Var(_) => None,
            Type::Con(_, args) | Type::Fam(_, args) => args.get_mut(i),
            Type::Arrow(a, b) => match i {
                0 => Some(a),
                1 => Some(b),
                _ => None,
            },
            Type::Forall(_, b) => (i == 0).then_some(&mut **b),
            Type::Qual(p, b) => match i {
                0 => Some(&mut p.lhs),
                1 => Some(&mut p.rhs),
                2 => Some(b),
                _ => None,
            },
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Type> {
        let mut t = self;
        for &i in path {
            t = *t.children().get(i)?;
        }
        Some(t)
    }

    /// Replaces the subterm at `path`. Returns `None` if the path is invalid.
    pub fn replace_at(&self, path: &[usize], new: Type) -> Option<Type> {
        let mut out = self.clone();
        let mut slot = &mut out;
        for &i in path {
            slot = slot.child_mut(i)?;
        }
        *slot = new;
        Some(out)
    }

    /// All subterm paths in preorder.
    pub fn paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        fn go(t: &Type, cur: &mut Path, out: &mut Vec<Path>) {
            out.push(cur.clone());
            for (i, c) in t.children().into_iter().enumerate() {
                cur.push(i);
                go(c, cur, out);
                cur.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Positions of family applications, in left-to-right preorder.
    pub fn find_redexes(&self) -> Vec<Path> {
        self.paths().into_iter().filter(|p| matches!(self.at(p), Some(Type::Fam(..)))).collect()
    }

    /// Names of binders enclosing the subterm at `path`, outermost first.
    pub fn binders_above(&self, path: &[usize]) -> Vec<Name> {
        let mut out = Vec::new();
        let mut t = self;
        for &i in path {
            if let Type::Forall(a, _) = t {
                out.push(a.clone());
            }
            match t.children().get(i) {
                Some(c) => t = c,
                None => break,
            }
        }
        out
    }
}

impl Prop {
    pub fn new(lhs: Type, rhs: Type) -> Prop {
        Prop { lhs, rhs }
    }

    pub fn swap(self) -> Prop {
        Prop { lhs: self.rhs, rhs: self.lhs }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut s = self.lhs.free_vars();
        s.extend(self.rhs.free_vars());
        s
    }
}

impl EvalAssumption {
    /// The proposition `F args ~ tyvar` this assumption introduces.
    pub fn prop(&self) -> Prop {
        Prop::new(Type::Fam(self.family.clone(), self.args.clone()), Type::Var(self.tyvar.clone()))
    }

    pub fn fam_app(&self) -> Type {
        Type::Fam(self.family.clone(), self.args.clone())
    }
}

impl Equation {
    pub fn lhs_type(&self) -> Type {
        Type::Fam(self.family.clone(), self.lhs.clone())
    }

    /// Variables bound by the assumptions, in order.
    pub fn assumption_tyvars(&self) -> Vec<Name> {
        self.assumptions.iter().map(|a| a.tyvar.clone()).collect()
    }

    /// Free type variables of the assumption telescope: each assumption's
    /// variable scopes over the later ones.
    pub fn assumption_fv(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound: Vec<Name> = Vec::new();
        for a in &self.assumptions {
            for t in &a.args {
                for v in t.free_vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            bound.push(a.tyvar.clone());
        }
        out
    }
}

impl Coercion {
    pub fn refl(t: Type) -> Coercion {
        Coercion::Refl(t)
    }

    pub fn sym(g: Coercion) -> Coercion {
        Coercion::Sym(Box::new(g))
    }

    pub fn trans(a: Coercion, b: Coercion) -> Coercion {
        Coercion::Trans(Box::new(a), Box::new(b))
    }

    pub fn nth(i: usize, g: Coercion) -> Coercion {
        Coercion::Nth(i, Box::new(g))
    }

    pub fn inst(g: Coercion, t: Type) -> Coercion {
        Coercion::Inst(Box::new(g), t)
    }

    pub fn size(&self) -> usize {
        1 + match self {
            Coercion::Refl(_) | Coercion::Var(_) => 0,
            Coercion::Sym(g) | Coercion::Forall(_, g) | Coercion::Nth(_, g) | Coercion::Inst(g, _) => g.size(),
            Coercion::Trans(a, b) | Coercion::Arrow(a, b) => a.size() + b.size(),
            Coercion::Con(_, gs) | Coercion::Fam(_, gs) => gs.iter().map(Coercion::size).sum(),
            Coercion::Qual(a, b, c) => a.size() + b.size() + c.size(),
            Coercion::Axiom(u) => u.resolutions.iter().map(|r| r.proof.size()).sum(),
        }
    }
}

impl Expr {
    pub fn var(x: &str) -> Expr {
        Expr::Var(Name::new(x))
    }

    pub fn konst(k: &str) -> Expr {
        Expr::Const(Name::new(k))
    }

    pub fn lam(x: &str, t: Type, body: Expr) -> Expr {
        Expr::Lam(Name::new(x), t, Box::new(body))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn tlam(a: &str, body: Expr) -> Expr {
        Expr::TLam(Name::new(a), Box::new(body))
    }

    pub fn tapp(e: Expr, t: Type) -> Expr {
        Expr::TApp(Box::new(e), t)
    }

    pub fn clam(c: &str, p: Prop, body: Expr) -> Expr {
        Expr::CLam(Name::new(c), p, Box::new(body))
    }

    pub fn capp(e: Expr, g: Coercion) -> Expr {
        Expr::CApp(Box::new(e), g)
    }

    pub fn cast(e: Expr, g: Coercion) -> Expr {
        Expr::Cast(Box::new(e), g)
    }

    pub fn assume(a: EvalAssumption, body: Expr) -> Expr {
        Expr::Assume(a, Box::new(body))
    }

    /// Values: constants and the three kinds of abstraction.
    pub fn is_value(&self) -> bool {
        matches!(self, Expr::Const(_) | Expr::Lam(..) | Expr::TLam(..) | Expr::CLam(..))
    }

    pub fn size(&self) -> usize {
        1 + match self {
            Expr::Var(_) | Expr::Const(_) => 0,
            Expr::Lam(_, _, b) | Expr::TLam(_, b) | Expr::CLam(_, _, b) | Expr::Assume(_, b) => b.size(),
            Expr::TApp(e, _) | Expr::CApp(e, _) | Expr::Cast(e, _) => e.size(),
            Expr::App(f, a) => f.size() + a.size(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(n: usize) -> Type {
        (0..n).fold(Type::con("Z", vec![]), |t, _| Type::con("S", vec![t]))
    }

    #[test]
    fn fam_count_counts_every_family_node() {
        let plus = Type::fam("Plus", vec![nat(0), nat(0)]);
        assert_eq!(plus.fam_count(), 1);
        let nested = Type::fam("Plus", vec![plus.clone(), Type::fam("Plus", vec![nat(1), nat(0)])]);
        assert_eq!(nested.fam_count(), 3);
        let q = Type::qual(Prop::new(plus.clone(), Type::var("a")), Type::arrow(plus, nat(2)));
        assert_eq!(q.fam_count(), 2);
        assert_eq!(nat(3).fam_count(), 0);
    }

    #[test]
    fn redexes_are_listed_in_preorder() {
        let inner = Type::fam("G", vec![nat(0)]);
        let t = Type::arrow(Type::fam("F", vec![inner.clone()]), Type::con("List", vec![Type::fam("H", vec![])]));
        assert_eq!(t.find_redexes(), vec![vec![0], vec![0, 0], vec![1, 0]]);
        assert_eq!(t.at(&[0, 0]), Some(&inner));
        let plugged = t.replace_at(&[0, 0], nat(1)).unwrap();
        assert_eq!(plugged.at(&[0, 0]), Some(&nat(1)));
        assert!(t.replace_at(&[2], nat(0)).is_none());
    }

    #[test]
    fn free_vars_respect_binders() {
        let t = Type::forall("a", Type::arrow(Type::var("a"), Type::var("b")));
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec![Name::new("b")]);
        assert!(t.mentions("b"));
        assert!(!t.mentions("a"));
    }

    #[test]
    fn assumption_fv_threads_binders() {
        let eq = Equation {
            tyvars: vec!["m".into(), "n".into()],
            assumptions: vec![
                EvalAssumption { tyvar: "r".into(), covar: "c".into(), family: "F".into(), args: vec![Type::var("m")] },
                EvalAssumption {
                    tyvar: "s".into(),
                    covar: "d".into(),
                    family: "G".into(),
                    args: vec![Type::var("r"), Type::var("n")],
                },
            ],
            family: "H".into(),
            lhs: vec![Type::var("m"), Type::var("n")],
            rhs: Type::var("s"),
        };
        let fv: Vec<_> = eq.assumption_fv().into_iter().collect();
        assert_eq!(fv, vec![Name::new("m"), Name::new("n")]);
    }
}
