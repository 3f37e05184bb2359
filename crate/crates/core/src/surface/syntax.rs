//! Surface types, class predicates and declarations.

use std::collections::BTreeSet;
use std::fmt::{self, Display, Formatter, Write};

use crate::name::Name;
use crate::syntax::Type;

/// A surface type. Unlike kernel types, qualification is by class predicates
/// and family applications may appear anywhere (guarded by the context).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SType {
    Var(Name),
    Con(Name, Vec<SType>),
    Fam(Name, Vec<SType>),
    Arrow(Box<SType>, Box<SType>),
    Forall(Name, Box<SType>),
    Qual(Vec<Pred>, Box<SType>),
}

/// A class predicate `C t1 .. tn`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pred {
    pub class: Name,
    pub args: Vec<SType>,
}

/// `F lhs = rhs`, used by instances, type instances and closed families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SEquation {
    pub family: Name,
    pub lhs: Vec<SType>,
    pub rhs: SType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceDecl {
    pub context: Vec<Pred>,
    pub head: Pred,
    pub assoc: Option<SEquation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocDecl {
    pub name: Name,
    pub params: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub context: Vec<Pred>,
    pub name: Name,
    pub params: Vec<Name>,
    pub assoc: Option<AssocDecl>,
    /// `Some` for a closed class: its complete, ordered list of instances.
    pub closed: Option<Vec<InstanceDecl>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataDecl {
    pub name: Name,
    pub params: Vec<Name>,
    pub ctors: Vec<(Name, Vec<SType>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyDeclS {
    pub name: Name,
    /// Parameters with optional kind annotations, e.g. `(m :: Nat)`.
    pub params: Vec<(Name, Option<Name>)>,
    pub result_kind: Option<Name>,
    pub total: bool,
    /// `Some` for a closed family.
    pub equations: Option<Vec<SEquation>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceDecl {
    Data(DataDecl),
    Class(ClassDecl),
    Instance(InstanceDecl),
    TypeFamily(FamilyDeclS),
    TypeInstance(SEquation),
    TotalPragma(Name),
    Sig { name: Name, ty: SType },
}

impl SType {
    pub fn con(n: &str, args: Vec<SType>) -> SType {
        SType::Con(Name::new(n), args)
    }

    pub fn fam(n: &str, args: Vec<SType>) -> SType {
        SType::Fam(Name::new(n), args)
    }

    pub fn var(n: &str) -> SType {
        SType::Var(Name::new(n))
    }

    pub fn arrow(a: SType, b: SType) -> SType {
        SType::Arrow(Box::new(a), Box::new(b))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_fv(&mut Vec::new(), &mut out);
        out
    }

    fn collect_fv(&self, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
        match self {
            SType::Var(a) => {
                if !bound.contains(a) && !out.contains(a) {
                    out.push(a.clone());
                }
            }
            SType::Con(_, args) | SType::Fam(_, args) => args.iter().for_each(|t| t.collect_fv(bound, out)),
            SType::Arrow(a, b) => {
                a.collect_fv(bound, out);
                b.collect_fv(bound, out);
            }
            SType::Forall(a, b) => {
                bound.push(a.clone());
                b.collect_fv(bound, out);
                bound.pop();
            }
            SType::Qual(ps, b) => {
                for p in ps {
                    p.args.iter().for_each(|t| t.collect_fv(bound, out));
                }
                b.collect_fv(bound, out);
            }
        }
    }

    pub fn has_family(&self) -> bool {
        match self {
            SType::Var(_) => false,
            SType::Fam(..) => true,
            SType::Con(_, args) => args.iter().any(SType::has_family),
            SType::Arrow(a, b) => a.has_family() || b.has_family(),
            SType::Forall(_, b) => b.has_family(),
            SType::Qual(ps, b) => ps.iter().any(|p| p.args.iter().any(SType::has_family)) || b.has_family(),
        }
    }

    /// Family-application names anywhere in the type.
    pub fn families(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit_fams(&mut |f, _| {
            out.insert(f.clone());
        });
        out
    }

    /// Calls `f` on each family application, outer before inner, left to right.
    pub fn visit_fams(&self, f: &mut impl FnMut(&Name, &[SType])) {
        match self {
            SType::Var(_) => {}
            SType::Fam(n, args) => {
                f(n, args);
                args.iter().for_each(|t| t.visit_fams(f));
            }
            SType::Con(_, args) => args.iter().for_each(|t| t.visit_fams(f)),
            SType::Arrow(a, b) => {
                a.visit_fams(f);
                b.visit_fams(f);
            }
            SType::Forall(_, b) => b.visit_fams(f),
            SType::Qual(ps, b) => {
                for p in ps {
                    p.args.iter().for_each(|t| t.visit_fams(f));
                }
                b.visit_fams(f);
            }
        }
    }

    pub fn subst(&self, s: &[(Name, SType)]) -> SType {
        match self {
            SType::Var(a) => s.iter().find(|(n, _)| n == a).map(|(_, t)| t.clone()).unwrap_or_else(|| self.clone()),
            SType::Con(h, args) => SType::Con(h.clone(), args.iter().map(|t| t.subst(s)).collect()),
            SType::Fam(h, args) => SType::Fam(h.clone(), args.iter().map(|t| t.subst(s)).collect()),
            SType::Arrow(a, b) => SType::arrow(a.subst(s), b.subst(s)),
            SType::Forall(a, b) => {
                let inner: Vec<(Name, SType)> = s.iter().filter(|(n, _)| n != a).cloned().collect();
                SType::Forall(a.clone(), Box::new(b.subst(&inner)))
            }
            SType::Qual(ps, b) => SType::Qual(ps.iter().map(|p| p.subst(s)).collect(), Box::new(b.subst(s))),
        }
    }

    /// An encoding as a kernel type, used for matching and unification only.
    /// Predicates in a qualified type are encoded as constructor applications.
    pub fn to_pattern(&self) -> Type {
        match self {
            SType::Var(a) => Type::Var(a.clone()),
            SType::Con(h, args) => Type::Con(h.clone(), args.iter().map(SType::to_pattern).collect()),
            SType::Fam(h, args) => Type::Fam(h.clone(), args.iter().map(SType::to_pattern).collect()),
            SType::Arrow(a, b) => Type::arrow(a.to_pattern(), b.to_pattern()),
            SType::Forall(a, b) => Type::Forall(a.clone(), Box::new(b.to_pattern())),
            SType::Qual(ps, b) => {
                let mut args: Vec<Type> = ps.iter().map(Pred::to_pattern).collect();
                args.push(b.to_pattern());
                Type::Con(Name::new("=>"), args)
            }
        }
    }

    /// Inverse of [`SType::to_pattern`].
    pub fn from_pattern(t: &Type) -> SType {
        match t {
            Type::Var(a) => SType::Var(a.clone()),
            Type::Con(h, args) if &**h == "=>" && !args.is_empty() => {
                let (body, ps) = args.split_last().expect("non-empty");
                let preds = ps
                    .iter()
                    .map(|p| match p {
                        Type::Con(c, xs) => {
                            Pred { class: c.clone(), args: xs.iter().map(SType::from_pattern).collect() }
                        }
                        other => Pred { class: Name::new("?"), args: vec![SType::from_pattern(other)] },
                    })
                    .collect();
                SType::Qual(preds, Box::new(SType::from_pattern(body)))
            }
            Type::Con(h, args) => SType::Con(h.clone(), args.iter().map(SType::from_pattern).collect()),
            Type::Fam(h, args) => SType::Fam(h.clone(), args.iter().map(SType::from_pattern).collect()),
            Type::Arrow(a, b) => SType::arrow(SType::from_pattern(a), SType::from_pattern(b)),
            Type::Forall(a, b) => SType::Forall(a.clone(), Box::new(SType::from_pattern(b))),
            Type::Qual(_, b) => SType::from_pattern(b),
        }
    }
}

impl Pred {
    pub fn new(class: &str, args: Vec<SType>) -> Pred {
        Pred { class: Name::new(class), args }
    }

    pub fn subst(&self, s: &[(Name, SType)]) -> Pred {
        Pred { class: self.class.clone(), args: self.args.iter().map(|t| t.subst(s)).collect() }
    }

    pub fn to_pattern(&self) -> Type {
        Type::Con(self.class.clone(), self.args.iter().map(SType::to_pattern).collect())
    }

    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        for t in &self.args {
            for v in t.free_vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

// Precedence: 0 = anything, 1 = arrow domain, 2 = argument.
fn sty(t: &SType, prec: u8, out: &mut String) {
    let open = |c: bool, out: &mut String| {
        if c {
            out.push('(')
        }
    };
    let close = |c: bool, out: &mut String| {
        if c {
            out.push(')')
        }
    };
    match t {
        SType::Var(a) => out.push_str(a),
        SType::Con(h, args) | SType::Fam(h, args) => {
            let p = prec >= 2 && !args.is_empty();
            open(p, out);
            out.push_str(h);
            for a in args {
                out.push(' ');
                sty(a, 2, out);
            }
            close(p, out);
        }
        SType::Arrow(a, b) => {
            open(prec >= 1, out);
            sty(a, 1, out);
            out.push_str(" -> ");
            sty(b, 0, out);
            close(prec >= 1, out);
        }
        SType::Forall(..) => {
            open(prec >= 1, out);
            out.push_str("forall");
            let mut t = t;
            while let SType::Forall(a, b) = t {
                write!(out, " {a}").unwrap();
                t = b;
            }
            out.push_str(". ");
            sty(t, 0, out);
            close(prec >= 1, out);
        }
        SType::Qual(ps, b) => {
            open(prec >= 1, out);
            context(ps, out);
            out.push_str(" => ");
            sty(b, 0, out);
            close(prec >= 1, out);
        }
    }
}

fn pred(p: &Pred, out: &mut String) {
    out.push_str(&p.class);
    for a in &p.args {
        out.push(' ');
        sty(a, 2, out);
    }
}

/// `C a` for one predicate, `(C a, D b)` otherwise.
pub fn context(ps: &[Pred], out: &mut String) {
    if ps.len() == 1 {
        pred(&ps[0], out);
        return;
    }
    out.push('(');
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        pred(p, out);
    }
    out.push(')');
}

pub fn stype_at(t: &SType, prec: u8) -> String {
    let mut s = String::new();
    sty(t, prec, &mut s);
    s
}

impl Display for SType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&stype_at(self, 0))
    }
}

impl Display for Pred {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        pred(self, &mut s);
        f.write_str(&s)
    }
}

impl Display for SEquation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", stype_at(&SType::Fam(self.family.clone(), self.lhs.clone()), 0))?;
        write!(f, " = {}", self.rhs)
    }
}

impl Display for InstanceDecl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::from("instance ");
        if !self.context.is_empty() {
            context(&self.context, &mut s);
            s.push_str(" => ");
        }
        pred(&self.head, &mut s);
        if let Some(eq) = &self.assoc {
            write!(s, " where type {eq}").unwrap();
        }
        f.write_str(&s)
    }
}

impl Display for SurfaceDecl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        match self {
            SurfaceDecl::Data(d) => {
                write!(s, "data {}", d.name).unwrap();
                for p in &d.params {
                    write!(s, " {p}").unwrap();
                }
                for (i, (c, fields)) in d.ctors.iter().enumerate() {
                    s.push_str(if i == 0 { " = " } else { " | " });
                    s.push_str(c);
                    for t in fields {
                        s.push(' ');
                        sty(t, 2, &mut s);
                    }
                }
            }
            SurfaceDecl::Class(c) => {
                s.push_str("class ");
                if c.closed.is_some() {
                    s.push_str("closed ");
                }
                if !c.context.is_empty() {
                    context(&c.context, &mut s);
                    s.push_str(" => ");
                }
                s.push_str(&c.name);
                for p in &c.params {
                    write!(s, " {p}").unwrap();
                }
                if let Some(a) = &c.assoc {
                    write!(s, " where type {}", a.name).unwrap();
                    for p in &a.params {
                        write!(s, " {p}").unwrap();
                    }
                }
                if let Some(insts) = &c.closed {
                    s.push_str(" {");
                    for (i, inst) in insts.iter().enumerate() {
                        s.push_str(if i == 0 { "\n  " } else { ";\n  " });
                        write!(s, "{inst}").unwrap();
                    }
                    s.push_str("\n}");
                }
            }
            SurfaceDecl::Instance(i) => write!(s, "{i}").unwrap(),
            SurfaceDecl::TypeFamily(d) => {
                s.push_str("type family ");
                if d.total {
                    s.push_str("total ");
                }
                s.push_str(&d.name);
                for (p, k) in &d.params {
                    match k {
                        Some(k) => write!(s, " ({p} :: {k})").unwrap(),
                        None => write!(s, " {p}").unwrap(),
                    }
                }
                if let Some(k) = &d.result_kind {
                    write!(s, " :: {k}").unwrap();
                }
                if let Some(eqs) = &d.equations {
                    s.push_str(" where {");
                    for (i, eq) in eqs.iter().enumerate() {
                        s.push_str(if i == 0 { "\n  " } else { ";\n  " });
                        write!(s, "{eq}").unwrap();
                    }
                    s.push_str("\n}");
                }
            }
            SurfaceDecl::TypeInstance(eq) => write!(s, "type instance {eq}").unwrap(),
            SurfaceDecl::TotalPragma(n) => write!(s, "{{-# TOTAL {n} #-}}").unwrap(),
            SurfaceDecl::Sig { name, ty } => write!(s, "sig {name} :: {ty}").unwrap(),
        }
        f.write_str(&s)
    }
}
