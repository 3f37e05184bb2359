//! Whole programs: declarations with source positions, printing, and the
//! loader that builds a signature and checks everything in it.

use std::collections::HashSet;
use std::fmt::{self, Display, Formatter, Write};

use indexmap::IndexMap;

use crate::alpha::{alpha_eq_expr, alpha_eq_ty};
use crate::lexer::Span;
use crate::name::Name;
use crate::signature::{check_good_signature, check_signature};
use crate::surface::elaborate::{elaborate, Elaboration};
use crate::surface::syntax::SurfaceDecl;
use crate::syntax::{Axiom, Context, Equation, Expr, FamilyDecl, Signature, Type};
use crate::typecheck::infer_expr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Data { name: Name, arity: usize },
    Const { name: Name, ty: Type },
    Family { name: Name, arity: usize, total: bool },
    Axiom { name: Name, family: Name, equations: Vec<Equation> },
    Term { name: Name, body: Expr },
    Surface(SurfaceDecl),
}

/// A declaration and where it starts. Equality ignores the position.
#[derive(Clone, Debug)]
pub struct Item {
    pub decl: Decl,
    pub span: Span,
}

impl PartialEq for Item {
    fn eq(&self, other: &Item) -> bool {
        self.decl == other.decl
    }
}

impl Eq for Item {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub items: Vec<Item>,
}

impl Program {
    pub fn decls(&self) -> impl Iterator<Item = &Decl> {
        self.items.iter().map(|i| &i.decl)
    }

    /// Names that parse as family applications in this program.
    pub fn family_names(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        for d in self.decls() {
            match d {
                Decl::Family { name, .. } => {
                    out.insert(name.clone());
                }
                Decl::Surface(SurfaceDecl::TypeFamily(f)) => {
                    out.insert(f.name.clone());
                }
                Decl::Surface(SurfaceDecl::Class(c)) => {
                    if let Some(a) = &c.assoc {
                        out.insert(a.name.clone());
                    }
                }
                _ => {}
            }
        }
        out
    }
}

fn decl_alpha_eq(a: &Decl, b: &Decl) -> bool {
    match (a, b) {
        (Decl::Const { name: n1, ty: t1 }, Decl::Const { name: n2, ty: t2 }) => n1 == n2 && alpha_eq_ty(t1, t2),
        (Decl::Term { name: n1, body: e1 }, Decl::Term { name: n2, body: e2 }) => n1 == n2 && alpha_eq_expr(e1, e2),
        _ => a == b,
    }
}

/// Declaration-wise equality up to renaming of bound variables.
pub fn alpha_eq_program(a: &Program, b: &Program) -> bool {
    a.items.len() == b.items.len() && a.decls().zip(b.decls()).all(|(x, y)| decl_alpha_eq(x, y))
}

impl Display for Decl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Data { name, arity } => write!(f, "data {name} : {arity}"),
            Decl::Const { name, ty } => write!(f, "const {name} : {ty}"),
            Decl::Family { name, arity, total } => {
                write!(f, "family {name} : {arity} {}", if *total { "total" } else { "partial" })
            }
            Decl::Axiom { name, family, equations } => {
                let mut s = format!("axiom {name} : {family} {{");
                for (i, eq) in equations.iter().enumerate() {
                    s.push_str(if i == 0 { "\n  " } else { ";\n  " });
                    write!(s, "{eq}")?;
                }
                s.push_str("\n}");
                f.write_str(&s)
            }
            Decl::Term { name, body } => write!(f, "term {name} = {body}"),
            Decl::Surface(d) => write!(f, "{d}"),
        }
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{}", item.decl)?;
        }
        Ok(())
    }
}

/// A located problem with a stable machine-readable code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Option<Span>,
    pub code: String,
    pub message: String,
}

impl Display for Diagnostic {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(f, "{s}: [{}] {}", self.code, self.message),
            None => write!(f, "[{}] {}", self.code, self.message),
        }
    }
}

/// A program turned into a checked signature and closed terms.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub sig: Signature,
    pub terms: IndexMap<Name, (Expr, Span)>,
    /// Inferred types of the terms that check.
    pub term_types: IndexMap<Name, Type>,
    pub elaboration: Elaboration,
    pub diagnostics: Vec<Diagnostic>,
}

impl Loaded {
    pub fn ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

struct Loader {
    sig: Signature,
    spans: IndexMap<Name, Span>,
    diagnostics: Vec<Diagnostic>,
}

impl Loader {
    fn diag(&mut self, span: Option<Span>, code: &str, message: String) {
        self.diagnostics.push(Diagnostic { span, code: code.to_string(), message });
    }

    fn claim(&mut self, name: &Name, span: Span) -> bool {
        let taken = self.sig.ty_cons.contains_key(name)
            || self.sig.consts.contains_key(name)
            || self.sig.families.contains_key(name)
            || self.sig.axioms.contains_key(name);
        if taken {
            self.diag(Some(span), "DuplicateDeclaration", format!("`{name}` is declared more than once"));
            return false;
        }
        self.spans.insert(name.clone(), span);
        true
    }

    fn add(&mut self, d: &Decl, span: Span) {
        match d {
            Decl::Data { name, arity } => {
                if self.claim(name, span) {
                    self.sig.ty_cons.insert(name.clone(), *arity);
                }
            }
            Decl::Const { name, ty } => {
                if self.claim(name, span) {
                    self.sig.consts.insert(name.clone(), ty.clone());
                }
            }
            Decl::Family { name, arity, total } => {
                if self.claim(name, span) {
                    self.sig.families.insert(name.clone(), FamilyDecl { arity: *arity, total: *total });
                }
            }
            Decl::Axiom { name, family, equations } => {
                if self.claim(name, span) {
                    self.sig
                        .axioms
                        .insert(name.clone(), Axiom { family: family.clone(), equations: equations.clone() });
                }
            }
            Decl::Term { .. } | Decl::Surface(_) => {}
        }
    }
}

/// Builds the signature (kernel declarations first, then elaborated surface
/// declarations), checks it, and type-checks every term.
pub fn load(program: &Program) -> Loaded {
    let mut l = Loader { sig: Signature::default(), spans: IndexMap::new(), diagnostics: Vec::new() };
    for item in &program.items {
        l.add(&item.decl, item.span);
    }
    let surface: Vec<(Span, SurfaceDecl)> = program
        .items
        .iter()
        .filter_map(|i| match &i.decl {
            Decl::Surface(d) => Some((i.span, d.clone())),
            _ => None,
        })
        .collect();
    let decls: Vec<SurfaceDecl> = surface.iter().map(|(_, d)| d.clone()).collect();
    let elaboration = elaborate(&l.sig, &decls);
    for (i, e) in &elaboration.errors {
        l.diag(Some(surface[*i].0), e.code(), e.to_string());
    }
    for (d, origin) in elaboration.core.iter().zip(&elaboration.core_origin) {
        l.add(d, surface[*origin].0);
    }
    let mut sig_diags = check_signature(&l.sig);
    if sig_diags.is_empty() {
        sig_diags = check_good_signature(&l.sig);
    }
    for d in sig_diags {
        let span = d.axiom.as_ref().and_then(|a| l.spans.get(a).copied());
        l.diag(span, d.code(), d.to_string());
    }
    let mut terms = IndexMap::new();
    let mut term_types = IndexMap::new();
    let sig_ok = l.diagnostics.is_empty();
    for item in &program.items {
        if let Decl::Term { name, body } = &item.decl {
            if terms.contains_key(name) {
                l.diag(Some(item.span), "DuplicateDeclaration", format!("term `{name}` is declared more than once"));
                continue;
            }
            terms.insert(name.clone(), (body.clone(), item.span));
            if !sig_ok {
                continue;
            }
            match infer_expr(&l.sig, &Context::new(), body) {
                Ok(t) => {
                    term_types.insert(name.clone(), t);
                }
                Err(e) => l.diag(Some(item.span), e.code(), format!("term `{name}`: {e}")),
            }
        }
    }
    Loaded { sig: l.sig, terms, term_types, elaboration, diagnostics: l.diagnostics }
}
