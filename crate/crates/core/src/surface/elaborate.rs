//! Elaboration of surface declarations. Free-standing families become
//! classes with an associated family, `type instance`s become instances
//! whose contexts are inferred, closed families are checked for totality,
//! and every family equation is flattened into a kernel axiom.

use std::collections::HashSet;

use super::check::{infer_constraints, st_check_pred, st_check_type};
use super::env::{ClassInfo, DataInfo, FamilyInfo, Guard, SurfaceEnv, SurfaceError};
use super::syntax::{AssocDecl, ClassDecl, FamilyDeclS, InstanceDecl, Pred, SEquation, SType, SurfaceDecl};
use super::totality::{check_totality, Kind, NotTotal};
use crate::name::Name;
use crate::program::Decl;
use crate::syntax::{Equation, EvalAssumption, Signature, Type};

/// The result of elaborating a program's surface declarations.
#[derive(Clone, Debug, Default)]
pub struct Elaboration {
    pub env: SurfaceEnv,
    /// Surface declarations after elaboration: generated classes, instances
    /// with inferred contexts, signatures with inferred predicates.
    pub surface: Vec<SurfaceDecl>,
    /// Kernel declarations produced, in order.
    pub core: Vec<Decl>,
    /// For each kernel declaration, the input declaration it came from.
    pub core_origin: Vec<usize>,
    /// Families accepted as total on the strength of a pragma alone.
    pub unsafe_totals: Vec<Name>,
    /// Errors, each with the index of the offending input declaration.
    pub errors: Vec<(usize, SurfaceError)>,
}

/// The class generated for a free-standing family `F`.
pub fn class_for(family: &str) -> Name {
    Name::from(format!("C{family}"))
}

/// Converts a family-free surface type into a kernel type.
pub fn to_core(t: &SType) -> Result<Type, SurfaceError> {
    Ok(match t {
        SType::Var(a) => Type::Var(a.clone()),
        SType::Con(h, args) => Type::Con(h.clone(), args.iter().map(to_core).collect::<Result<_, _>>()?),
        SType::Arrow(a, b) => Type::arrow(to_core(a)?, to_core(b)?),
        SType::Forall(a, b) => Type::Forall(a.clone(), Box::new(to_core(b)?)),
        SType::Fam(..) | SType::Qual(..) => return Err(SurfaceError::BadEquationType(t.clone())),
    })
}

struct Flattener {
    taken: HashSet<Name>,
    next: usize,
    assumptions: Vec<EvalAssumption>,
}

impl Flattener {
    fn fresh(&mut self, prefix: &str) -> Name {
        let n = Name::from(format!("{prefix}{}", self.next)).fresh(|s| self.taken.contains(s));
        self.taken.insert(n.clone());
        n
    }

    // Innermost, leftmost applications are bound first.
    fn go(&mut self, t: &SType) -> Result<Type, SurfaceError> {
        Ok(match t {
            SType::Fam(f, args) => {
                let args = args.iter().map(|a| self.go(a)).collect::<Result<Vec<_>, _>>()?;
                self.next += 1;
                let tyvar = self.fresh("r");
                let covar = self.fresh("c");
                self.assumptions.push(EvalAssumption { tyvar: tyvar.clone(), covar, family: f.clone(), args });
                Type::Var(tyvar)
            }
            SType::Con(h, args) => Type::Con(h.clone(), args.iter().map(|a| self.go(a)).collect::<Result<_, _>>()?),
            SType::Arrow(a, b) => Type::arrow(self.go(a)?, self.go(b)?),
            SType::Var(_) | SType::Forall(..) | SType::Qual(..) => to_core(t)?,
        })
    }
}

/// Turns `F lhs = rhs` into a kernel equation, binding every family
/// application on the right with an evaluation assumption.
pub fn flatten_equation(eq: &SEquation) -> Result<Equation, SurfaceError> {
    let lhs = eq.lhs.iter().map(to_core).collect::<Result<Vec<_>, _>>()?;
    let mut tyvars: Vec<Name> = Vec::new();
    for t in &eq.lhs {
        for v in t.free_vars() {
            if !tyvars.contains(&v) {
                tyvars.push(v);
            }
        }
    }
    let mut taken: HashSet<Name> = tyvars.iter().cloned().collect();
    taken.extend(eq.rhs.free_vars());
    let mut fl = Flattener { taken, next: 0, assumptions: Vec::new() };
    let rhs = fl.go(&eq.rhs)?;
    Ok(Equation { tyvars, assumptions: fl.assumptions, family: eq.family.clone(), lhs, rhs })
}

fn free_vars_of(ts: &[SType]) -> Vec<Name> {
    let mut out: Vec<Name> = Vec::new();
    for t in ts {
        for v in t.free_vars() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

struct Elab {
    out: Elaboration,
    pragmas: Vec<Name>,
    /// Families introduced by a free-standing open `type family`.
    free_open: Vec<Name>,
    /// Per family: how many open axioms have been emitted.
    open_count: indexmap::IndexMap<Name, usize>,
    here: usize,
}

impl Elab {
    fn err(&mut self, e: SurfaceError) {
        self.out.errors.push((self.here, e));
    }

    fn errs(&mut self, es: Vec<SurfaceError>) {
        for e in es {
            self.err(e);
        }
    }

    fn push_core(&mut self, d: Decl) {
        self.out.core.push(d);
        self.out.core_origin.push(self.here);
    }

    fn taken(&self, n: &Name) -> bool {
        self.out.env.ty_cons.contains_key(n)
            || self.out.env.families.contains_key(n)
            || self.out.env.classes.contains_key(n)
    }

    fn fresh_decl(&mut self, n: &Name) -> bool {
        if self.taken(n) {
            self.err(SurfaceError::DuplicateDeclaration { name: n.clone() });
            false
        } else {
            true
        }
    }

    fn add_family(&mut self, name: &Name, arity: usize, guard: Guard, unsafe_total: bool) {
        let total = guard == Guard::Total;
        self.out.env.families.insert(name.clone(), FamilyInfo { arity, guard, unsafe_total });
        self.push_core(Decl::Family { name: name.clone(), arity, total });
    }

    fn add_class(&mut self, c: &ClassDecl) -> bool {
        if !self.fresh_decl(&c.name) {
            return false;
        }
        for p in &c.context {
            if let Err(es) = st_check_pred(&self.out.env, &[], &c.params, p) {
                self.errs(es);
            }
        }
        if let Some(a) = &c.assoc {
            if a.params != c.params {
                self.err(SurfaceError::BadAssociatedType(format!(
                    "`{}` must take exactly the class parameters of `{}`, in order",
                    a.name, c.name
                )));
                return false;
            }
            if !self.fresh_decl(&a.name) {
                return false;
            }
        }
        self.out.env.classes.insert(
            c.name.clone(),
            ClassInfo {
                params: c.params.clone(),
                superclasses: c.context.clone(),
                assoc: c.assoc.clone(),
                closed: c.closed.is_some(),
                instances: Vec::new(),
            },
        );
        if let Some(a) = &c.assoc {
            self.add_family(&a.name, a.params.len(), Guard::Class(c.name.clone()), false);
        }
        true
    }

    /// Checks and registers one instance; returns its kernel equation, if any.
    fn add_instance(&mut self, inst: &InstanceDecl) -> Option<Equation> {
        let Some(class) = self.out.env.classes.get(&inst.head.class).cloned() else {
            self.err(SurfaceError::UnknownClass(inst.head.class.clone()));
            return None;
        };
        let scope = free_vars_of(&inst.head.args);
        let mut ok = true;
        if class.arity() != inst.head.args.len() {
            self.err(SurfaceError::ArityMismatch {
                name: inst.head.class.clone(),
                expected: class.arity(),
                found: inst.head.args.len(),
            });
            ok = false;
        }
        if inst.head.args.iter().any(SType::has_family) {
            self.err(SurfaceError::BadInstanceHead(inst.head.clone(), "family applications are not allowed".into()));
            ok = false;
        }
        for p in &inst.context {
            if let Err(es) = st_check_pred(&self.out.env, &[], &scope, p) {
                self.errs(es);
                ok = false;
            }
        }
        let eq = match (&class.assoc, &inst.assoc) {
            (None, None) => None,
            (Some(a), None) => {
                self.err(SurfaceError::MissingAssociatedType { head: inst.head.clone(), family: a.name.clone() });
                ok = false;
                None
            }
            (None, Some(eq)) => {
                self.err(SurfaceError::BadAssociatedType(format!(
                    "class `{}` has no associated type `{}`",
                    inst.head.class, eq.family
                )));
                ok = false;
                None
            }
            (Some(a), Some(eq)) => {
                if eq.family != a.name || eq.lhs != inst.head.args {
                    self.err(SurfaceError::BadAssociatedType(format!(
                        "the equation must define `{}` at the instance head `{}`",
                        a.name, inst.head
                    )));
                    ok = false;
                }
                // The instance being declared does not guard its own equation.
                if let Err(es) = st_check_type(&self.out.env, &inst.context, &scope, &eq.rhs) {
                    ok = false;
                    for e in es {
                        self.err(match e {
                            SurfaceError::UnguardedFamilyUse { family, pred } => {
                                SurfaceError::FamilyInRHS { family, head: inst.head.clone(), pred }
                            }
                            other => other,
                        });
                    }
                }
                Some(eq)
            }
        };
        if !ok {
            return None;
        }
        self.out.env.classes.get_mut(&inst.head.class).expect("checked above").instances.push(inst.clone());
        let eq = eq?;
        match flatten_equation(eq) {
            Ok(e) => Some(e),
            Err(e) => {
                self.err(e);
                None
            }
        }
    }

    fn open_axiom(&mut self, family: &Name, eq: Equation) {
        let k = self.open_count.entry(family.clone()).or_insert(0);
        let name = Name::from(format!("ax{family}_{k}"));
        *k += 1;
        self.push_core(Decl::Axiom { name, family: family.clone(), equations: vec![eq] });
    }

    fn closed_axiom(&mut self, family: &Name, equations: Vec<Equation>) {
        if !equations.is_empty() {
            let name = Name::from(format!("ax{family}"));
            self.push_core(Decl::Axiom { name, family: family.clone(), equations });
        }
    }

    fn class(&mut self, c: &ClassDecl) {
        if !self.add_class(c) {
            return;
        }
        self.out.surface.push(SurfaceDecl::Class(c.clone()));
        if let Some(insts) = &c.closed {
            let eqs: Vec<Equation> = insts.iter().filter_map(|i| self.add_instance(i)).collect();
            if let Some(a) = &c.assoc {
                self.closed_axiom(&a.name, eqs);
            }
        }
    }

    fn instance(&mut self, inst: &InstanceDecl) {
        if let Some(c) = self.out.env.classes.get(&inst.head.class) {
            if c.closed {
                self.err(SurfaceError::ClosedClassExtended(inst.head.class.clone()));
                return;
            }
        }
        self.out.surface.push(SurfaceDecl::Instance(inst.clone()));
        if let Some(eq) = self.add_instance(inst) {
            let family = eq.family.clone();
            self.open_axiom(&family, eq);
        }
    }

    fn check_equation_shape(&mut self, d: &FamilyDeclS, eq: &SEquation) -> bool {
        if eq.family != d.name {
            self.err(SurfaceError::BadAssociatedType(format!(
                "equation for `{}` inside the definition of `{}`",
                eq.family, d.name
            )));
            return false;
        }
        if eq.lhs.len() != d.params.len() {
            self.err(SurfaceError::ArityMismatch {
                name: d.name.clone(),
                expected: d.params.len(),
                found: eq.lhs.len(),
            });
            return false;
        }
        true
    }

    fn type_family(&mut self, d: &FamilyDeclS) {
        if !self.fresh_decl(&d.name) {
            return;
        }
        let arity = d.params.len();
        let params: Vec<Name> = d.params.iter().map(|(p, _)| p.clone()).collect();
        let pragma = self.pragmas.contains(&d.name);
        let Some(eqs) = &d.equations else {
            if pragma {
                self.out.unsafe_totals.push(d.name.clone());
                self.add_family(&d.name, arity, Guard::Total, true);
                self.free_open.push(d.name.clone());
                self.out.surface.push(SurfaceDecl::TypeFamily(d.clone()));
                return;
            }
            if d.total {
                self.err(SurfaceError::NotTotal { family: d.name.clone(), reason: NotTotal::OpenFamily });
            }
            let c = ClassDecl {
                context: vec![],
                name: class_for(&d.name),
                params: params.clone(),
                assoc: Some(AssocDecl { name: d.name.clone(), params }),
                closed: None,
            };
            if self.add_class(&c) {
                self.free_open.push(d.name.clone());
                self.out.surface.push(SurfaceDecl::Class(c));
            }
            return;
        };
        if !eqs.iter().all(|eq| self.check_equation_shape(d, eq)) {
            return;
        }
        let kinds: Vec<Kind> = d
            .params
            .iter()
            .map(|(_, k)| match k {
                Some(k) if self.out.env.data.contains_key(k) => Kind::Data(k.clone()),
                _ => Kind::Open,
            })
            .collect();
        let verdict = if pragma { Ok(()) } else { check_totality(&self.out.env, &d.name, &kinds, eqs) };
        match verdict {
            Ok(()) => {
                if pragma {
                    self.out.unsafe_totals.push(d.name.clone());
                }
                self.add_family(&d.name, arity, Guard::Total, pragma);
                let mut core = Vec::new();
                for eq in eqs {
                    let scope = free_vars_of(&eq.lhs);
                    if let Err(es) = st_check_type(&self.out.env, &[], &scope, &eq.rhs) {
                        self.errs(es);
                    }
                    match flatten_equation(eq) {
                        Ok(e) => core.push(e),
                        Err(e) => self.err(e),
                    }
                }
                let mut shown = d.clone();
                shown.total = true;
                self.out.surface.push(SurfaceDecl::TypeFamily(shown));
                self.closed_axiom(&d.name, core);
            }
            Err(reason) if d.total => self.err(SurfaceError::NotTotal { family: d.name.clone(), reason }),
            Err(_) => {
                // Not total: package as a closed class guarding the family.
                let name = class_for(&d.name);
                let c = ClassDecl {
                    context: vec![],
                    name: name.clone(),
                    params: params.clone(),
                    assoc: Some(AssocDecl { name: d.name.clone(), params }),
                    closed: Some(vec![]),
                };
                if !self.add_class(&c) {
                    return;
                }
                let mut insts = Vec::new();
                let mut core = Vec::new();
                for eq in eqs {
                    let scope = free_vars_of(&eq.lhs);
                    let inst = InstanceDecl {
                        context: infer_constraints(&self.out.env, &scope, &eq.rhs),
                        head: Pred { class: name.clone(), args: eq.lhs.clone() },
                        assoc: Some(eq.clone()),
                    };
                    if let Some(e) = self.add_instance(&inst) {
                        core.push(e);
                    }
                    insts.push(inst);
                }
                self.out.surface.push(SurfaceDecl::Class(ClassDecl { closed: Some(insts), ..c }));
                self.closed_axiom(&d.name, core);
            }
        }
    }

    fn type_instance(&mut self, eq: &SEquation) {
        if !self.free_open.contains(&eq.family) {
            self.err(SurfaceError::NotOpenFamily(eq.family.clone()));
            return;
        }
        let info = self.out.env.families[&eq.family].clone();
        if eq.lhs.len() != info.arity {
            self.err(SurfaceError::ArityMismatch {
                name: eq.family.clone(),
                expected: info.arity,
                found: eq.lhs.len(),
            });
            return;
        }
        let scope = free_vars_of(&eq.lhs);
        match info.guard {
            Guard::Total => {
                if let Err(es) = st_check_type(&self.out.env, &[], &scope, &eq.rhs) {
                    self.errs(es);
                    return;
                }
                self.out.surface.push(SurfaceDecl::TypeInstance(eq.clone()));
                match flatten_equation(eq) {
                    Ok(e) => self.open_axiom(&eq.family, e),
                    Err(e) => self.err(e),
                }
            }
            Guard::Class(c) => {
                let inst = InstanceDecl {
                    context: infer_constraints(&self.out.env, &scope, &eq.rhs),
                    head: Pred { class: c, args: eq.lhs.clone() },
                    assoc: Some(eq.clone()),
                };
                self.instance(&inst);
            }
        }
    }

    fn data(&mut self, d: &super::syntax::DataDecl) {
        if !self.fresh_decl(&d.name) {
            return;
        }
        self.out.env.ty_cons.insert(d.name.clone(), d.params.len());
        self.push_core(Decl::Data { name: d.name.clone(), arity: d.params.len() });
        for (c, fields) in &d.ctors {
            if self.fresh_decl(c) {
                self.out.env.ty_cons.insert(c.clone(), fields.len());
                self.push_core(Decl::Data { name: c.clone(), arity: fields.len() });
            }
        }
        for (_, fields) in &d.ctors {
            for t in fields {
                if let Err(es) = st_check_type(&self.out.env, &[], &d.params, t) {
                    self.errs(es);
                }
            }
        }
        self.out.env.data.insert(d.name.clone(), DataInfo { params: d.params.clone(), ctors: d.ctors.clone() });
        self.out.surface.push(SurfaceDecl::Data(d.clone()));
    }

    fn sig(&mut self, name: &Name, ty: &SType) {
        let scope = ty.free_vars();
        let preds = infer_constraints(&self.out.env, &scope, ty);
        if let Err(es) = st_check_type(&self.out.env, &preds, &scope, ty) {
            self.errs(es);
        }
        let ty = if preds.is_empty() { ty.clone() } else { SType::Qual(preds, Box::new(ty.clone())) };
        self.out.surface.push(SurfaceDecl::Sig { name: name.clone(), ty });
    }
}

/// Elaborates `decls` on top of the kernel declarations already in `base`.
pub fn elaborate(base: &Signature, decls: &[SurfaceDecl]) -> Elaboration {
    let mut env = SurfaceEnv { ty_cons: base.ty_cons.clone(), ..SurfaceEnv::default() };
    for (f, d) in &base.families {
        let guard = if d.total { Guard::Total } else { Guard::Class(class_for(f)) };
        env.families.insert(f.clone(), FamilyInfo { arity: d.arity, guard, unsafe_total: false });
    }
    let pragmas = decls
        .iter()
        .filter_map(|d| match d {
            SurfaceDecl::TotalPragma(f) => Some(f.clone()),
            _ => None,
        })
        .collect();
    let mut e = Elab {
        out: Elaboration { env, ..Elaboration::default() },
        pragmas,
        free_open: Vec::new(),
        open_count: Default::default(),
        here: 0,
    };
    for (i, d) in decls.iter().enumerate() {
        e.here = i;
        match d {
            SurfaceDecl::Data(d) => e.data(d),
            SurfaceDecl::Class(c) => e.class(c),
            SurfaceDecl::Instance(inst) => e.instance(inst),
            SurfaceDecl::TypeFamily(f) => e.type_family(f),
            SurfaceDecl::TypeInstance(eq) => e.type_instance(eq),
            SurfaceDecl::TotalPragma(f) => {
                if !decls.iter().any(|d| matches!(d, SurfaceDecl::TypeFamily(x) if &x.name == f)) {
                    e.err(SurfaceError::UnknownName(f.clone()));
                }
                e.out.surface.push(d.clone());
            }
            SurfaceDecl::Sig { name, ty } => e.sig(name, ty),
        }
    }
    e.out
}
