//! Signature well-formedness: each axiom equation is checked on its own,
//! then the signature as a whole must be good (one family per axiom, no
//! stray variables, closed families kept closed, open equations compatible).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::name::Name;
use crate::syntax::{Binding, Context, Equation, Signature, Type};
use crate::typecheck::{check_type, TypeError};
use crate::unify::compat;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SigErrorKind {
    #[error("equation mentions undeclared family `{0}`")]
    UndeclaredFamily(Name),
    #[error("family application on the left-hand side: `{0}`")]
    FamilyInLHS(Type),
    #[error("family application on the right-hand side: `{0}` (bind it with an evaluation assumption)")]
    FamilyInRHS(Type),
    #[error("ill-scoped equation: {0}")]
    IllScopedEquation(TypeError),
    #[error("bad evaluation assumption `{name}`: {reason}")]
    BadAssumption { name: Name, reason: String },
    #[error("`{family}` expects {expected} argument(s) but the equation gives {found}")]
    ArityMismatch { family: Name, expected: usize, found: usize },
    #[error("constant `{name}` has ill-formed type: {reason}")]
    BadConstType { name: Name, reason: String },
    #[error("axiom for `{expected}` has an equation for `{found}`")]
    MixedFamilyAxiom { expected: Name, found: Name },
    #[error("quantified variables {declared:?} do not match the left-hand side variables {used:?}")]
    UnboundOrUnusedTyVar { declared: Vec<Name>, used: Vec<Name> },
    #[error("closed family `{family}` is defined by `{closed}` and may not be extended by `{other}`")]
    ClosedFamilyClash { family: Name, closed: Name, other: Name },
    #[error("open equations `{first}` and `{second}` are incompatible")]
    IncompatibleOpenEquations { first: Name, second: Name },
}

impl SigErrorKind {
    pub fn code(&self) -> &'static str {
        use SigErrorKind::*;
        match self {
            UndeclaredFamily(_) => "UndeclaredFamily",
            FamilyInLHS(_) => "FamilyInLHS",
            FamilyInRHS(_) => "FamilyInRHS",
            IllScopedEquation(_) => "IllScopedEquation",
            BadAssumption { .. } => "BadAssumption",
            ArityMismatch { .. } => "ArityMismatch",
            BadConstType { .. } => "BadConstType",
            MixedFamilyAxiom { .. } => "MixedFamilyAxiom",
            UnboundOrUnusedTyVar { .. } => "UnboundOrUnusedTyVar",
            ClosedFamilyClash { .. } => "ClosedFamilyClash",
            IncompatibleOpenEquations { .. } => "IncompatibleOpenEquations",
        }
    }
}

/// One problem found in a signature, located by axiom and equation index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigDiagnostic {
    pub axiom: Option<Name>,
    pub equation: Option<usize>,
    pub kind: SigErrorKind,
}

impl SigDiagnostic {
    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

impl fmt::Display for SigDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.axiom, self.equation) {
            (Some(a), Some(i)) => write!(f, "axiom `{a}`, equation {i}: {}", self.kind),
            (Some(a), None) => write!(f, "axiom `{a}`: {}", self.kind),
            _ => write!(f, "{}", self.kind),
        }
    }
}

/// Checks a single equation in isolation.
pub fn check_equation(sig: &Signature, eq: &Equation) -> Vec<SigErrorKind> {
    let mut out = Vec::new();
    match sig.families.get(&eq.family) {
        None => out.push(SigErrorKind::UndeclaredFamily(eq.family.clone())),
        Some(d) if d.arity != eq.lhs.len() => {
            out.push(SigErrorKind::ArityMismatch { family: eq.family.clone(), expected: d.arity, found: eq.lhs.len() })
        }
        Some(_) => {}
    }
    let mut ctx = Context::with_tyvars(eq.tyvars.iter().cloned());
    for t in &eq.lhs {
        if !t.is_family_free() {
            out.push(SigErrorKind::FamilyInLHS(t.clone()));
        } else if let Err(e) = check_type(sig, &ctx, t) {
            out.push(SigErrorKind::IllScopedEquation(e));
        }
    }
    for a in &eq.assumptions {
        let bad = |reason: String| SigErrorKind::BadAssumption { name: a.tyvar.clone(), reason };
        match sig.families.get(&a.family) {
            None => out.push(bad(format!("undeclared family `{}`", a.family))),
            Some(d) if d.arity != a.args.len() => {
                out.push(bad(format!("`{}` expects {} argument(s), found {}", a.family, d.arity, a.args.len())))
            }
            Some(_) => {}
        }
        for t in &a.args {
            if !t.is_family_free() {
                out.push(bad(format!("argument `{t}` contains a family application")));
            } else if let Err(e) = check_type(sig, &ctx, t) {
                out.push(bad(e.to_string()));
            }
        }
        if ctx.binds(&a.tyvar) {
            out.push(bad(format!("variable `{}` is already bound", a.tyvar)));
        }
        if a.covar == a.tyvar || eq.assumptions.iter().filter(|b| b.covar == a.covar).count() > 1 {
            out.push(bad(format!("coercion variable `{}` is not distinct", a.covar)));
        }
        ctx.push(Binding::Ty(a.tyvar.clone()));
    }
    if !eq.rhs.is_family_free() {
        out.push(SigErrorKind::FamilyInRHS(eq.rhs.clone()));
    } else if let Err(e) = check_type(sig, &ctx, &eq.rhs) {
        out.push(SigErrorKind::IllScopedEquation(e));
    }
    out
}

/// Per-equation checks for every axiom, plus constant types.
pub fn check_signature(sig: &Signature) -> Vec<SigDiagnostic> {
    let mut out = Vec::new();
    for (k, t) in &sig.consts {
        let bad = match t {
            Type::Con(..) => check_type(sig, &Context::new(), t).err().map(|e| e.to_string()),
            _ => Some(format!("constants must have a constructor type, found `{t}`")),
        };
        if let Some(reason) = bad {
            out.push(SigDiagnostic {
                axiom: None,
                equation: None,
                kind: SigErrorKind::BadConstType { name: k.clone(), reason },
            });
        }
    }
    for (name, ax) in &sig.axioms {
        if !sig.families.contains_key(&ax.family) {
            out.push(SigDiagnostic {
                axiom: Some(name.clone()),
                equation: None,
                kind: SigErrorKind::UndeclaredFamily(ax.family.clone()),
            });
        }
        for (i, eq) in ax.equations.iter().enumerate() {
            for kind in check_equation(sig, eq) {
                out.push(SigDiagnostic { axiom: Some(name.clone()), equation: Some(i), kind });
            }
        }
    }
    out
}

/// The four global conditions on a signature.
pub fn check_good_signature(sig: &Signature) -> Vec<SigDiagnostic> {
    let mut out = Vec::new();
    let at = |a: &Name, i: Option<usize>, kind| SigDiagnostic { axiom: Some(a.clone()), equation: i, kind };
    for (name, ax) in &sig.axioms {
        for (i, eq) in ax.equations.iter().enumerate() {
            if eq.family != ax.family {
                out.push(at(
                    name,
                    Some(i),
                    SigErrorKind::MixedFamilyAxiom { expected: ax.family.clone(), found: eq.family.clone() },
                ));
            }
            let declared: BTreeSet<Name> = eq.tyvars.iter().cloned().collect();
            let used: BTreeSet<Name> = eq.lhs.iter().flat_map(|t| t.free_vars()).collect();
            if declared != used || declared.len() != eq.tyvars.len() {
                out.push(at(
                    name,
                    Some(i),
                    SigErrorKind::UnboundOrUnusedTyVar {
                        declared: eq.tyvars.clone(),
                        used: used.into_iter().collect(),
                    },
                ));
            }
        }
    }
    for (name, ax) in &sig.axioms {
        if !ax.is_closed() {
            continue;
        }
        for (other, _) in sig.axioms_for(&ax.family) {
            if other != name {
                out.push(at(
                    other,
                    None,
                    SigErrorKind::ClosedFamilyClash {
                        family: ax.family.clone(),
                        closed: name.clone(),
                        other: other.clone(),
                    },
                ));
            }
        }
    }
    let open: Vec<(&Name, &Equation)> =
        sig.axioms.iter().filter(|(_, ax)| ax.equations.len() == 1).map(|(n, ax)| (n, &ax.equations[0])).collect();
    for (i, (n1, e1)) in open.iter().enumerate() {
        for (n2, e2) in &open[i + 1..] {
            if e1.family == e2.family && !compat(e1, e2) {
                out.push(at(
                    n2,
                    None,
                    SigErrorKind::IncompatibleOpenEquations { first: (*n1).clone(), second: (*n2).clone() },
                ));
            }
        }
    }
    out
}
