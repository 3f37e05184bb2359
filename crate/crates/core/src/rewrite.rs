//! Type-level rewriting with family equations.
//!
//! `top_reduce` rewrites a single family application `F args` whose
//! arguments are family-free. Equations are scanned in declaration order; an
//! equation fires when its left-hand side matches, no earlier equation of the
//! same axiom conflicts, and each of its evaluation assumptions can itself be
//! reduced. A rewrite step replaces one family application anywhere in a type
//! (including under binders, where bound variables stay rigid), so each step
//! removes exactly one family node.

use std::fmt;

use crate::alpha::alpha_eq_ty;
use crate::name::Name;
use crate::subst::Subst;
use crate::syntax::{AxiomUse, Coercion, Context, EvalResolution, Path, Prop, Signature, Type};
use crate::typecheck::{check_coercion, TypeError};
use crate::unify::{match_types, no_conflict, rename_equation};

/// Bound on nested assumption resolution inside one `top_reduce` call.
pub const MAX_RESOLUTION_DEPTH: usize = 256;

/// Why a family application does not reduce at the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stuck {
    UndeclaredFamily(Name),
    NotFamilyFree,
    NoMatch,
    ConflictBlocked { axiom: Name, index: usize, earlier: usize },
    AssumptionStuck { axiom: Name, index: usize, family: Name, inner: Box<Stuck> },
    DepthExceeded,
    Cycle,
}

impl fmt::Display for Stuck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stuck::UndeclaredFamily(n) => write!(f, "undeclared family `{n}`"),
            Stuck::NotFamilyFree => write!(f, "arguments still contain family applications"),
            Stuck::NoMatch => write!(f, "no equation matches"),
            Stuck::ConflictBlocked { axiom, index, earlier } => {
                write!(f, "equation {index} of `{axiom}` is blocked by equation {earlier}")
            }
            Stuck::AssumptionStuck { axiom, index, family, inner } => {
                write!(f, "equation {index} of `{axiom}` needs `{family}`, which is stuck: {inner}")
            }
            Stuck::DepthExceeded => write!(f, "assumption resolution exceeded depth {MAX_RESOLUTION_DEPTH}"),
            Stuck::Cycle => write!(f, "assumption resolution loops"),
        }
    }
}

/// A successful top-level rewrite together with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduct {
    pub ty: Type,
    pub axiom: Name,
    pub index: usize,
    pub rho: Vec<Type>,
    pub resolutions: Vec<EvalResolution>,
}

impl Reduct {
    /// The axiom use proving `F args ~ self.ty`.
    pub fn proof(&self) -> Coercion {
        Coercion::Axiom(AxiomUse {
            axiom: self.axiom.clone(),
            index: self.index,
            tys: self.rho.clone(),
            resolutions: self.resolutions.clone(),
        })
    }

    pub fn resolution(&self) -> EvalResolution {
        EvalResolution { witness: self.ty.clone(), proof: self.proof() }
    }
}

pub fn top_reduce(sig: &Signature, family: &Name, args: &[Type]) -> Result<Reduct, Stuck> {
    Top { sig, stack: Vec::new() }.reduce(family, args)
}

struct Top<'a> {
    sig: &'a Signature,
    stack: Vec<(Name, Vec<Type>)>,
}

impl Top<'_> {
    fn reduce(&mut self, family: &Name, args: &[Type]) -> Result<Reduct, Stuck> {
        if !self.sig.families.contains_key(family) {
            return Err(Stuck::UndeclaredFamily(family.clone()));
        }
        if !args.iter().all(Type::is_family_free) {
            return Err(Stuck::NotFamilyFree);
        }
        if self.stack.len() >= MAX_RESOLUTION_DEPTH {
            return Err(Stuck::DepthExceeded);
        }
        if self
            .stack
            .iter()
            .any(|(f, a)| f == family && a.len() == args.len() && a.iter().zip(args).all(|(x, y)| alpha_eq_ty(x, y)))
        {
            return Err(Stuck::Cycle);
        }
        self.stack.push((family.clone(), args.to_vec()));
        let r = self.scan(family, args);
        self.stack.pop();
        r
    }

    fn scan(&mut self, family: &Name, args: &[Type]) -> Result<Reduct, Stuck> {
        let sig = self.sig;
        let mut failure = Stuck::NoMatch;
        for (ax_name, ax) in sig.axioms_for(family) {
            'eqs: for (i, eq) in ax.equations.iter().enumerate() {
                if eq.family != *family {
                    continue;
                }
                let ren = rename_equation(eq, "r");
                let Some(theta) = match_types(&ren.lhs, args) else { continue };
                let Some(rho) = ren.tyvars.iter().map(|a| theta.get(a).cloned()).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                if let Some(j) = (0..i).find(|&j| !no_conflict(&ax.equations[j], eq, &rho)) {
                    failure = Stuck::ConflictBlocked { axiom: ax_name.clone(), index: i, earlier: j };
                    continue;
                }
                let mut s = Subst::from_tys(ren.tyvars.iter().cloned().zip(rho.iter().cloned()));
                let mut resolutions = Vec::with_capacity(ren.assumptions.len());
                for chi in &ren.assumptions {
                    let inner_args: Vec<Type> = chi.args.iter().map(|t| s.apply_ty(t)).collect();
                    match self.reduce(&chi.family, &inner_args) {
                        Ok(r) => {
                            s.tys.insert(chi.tyvar.clone(), r.ty.clone());
                            resolutions.push(r.resolution());
                        }
                        Err(e) => {
                            failure = Stuck::AssumptionStuck {
                                axiom: ax_name.clone(),
                                index: i,
                                family: chi.family.clone(),
                                inner: Box::new(e),
                            };
                            continue 'eqs;
                        }
                    }
                }
                return Ok(Reduct { ty: s.apply_ty(&ren.rhs), axiom: ax_name.clone(), index: i, rho, resolutions });
            }
        }
        Err(failure)
    }
}

/// How to pick the redex for one rewrite step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RedexChoice {
    /// The leftmost family application that reduces.
    LeftmostInnermost,
    /// The rightmost family application that reduces.
    RightmostInnermost,
    /// The n-th family application in preorder, whether or not it reduces.
    Nth(usize),
}

/// One rewrite step: the new type, where it happened, and a proof `old ~ new`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub ty: Type,
    pub path: Path,
    pub reduct: Reduct,
    pub proof: Coercion,
}

/// Rewrites the family application at `path`, if it reduces.
pub fn step_at(sig: &Signature, t: &Type, path: &[usize]) -> Option<Step> {
    let Some(Type::Fam(f, args)) = t.at(path) else { return None };
    let reduct = top_reduce(sig, f, args).ok()?;
    let ty = t.replace_at(path, reduct.ty.clone())?;
    let proof = congruence(t, path, reduct.proof());
    Some(Step { ty, path: path.to_vec(), reduct, proof })
}

/// All family applications that reduce, in preorder.
pub fn reducible_redexes(sig: &Signature, t: &Type) -> Vec<Path> {
    t.find_redexes()
        .into_iter()
        .filter(|p| match t.at(p) {
            Some(Type::Fam(f, args)) => top_reduce(sig, f, args).is_ok(),
            _ => false,
        })
        .collect()
}

pub fn step_type(sig: &Signature, t: &Type, choice: RedexChoice) -> Option<Step> {
    match choice {
        RedexChoice::Nth(n) => step_at(sig, t, t.find_redexes().get(n)?),
        RedexChoice::LeftmostInnermost => t.find_redexes().iter().find_map(|p| step_at(sig, t, p)),
        RedexChoice::RightmostInnermost => t.find_redexes().iter().rev().find_map(|p| step_at(sig, t, p)),
    }
}

/// The result of normalizing a type: its normal form, the number of steps
/// and a proof `start ~ normal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub ty: Type,
    pub steps: usize,
    pub proof: Coercion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuelExhausted {
    pub reached: Type,
}

pub const DEFAULT_FUEL: usize = 10_000;

/// Rewrites until no redex reduces. `select` picks one of the reducible
/// redex paths each step, returning its index.
pub fn normalize_with(
    sig: &Signature,
    t: &Type,
    fuel: usize,
    mut select: impl FnMut(&[Path]) -> usize,
) -> Result<Normalized, FuelExhausted> {
    let mut cur = t.clone();
    let mut proof: Option<Coercion> = None;
    let mut steps = 0;
    loop {
        let candidates: Vec<(Path, Reduct)> = cur
            .find_redexes()
            .into_iter()
            .filter_map(|p| match cur.at(&p) {
                Some(Type::Fam(f, args)) => top_reduce(sig, f, args).ok().map(|r| (p, r)),
                _ => None,
            })
            .collect();
        if candidates.is_empty() {
            let proof = proof.unwrap_or_else(|| Coercion::Refl(t.clone()));
            return Ok(Normalized { ty: cur, steps, proof });
        }
        if steps >= fuel {
            return Err(FuelExhausted { reached: cur });
        }
        let paths: Vec<Path> = candidates.iter().map(|(p, _)| p.clone()).collect();
        let k = select(&paths).min(paths.len() - 1);
        let (path, reduct) = &candidates[k];
        let step = congruence(&cur, path, reduct.proof());
        cur = cur.replace_at(path, reduct.ty.clone()).expect("path from find_redexes");
        proof = Some(match proof {
            None => step,
            Some(p) => Coercion::trans(p, step),
        });
        steps += 1;
    }
}

pub fn normalize(sig: &Signature, t: &Type) -> Result<Normalized, FuelExhausted> {
    normalize_with(sig, t, DEFAULT_FUEL, |_| 0)
}

pub fn normalize_rightmost(sig: &Signature, t: &Type) -> Result<Normalized, FuelExhausted> {
    normalize_with(sig, t, DEFAULT_FUEL, |ps| ps.len() - 1)
}

/// The common normal form of two types, if they have one.
pub fn join(sig: &Signature, a: &Type, b: &Type) -> Option<Type> {
    let na = normalize(sig, a).ok()?;
    let nb = normalize(sig, b).ok()?;
    alpha_eq_ty(&na.ty, &nb.ty).then_some(na.ty)
}

/// Lifts `inner : t@path ~ u` to a proof `t ~ t[path := u]` by congruence.
pub fn congruence(t: &Type, path: &[usize], inner: Coercion) -> Coercion {
    let Some((&i, rest)) = path.split_first() else { return inner };
    let refl = |x: &Type| Coercion::Refl(x.clone());
    let pick = |j: usize, x: &Type| if j == i { congruence(x, rest, inner.clone()) } else { refl(x) };
    match t {
        Type::Var(_) => inner,
        Type::Con(h, args) => Coercion::Con(h.clone(), args.iter().enumerate().map(|(j, x)| pick(j, x)).collect()),
        Type::Fam(f, args) => Coercion::Fam(f.clone(), args.iter().enumerate().map(|(j, x)| pick(j, x)).collect()),
        Type::Arrow(a, b) => Coercion::Arrow(Box::new(pick(0, a)), Box::new(pick(1, b))),
        Type::Forall(a, body) => Coercion::Forall(a.clone(), Box::new(pick(0, body))),
        Type::Qual(p, body) => {
            Coercion::Qual(Box::new(pick(0, &p.lhs)), Box::new(pick(1, &p.rhs)), Box::new(pick(2, body)))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndpointError {
    IllTyped(TypeError),
    NoJoin { lhs: Type, rhs: Type },
    ProperMismatch { lhs: Type, rhs: Type },
}

impl fmt::Display for EndpointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndpointError::IllTyped(e) => write!(f, "coercion is ill-typed: {e}"),
            EndpointError::NoJoin { lhs, rhs } => write!(f, "endpoints do not join: `{lhs}` vs `{rhs}`"),
            EndpointError::ProperMismatch { lhs, rhs } => {
                write!(f, "family-free endpoints differ: `{lhs}` vs `{rhs}`")
            }
        }
    }
}

/// Checks that the endpoints of a well-typed coercion rewrite to a common
/// type, and coincide outright when neither contains a family application.
pub fn consistent_endpoints(sig: &Signature, ctx: &Context, g: &Coercion) -> Result<Prop, EndpointError> {
    let p = check_coercion(sig, ctx, g).map_err(EndpointError::IllTyped)?;
    if p.lhs.fam_count() == 0 && p.rhs.fam_count() == 0 {
        if !alpha_eq_ty(&p.lhs, &p.rhs) {
            return Err(EndpointError::ProperMismatch { lhs: p.lhs, rhs: p.rhs });
        }
        return Ok(p);
    }
    match join(sig, &p.lhs, &p.rhs) {
        Some(_) => Ok(p),
        None => {
            let l = normalize(sig, &p.lhs).map(|n| n.ty).unwrap_or_else(|e| e.reached);
            let r = normalize(sig, &p.rhs).map(|n| n.ty).unwrap_or_else(|e| e.reached);
            Err(EndpointError::NoJoin { lhs: l, rhs: r })
        }
    }
}
