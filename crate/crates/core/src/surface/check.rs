//! Well-formedness of surface types, and its reading as an inference
//! procedure for the predicates that guard family uses.

use super::entail::{entails, pred_eq, EntailError};
use super::env::{Guard, SurfaceEnv, SurfaceError};
use super::syntax::{Pred, SType};
use crate::name::Name;

struct Checker<'a> {
    env: &'a SurfaceEnv,
    errors: Vec<SurfaceError>,
}

impl Checker<'_> {
    fn ty(&mut self, given: &mut Vec<Pred>, scope: &mut Vec<Name>, t: &SType) {
        match t {
            SType::Var(a) => {
                if !scope.contains(a) {
                    self.errors.push(SurfaceError::UnboundTyVar(a.clone()));
                }
            }
            SType::Con(h, args) => {
                match self.env.ty_cons.get(h) {
                    None => self.errors.push(SurfaceError::UnknownName(h.clone())),
                    Some(&n) if n != args.len() => self.errors.push(SurfaceError::ArityMismatch {
                        name: h.clone(),
                        expected: n,
                        found: args.len(),
                    }),
                    Some(_) => {}
                }
                args.iter().for_each(|a| self.ty(given, scope, a));
            }
            SType::Fam(f, args) => {
                match self.env.families.get(f) {
                    None => self.errors.push(SurfaceError::UnknownName(f.clone())),
                    Some(info) if info.arity != args.len() => self.errors.push(SurfaceError::ArityMismatch {
                        name: f.clone(),
                        expected: info.arity,
                        found: args.len(),
                    }),
                    Some(info) => {
                        if let Guard::Class(c) = &info.guard {
                            let pred = Pred { class: c.clone(), args: args.clone() };
                            match entails(self.env, given, &pred) {
                                Ok(_) => {}
                                Err(EntailError::DepthExceeded(p)) => {
                                    self.errors.push(SurfaceError::EntailmentDepthExceeded(p))
                                }
                                Err(EntailError::NotEntailed(_)) => {
                                    self.errors.push(SurfaceError::UnguardedFamilyUse { family: f.clone(), pred })
                                }
                            }
                        }
                    }
                }
                args.iter().for_each(|a| self.ty(given, scope, a));
            }
            SType::Arrow(a, b) => {
                self.ty(given, scope, a);
                self.ty(given, scope, b);
            }
            SType::Forall(a, b) => {
                scope.push(a.clone());
                self.ty(given, scope, b);
                scope.pop();
            }
            SType::Qual(ps, b) => {
                for p in ps {
                    self.pred(given, scope, p);
                }
                let n = given.len();
                given.extend(ps.iter().cloned());
                self.ty(given, scope, b);
                given.truncate(n);
            }
        }
    }

    fn pred(&mut self, given: &mut Vec<Pred>, scope: &mut Vec<Name>, p: &Pred) {
        match self.env.classes.get(&p.class) {
            None => self.errors.push(SurfaceError::UnknownClass(p.class.clone())),
            Some(c) if c.arity() != p.args.len() => self.errors.push(SurfaceError::ArityMismatch {
                name: p.class.clone(),
                expected: c.arity(),
                found: p.args.len(),
            }),
            Some(_) => {}
        }
        p.args.iter().for_each(|a| self.ty(given, scope, a));
    }
}

/// `given | scope |- t type`.
pub fn st_check_type(env: &SurfaceEnv, given: &[Pred], scope: &[Name], t: &SType) -> Result<(), Vec<SurfaceError>> {
    let mut c = Checker { env, errors: Vec::new() };
    c.ty(&mut given.to_vec(), &mut scope.to_vec(), t);
    if c.errors.is_empty() {
        Ok(())
    } else {
        Err(c.errors)
    }
}

/// Checks a predicate's class, arity and argument types.
pub fn st_check_pred(env: &SurfaceEnv, given: &[Pred], scope: &[Name], p: &Pred) -> Result<(), Vec<SurfaceError>> {
    let mut c = Checker { env, errors: Vec::new() };
    c.pred(&mut given.to_vec(), &mut scope.to_vec(), p);
    if c.errors.is_empty() {
        Ok(())
    } else {
        Err(c.errors)
    }
}

// Guard predicates demanded by family uses, in source order, each with the
// qualifiers in scope at the use. Uses mentioning a variable bound inside
// `t` are dropped: no outer predicate can speak about it.
fn demanded(
    env: &SurfaceEnv,
    t: &SType,
    local: &mut Vec<Pred>,
    bound: &mut Vec<Name>,
    out: &mut Vec<(Pred, Vec<Pred>)>,
) {
    match t {
        SType::Var(_) => {}
        SType::Con(_, args) => args.iter().for_each(|a| demanded(env, a, local, bound, out)),
        SType::Fam(f, args) => {
            if let Some(info) = env.families.get(f) {
                if let Guard::Class(c) = &info.guard {
                    let pred = Pred { class: c.clone(), args: args.clone() };
                    if !pred.free_vars().iter().any(|v| bound.contains(v)) {
                        out.push((pred, local.clone()));
                    }
                }
            }
            args.iter().for_each(|a| demanded(env, a, local, bound, out));
        }
        SType::Arrow(a, b) => {
            demanded(env, a, local, bound, out);
            demanded(env, b, local, bound, out);
        }
        SType::Forall(a, b) => {
            bound.push(a.clone());
            demanded(env, b, local, bound, out);
            bound.pop();
        }
        SType::Qual(ps, b) => {
            for p in ps {
                p.args.iter().for_each(|a| demanded(env, a, local, bound, out));
            }
            let n = local.len();
            local.extend(ps.iter().cloned());
            demanded(env, b, local, bound, out);
            local.truncate(n);
        }
    }
}

fn sufficient(env: &SurfaceEnv, ps: &[Pred], uses: &[(Pred, Vec<Pred>)]) -> bool {
    uses.iter().all(|(want, local)| {
        let mut given = ps.to_vec();
        given.extend(local.iter().cloned());
        entails(env, &given, want).is_ok()
    })
}

/// The minimal predicate set `P` with `P | scope |- t type`, in source order
/// of the family uses that demand them. Each candidate is dropped when the
/// remaining set still guards every use, through superclasses, instances or
/// qualifiers inside `t`.
pub fn infer_constraints(env: &SurfaceEnv, _scope: &[Name], t: &SType) -> Vec<Pred> {
    let mut uses = Vec::new();
    demanded(env, t, &mut Vec::new(), &mut Vec::new(), &mut uses);
    let mut wanted: Vec<Pred> = Vec::new();
    for (p, _) in &uses {
        if !wanted.iter().any(|q| pred_eq(q, p)) {
            wanted.push(p.clone());
        }
    }
    let mut i = 0;
    while i < wanted.len() {
        let rest: Vec<Pred> = wanted.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        if sufficient(env, &rest, &uses) {
            wanted = rest;
        } else {
            i += 1;
        }
    }
    wanted
}
