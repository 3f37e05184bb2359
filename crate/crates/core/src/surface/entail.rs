//! Class entailment: assumptions, superclass closure and instance search.
//! Closed classes try their instances in order and commit to the first
//! whose head matches.

use std::fmt;

use thiserror::Error;

use super::env::SurfaceEnv;
use super::syntax::{Pred, SType};
use crate::alpha::alpha_eq_ty;
use crate::name::Name;
use crate::unify::{match_types, unifiable};

/// Instance resolution deeper than this is reported as `DepthExceeded`.
pub const MAX_ENTAIL_DEPTH: usize = 32;

// Caps the superclass closure when superclass heads are not plain variables.
const MAX_CLOSURE: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    Given(Pred),
    Super { pred: Pred, from: Box<Derivation> },
    Instance { pred: Pred, index: usize, premises: Vec<Derivation> },
}

impl Derivation {
    pub fn conclusion(&self) -> &Pred {
        match self {
            Derivation::Given(p) | Derivation::Super { pred: p, .. } | Derivation::Instance { pred: p, .. } => p,
        }
    }

    fn render(&self, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match self {
            Derivation::Given(p) => out.push_str(&format!("{pad}{p}  (given)\n")),
            Derivation::Super { pred, from } => {
                out.push_str(&format!("{pad}{pred}  (superclass)\n"));
                from.render(indent + 1, out);
            }
            Derivation::Instance { pred, index, premises } => {
                out.push_str(&format!("{pad}{pred}  (instance {index})\n"));
                for d in premises {
                    d.render(indent + 1, out);
                }
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(0, &mut s);
        f.write_str(s.trim_end())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EntailError {
    #[error("cannot prove `{0}`")]
    NotEntailed(Pred),
    #[error("proving `{0}` exceeded depth {MAX_ENTAIL_DEPTH}")]
    DepthExceeded(Pred),
}

pub fn pred_eq(a: &Pred, b: &Pred) -> bool {
    a.class == b.class && alpha_eq_ty(&a.to_pattern(), &b.to_pattern())
}

/// `given` together with everything reachable through superclasses.
pub fn superclass_closure(env: &SurfaceEnv, given: &[Pred]) -> Vec<Derivation> {
    let mut out: Vec<Derivation> = Vec::new();
    let mut work: Vec<Derivation> = given.iter().rev().cloned().map(Derivation::Given).collect();
    while let Some(d) = work.pop() {
        if out.len() >= MAX_CLOSURE || out.iter().any(|e| pred_eq(e.conclusion(), d.conclusion())) {
            continue;
        }
        let p = d.conclusion().clone();
        if let Some(info) = env.classes.get(&p.class) {
            if info.params.len() == p.args.len() {
                let s: Vec<(Name, SType)> = info.params.iter().cloned().zip(p.args.iter().cloned()).collect();
                for sup in info.superclasses.iter().rev() {
                    work.push(Derivation::Super { pred: sup.subst(&s), from: Box::new(d.clone()) });
                }
            }
        }
        out.push(d);
    }
    out
}

/// Decides `given |- goal`, returning a derivation on success.
pub fn entails(env: &SurfaceEnv, given: &[Pred], goal: &Pred) -> Result<Derivation, EntailError> {
    let closure = superclass_closure(env, given);
    Solver { env, closure, stack: Vec::new() }.solve(goal, 0)
}

struct Solver<'a> {
    env: &'a SurfaceEnv,
    closure: Vec<Derivation>,
    stack: Vec<Pred>,
}

impl Solver<'_> {
    fn solve(&mut self, goal: &Pred, depth: usize) -> Result<Derivation, EntailError> {
        if let Some(d) = self.closure.iter().find(|d| pred_eq(d.conclusion(), goal)) {
            return Ok(d.clone());
        }
        if depth > MAX_ENTAIL_DEPTH {
            return Err(EntailError::DepthExceeded(goal.clone()));
        }
        // A goal that recurs on its own proof path has no finite derivation.
        if self.stack.iter().any(|p| pred_eq(p, goal)) {
            return Err(EntailError::NotEntailed(goal.clone()));
        }
        let Some(info) = self.env.classes.get(&goal.class) else {
            return Err(EntailError::NotEntailed(goal.clone()));
        };
        let subject: Vec<_> = goal.args.iter().map(SType::to_pattern).collect();
        let mut failure = EntailError::NotEntailed(goal.clone());
        for (index, inst) in info.instances.iter().enumerate() {
            let renaming: Vec<(Name, SType)> = inst
                .head
                .free_vars()
                .into_iter()
                .chain(inst.context.iter().flat_map(Pred::free_vars))
                .map(|v| (v.clone(), SType::Var(Name::from(format!("{v}#{depth}")))))
                .collect();
            let head = inst.head.subst(&renaming);
            let pattern: Vec<_> = head.args.iter().map(SType::to_pattern).collect();
            let Some(theta) = match_types(&pattern, &subject) else {
                if info.closed && unifiable(&pattern, &subject) {
                    // Could match once the goal is more instantiated: no commitment yet.
                    return Err(EntailError::NotEntailed(goal.clone()));
                }
                continue;
            };
            let s: Vec<(Name, SType)> = theta.iter().map(|(k, v)| (k.clone(), SType::from_pattern(v))).collect();
            self.stack.push(goal.clone());
            let premises: Result<Vec<_>, _> =
                inst.context.iter().map(|p| self.solve(&p.subst(&renaming).subst(&s), depth + 1)).collect();
            self.stack.pop();
            match premises {
                Ok(premises) => return Ok(Derivation::Instance { pred: goal.clone(), index, premises }),
                Err(e) if info.closed => return Err(e),
                Err(e @ EntailError::DepthExceeded(_)) => failure = e,
                Err(_) => {}
            }
        }
        Err(failure)
    }
}
