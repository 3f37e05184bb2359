//! Call-by-name small-step evaluation.
//!
//! Casts are pushed through applications so that a value carries at most
//! one coercion, and `assume` blocks are discharged by running the family.

use std::fmt;

use thiserror::Error;

use crate::name::Name;
use crate::rewrite::{top_reduce, Stuck};
use crate::subst::Subst;
use crate::syntax::{Coercion, EvalResolution, Expr, Signature, Type};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TotalEvalError {
    #[error("`{0}` is not a total family")]
    NotTotal(Name),
    #[error("arguments must be closed, family-free types")]
    ImproperArgs,
    #[error("no equation applies: {0}")]
    NoEquation(Stuck),
}

/// Runs a total family on closed arguments, producing a witness and proof.
pub fn total_eval(sig: &Signature, family: &Name, args: &[Type]) -> Result<EvalResolution, TotalEvalError> {
    if !sig.is_total(family) {
        return Err(TotalEvalError::NotTotal(family.clone()));
    }
    if !args.iter().all(|t| t.is_family_free() && t.free_vars().is_empty()) {
        return Err(TotalEvalError::ImproperArgs);
    }
    top_reduce(sig, family, args).map(|r| r.resolution()).map_err(TotalEvalError::NoEquation)
}

/// Outcome of one evaluation step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Stepped { expr: Expr, rule: &'static str },
    Value,
    CoercedValue,
    Stuck(String),
}

fn stepped(expr: Expr, rule: &'static str) -> StepResult {
    StepResult::Stepped { expr, rule }
}

fn is_coerced_value(e: &Expr) -> bool {
    matches!(e, Expr::Cast(v, _) if v.is_value())
}

pub fn step(sig: &Signature, e: &Expr) -> StepResult {
    match e {
        Expr::Const(_) | Expr::Lam(..) | Expr::TLam(..) | Expr::CLam(..) => StepResult::Value,
        Expr::Var(x) => StepResult::Stuck(format!("free variable `{x}`")),
        Expr::App(f, arg) => match &**f {
            Expr::Lam(x, _, body) => stepped(Subst::tm(x, (**arg).clone()).apply_expr(body), "S_Beta"),
            Expr::Cast(v, g) if v.is_value() => {
                if !matches!(**v, Expr::Lam(..)) {
                    return StepResult::Stuck(format!("applying a non-function value `{v}`"));
                }
                let arg = Expr::cast((**arg).clone(), Coercion::sym(Coercion::nth(0, g.clone())));
                stepped(Expr::cast(Expr::app((**v).clone(), arg), Coercion::nth(1, g.clone())), "S_Push")
            }
            _ => congruence(sig, f, "S_App", |f| Expr::app(f, (**arg).clone()), "a non-function value"),
        },
        Expr::TApp(f, t) => match &**f {
            Expr::TLam(a, body) => stepped(Subst::ty(a, t.clone()).apply_expr(body), "S_TBeta"),
            Expr::Cast(v, g) if v.is_value() => {
                if !matches!(**v, Expr::TLam(..)) {
                    return StepResult::Stuck(format!("instantiating a non-polymorphic value `{v}`"));
                }
                stepped(
                    Expr::cast(Expr::tapp((**v).clone(), t.clone()), Coercion::inst(g.clone(), t.clone())),
                    "S_TPush",
                )
            }
            _ => congruence(sig, f, "S_TApp", |f| Expr::tapp(f, t.clone()), "a non-polymorphic value"),
        },
        Expr::CApp(f, g) => match &**f {
            Expr::CLam(c, _, body) => stepped(Subst::co(c, g.clone()).apply_expr(body), "S_CBeta"),
            Expr::Cast(v, eta) if v.is_value() => {
                if !matches!(**v, Expr::CLam(..)) {
                    return StepResult::Stuck(format!("applying a non-qualified value `{v}` to a coercion"));
                }
                let arg = Coercion::trans(
                    Coercion::nth(0, eta.clone()),
                    Coercion::trans(g.clone(), Coercion::sym(Coercion::nth(1, eta.clone()))),
                );
                stepped(Expr::cast(Expr::capp((**v).clone(), arg), Coercion::nth(2, eta.clone())), "S_CPush")
            }
            _ => congruence(sig, f, "S_CApp", |f| Expr::capp(f, g.clone()), "a non-qualified value"),
        },
        Expr::Cast(inner, g) => {
            if inner.is_value() {
                return StepResult::CoercedValue;
            }
            if let Expr::Cast(v, g1) = &**inner {
                if v.is_value() {
                    return stepped(Expr::cast((**v).clone(), Coercion::trans(g1.clone(), g.clone())), "S_Trans");
                }
            }
            match step(sig, inner) {
                StepResult::Stepped { expr, .. } => stepped(Expr::cast(expr, g.clone()), "S_Cast"),
                StepResult::Stuck(why) => StepResult::Stuck(why),
                StepResult::Value | StepResult::CoercedValue => unreachable!("handled above"),
            }
        }
        Expr::Assume(chi, body) => match total_eval(sig, &chi.family, &chi.args) {
            Ok(q) => {
                let mut s = Subst::ty(&chi.tyvar, q.witness);
                s.cos.insert(chi.covar.clone(), q.proof);
                stepped(s.apply_expr(body), "S_Resolve")
            }
            Err(e) => {
                StepResult::Stuck(format!("cannot resolve `{}`: {e}", Type::Fam(chi.family.clone(), chi.args.clone())))
            }
        },
    }
}

/// Steps inside the head position `f`, or reports a stuck head.
fn congruence(
    sig: &Signature,
    f: &Expr,
    rule: &'static str,
    rebuild: impl FnOnce(Expr) -> Expr,
    wanted: &str,
) -> StepResult {
    match step(sig, f) {
        StepResult::Stepped { expr, .. } => stepped(rebuild(expr), rule),
        StepResult::Value | StepResult::CoercedValue => StepResult::Stuck(format!("expected {wanted}, found `{f}`")),
        StepResult::Stuck(why) => StepResult::Stuck(why),
    }
}

/// Final state of a bounded evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(Expr),
    CoercedValue(Expr),
    Stuck { expr: Expr, reason: String },
    FuelExhausted(Expr),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(e) | Outcome::CoercedValue(e) => write!(f, "{e}"),
            Outcome::Stuck { expr, reason } => write!(f, "stuck at `{expr}`: {reason}"),
            Outcome::FuelExhausted(e) => write!(f, "fuel exhausted at `{e}`"),
        }
    }
}

/// A bounded run, with the rule used for each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub outcome: Outcome,
    pub trace: Vec<(&'static str, Expr)>,
}

impl Run {
    pub fn steps(&self) -> usize {
        self.trace.len()
    }
}

pub fn eval(sig: &Signature, e: &Expr, fuel: usize) -> Run {
    let mut cur = e.clone();
    let mut trace = Vec::new();
    loop {
        match step(sig, &cur) {
            StepResult::Value => return Run { outcome: Outcome::Value(cur), trace },
            StepResult::CoercedValue => return Run { outcome: Outcome::CoercedValue(cur), trace },
            StepResult::Stuck(reason) => return Run { outcome: Outcome::Stuck { expr: cur, reason }, trace },
            StepResult::Stepped { expr, rule } => {
                if trace.len() >= fuel {
                    return Run { outcome: Outcome::FuelExhausted(cur), trace };
                }
                trace.push((rule, expr.clone()));
                cur = expr;
            }
        }
    }
}

/// Whether `e` is a value or a value under exactly one cast.
pub fn is_final(e: &Expr) -> bool {
    e.is_value() || is_coerced_value(e)
}
