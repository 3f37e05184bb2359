//! Property suites. Each case draws its inputs from its own seeded stream,
//! so cases run in parallel and reports merge deterministically.

use std::fmt;
use std::str::FromStr;

use cfc_core::alpha::{alpha_eq_prop, alpha_eq_ty};
use cfc_core::eval::{eval, total_eval, Outcome};
use cfc_core::parser::parse_program;
use cfc_core::program::{alpha_eq_program, Decl, Program};
use cfc_core::rewrite::{
    consistent_endpoints, join, normalize, normalize_rightmost, normalize_with, reducible_redexes, step_at,
    EndpointError, DEFAULT_FUEL,
};
use cfc_core::typecheck::{check_coercion, infer_expr};
use cfc_core::unify::{apart, apply, unify, TySubst};
use cfc_core::{Context, Expr, Name, Prop, Signature, Type};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::enumerate::{ground_substitutions, oracle_types, ORACLE_VARS};
use crate::gen::Gen;
use crate::report::{Failure, Report};
use crate::shrink::{coercion_candidates, expr_candidates, shrink, type_candidates};
use crate::world::{gen_world, mix, rng_for, Palette, World};

/// Evaluation fuel per expression.
pub const EVAL_FUEL: usize = 2_000;
/// Node budget for the argument tuples of the totality link.
pub const TUPLE_SIZE: usize = 4;
const SHOWN: usize = 1_500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Preservation,
    Progress,
    Measure,
    LocalConfluence,
    Strategy,
    Consistency,
    ApartStability,
    TotalityLink,
    UnifyOracle,
    Roundtrip,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Preservation,
        Suite::Progress,
        Suite::Measure,
        Suite::LocalConfluence,
        Suite::Strategy,
        Suite::Consistency,
        Suite::ApartStability,
        Suite::TotalityLink,
        Suite::UnifyOracle,
        Suite::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Preservation => "preservation",
            Suite::Progress => "progress",
            Suite::Measure => "measure",
            Suite::LocalConfluence => "local_confluence",
            Suite::Strategy => "strategy",
            Suite::Consistency => "consistency",
            Suite::ApartStability => "apart_stability",
            Suite::TotalityLink => "totality_link",
            Suite::UnifyOracle => "unify_oracle",
            Suite::Roundtrip => "roundtrip",
        }
    }

    fn salt(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s || x.name().replace('_', "-") == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite `{s}` (expected one of: {})", names.join(", "))
        })
    }
}

/// Result of one case before merging.
#[derive(Default)]
struct Case {
    checks: usize,
    counters: Vec<(&'static str, usize)>,
    failure: Option<(String, String, String)>,
}

impl Case {
    fn count(&mut self, key: &'static str, n: usize) {
        self.counters.push((key, n));
    }

    fn fail(&mut self, message: String, input: String, minimized: String) {
        if self.failure.is_none() {
            self.failure = Some((message, clip(input), clip(minimized)));
        }
    }
}

fn clip(mut s: String) -> String {
    if s.len() > SHOWN {
        let mut cut = SHOWN;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str(" ...");
    }
    s
}

/// Runs `cases` cases of `suite` against one world.
pub fn run_suite(suite: Suite, world: &World, cases: usize) -> Report {
    let mut report = Report::new(suite);
    report.worlds = 1;
    if suite == Suite::UnifyOracle {
        let mut r = unify_oracle();
        r.worlds = 1;
        return r;
    }
    if world.is_empty() {
        return report;
    }
    let cases = if suite == Suite::TotalityLink { 1 } else { cases };
    let results: Vec<Case> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(world.seed ^ suite.salt().wrapping_mul(0x1000_0000_01b3), i as u64);
            run_case(suite, world, &mut rng)
        })
        .collect();
    for (i, c) in results.into_iter().enumerate() {
        report.cases += 1;
        report.checks += c.checks;
        for (k, n) in c.counters {
            report.bump(k, n);
        }
        if let Some((message, input, minimized)) = c.failure {
            report.failures.push(Failure { world: world.seed, case: i, message, input, minimized });
        }
    }
    report
}

/// How a fuzzing run spreads over generated worlds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    /// Total number of cases, split evenly across worlds.
    pub cases: usize,
    pub worlds: usize,
    pub size: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { seed: 0, cases: 1_000, worlds: 10, size: 6 }
    }
}

/// Runs `suite` over `config.worlds` worlds seeded from `config.seed`.
pub fn fuzz(suite: Suite, config: &FuzzConfig) -> Report {
    if suite == Suite::UnifyOracle {
        return unify_oracle();
    }
    let worlds = config.worlds.max(1);
    let per_world = config.cases.div_ceil(worlds);
    let reports: Vec<Report> = (0..worlds)
        .into_par_iter()
        .map(|w| {
            let world = gen_world(mix(config.seed, w as u64), config.size);
            run_suite(suite, &world, per_world)
        })
        .collect();
    let mut out = Report::new(suite);
    for r in reports {
        out.merge(r);
    }
    out
}

fn run_case(suite: Suite, world: &World, rng: &mut ChaCha8Rng) -> Case {
    match suite {
        Suite::Preservation => preservation(world, rng),
        Suite::Progress => progress(world, rng),
        Suite::Measure => measure(world, rng),
        Suite::LocalConfluence => local_confluence(world, rng),
        Suite::Strategy => strategy(world, rng),
        Suite::Consistency => consistency(world, rng),
        Suite::ApartStability => apart_stability(world, rng),
        Suite::TotalityLink => totality_link(world),
        Suite::Roundtrip => roundtrip(world, rng),
        Suite::UnifyOracle => unreachable!("handled without a world"),
    }
}

fn well_typed(sig: &Signature, e: &Expr) -> Option<Type> {
    infer_expr(sig, &Context::new(), e).ok()
}

/// The first step whose result does not have the original type.
fn preservation_violation(sig: &Signature, e: &Expr) -> Option<String> {
    let t = well_typed(sig, e)?;
    let run = eval(sig, e, EVAL_FUEL);
    for (i, (rule, next)) in run.trace.iter().enumerate() {
        match infer_expr(sig, &Context::new(), next) {
            Ok(u) if alpha_eq_ty(&t, &u) => {}
            Ok(u) => return Some(format!("step {} ({rule}) changed the type from `{t}` to `{u}`", i + 1)),
            Err(err) => return Some(format!("step {} ({rule}) is ill-typed: {err}", i + 1)),
        }
    }
    None
}

fn generated_expr(world: &World, rng: &mut ChaCha8Rng, case: &mut Case) -> Option<(Expr, Type)> {
    let (e, t) = Gen::new(world, rng).expr();
    match infer_expr(&world.sig, &Context::new(), &e) {
        Ok(u) if alpha_eq_ty(&t, &u) => Some((e, t)),
        Ok(u) => {
            case.fail(format!("generator: expected type `{t}`, checker says `{u}`"), e.to_string(), e.to_string());
            None
        }
        Err(err) => {
            case.fail(format!("generator: ill-typed expression: {err}"), e.to_string(), e.to_string());
            None
        }
    }
}

fn preservation(world: &World, rng: &mut ChaCha8Rng) -> Case {
    let mut case = Case::default();
    let Some((e, _)) = generated_expr(world, rng, &mut case) else { return case };
    case.count("expressions", 1);
    let steps = eval(&world.sig, &e, EVAL_FUEL).steps();
    case.count("steps", steps);
    case.checks = steps.max(1);
    if let Some(msg) = preservation_violation(&world.sig, &e) {
        let fails = |x: &Expr| preservation_violation(&world.sig, x).is_some();
        let m = shrink(e.clone(), Expr::size, expr_candidates, fails);
        case.fail(msg, e.to_string(), m.to_string());
    }
    case
}

fn stuck(sig: &Signature, e: &Expr) -> Option<String> {
    well_typed(sig, e)?;
    match eval(sig, e, EVAL_FUEL).outcome {
        Outcome::Stuck { expr, reason } => Some(format!("stuck at `{expr}`: {reason}")),
        _ => None,
    }
}

fn progress(world: &World, rng: &mut ChaCha8Rng) -> Case {
    let mut case = Case::default();
    let Some((e, _)) = generated_expr(world, rng, &mut case) else { return case };
    case.count("expressions", 1);
    case.checks = 1;
    match eval(&world.sig, &e, EVAL_FUEL).outcome {
        Outcome::Value(_) => case.count("values", 1),
        Outcome::CoercedValue(_) => case.count("coerced_values", 1),
        Outcome::FuelExhausted(_) => case.count("fuel_exhausted", 1),
        Outcome::Stuck { expr, reason } => {
            let m = shrink(e.clone(), Expr::size, expr_candidates, |x| stuck(&world.sig, x).is_some());
            case.fail(format!("stuck at `{expr}`: {reason}"), e.to_string(), m.to_string());
        }
    }
    case
}

/// Steps at random redexes until none reduces; each step must remove
/// exactly one family application.
fn measure_violation(sig: &Signature, t: &Type, rng: &mut ChaCha8Rng, steps: &mut usize) -> Option<String> {
    let start = t.fam_count();
    let mut cur = t.clone();
    let mut taken = 0;
    loop {
        let reds = reducible_redexes(sig, &cur);
        let Some(p) = reds.choose(rng) else { break };
        let Some(s) = step_at(sig, &cur, p) else { return Some(format!("redex at {p:?} of `{cur}` does not step")) };
        taken += 1;
        *steps += 1;
        if s.ty.fam_count() + 1 != cur.fam_count() {
            return Some(format!(
                "step `{cur}` ~> `{}` changes the family count from {} to {}",
                s.ty,
                cur.fam_count(),
                s.ty.fam_count()
            ));
        }
        cur = s.ty;
    }
    (taken > start).then(|| format!("{taken} steps from a type with {start} family applications"))
}

fn measure(world: &World, rng: &mut ChaCha8Rng) -> Case {
    let mut case = Case::default();
    let t = Gen::new(world, rng).redex_rich();
    let mut steps = 0;
    let seed: u64 = rng.gen();
    if let Some(msg) =
        measure_violation(&world.sig, &t, &mut ChaCha8Rng::clone(&rand::SeedableRng::seed_from_u64(seed)), &mut steps)
    {
        let fails = |x: &Type| {
            let mut r: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
            measure_violation(&world.sig, x, &mut r, &mut 0).is_some()
        };
        let m = shrink(t.clone(), Type::size, type_candidates, fails);
        case.fail(msg, t.to_string(), m.to_string());
    }
    case.count("types", 1);
    case.count("steps", steps);
    case.checks = steps;
    case
}

/// Distinct one-step reducts of `t` that fail to join.
fn peak_violation(sig: &Signature, t: &Type, peaks: &mut usize) -> Option<String> {
    let reds = reducible_redexes(sig, t);
    for i in 0..reds.len() {
        for j in i + 1..reds.len() {
            let (Some(a), Some(b)) = (step_at(sig, t, &reds[i]), step_at(sig, t, &reds[j])) else {
                return Some(format!("a reducible redex of `{t}` does not step"));
            };
            *peaks += 1;
            if join(sig, &a.ty, &b.ty).is_none() {
                return Some(format!("peak `{}` <~ `{t}` ~> `{}` does not join", a.ty, b.ty));
            }
        }
    }
    None
}

fn local_confluence(world: &World, rng: &mut ChaCha8Rng) -> Case {
    let mut case = Case::default();
    let t = Gen::new(world, rng).redex_rich();
    let mut peaks = 0;
    if let Some(msg) = peak_violation(&world.sig, &t, &mut peaks) {
        let m = shrink(t.clone(), Type::size, type_candidates, |x| peak_violation(&world.sig, x, &mut 0).is_some());
        case.fail(msg, t.to_string(), m.to_string());
    }
    case.count("types", 1);
    case.count("peaks", peaks);
    case.checks = peaks;
    case
}

/// Normal forms under leftmost-innermost, rightmost and seeded-random
/// redex selection must agree.
fn strategy_violation(sig: &Signature, t: &Type, seed: u64) -> Option<String> {
    let mut r: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
    let left = normalize(sig, t);
    let right = normalize_rightmost(sig, t);
    let random = normalize_with(sig, t, DEFAULT_FUEL, |ps| r.gen_range(0..ps.len()));
    match (left, right, random) {
        (Ok(a), Ok(b), Ok(c)) => {
            if !alpha_eq_ty(&a.ty, &b.ty) || !alpha_eq_ty(&a.ty, &c.ty) {
                Some(format!("normal forms differ: leftmost `{}`, rightmost `{}`, random `{}`", a.ty, b.ty, c.ty))
            } else {
                None
            }
        }
        _ => Some(format!("normalizing `{t}` ran out of fuel")),
    }
}

fn strategy(world: &World, rng: &mut ChaCha8Rng) -> Case {
    let mut case = Case::default();
    let t = Gen::new(world, rng).pretype();
    let seed: u64 = rng.gen();
    if let Some(msg) = strategy_violation(&world.sig, &t, seed) {
        let m = shrink(t.clone(), Type::size, type_candidates, |x| strategy_violation(&world.sig, x, seed).is_some());
        case.fail(msg, t.to_string(), m.to_string());
    }
    case.count("types", 1);
    if t.fam_count() > 0 {
        case.count("types_with_families", 1);
    }
    case.checks = 1;
    case
}

fn consistency(world: &World, rng: &mut ChaCha8Rng) -> Case {
    let mut case = Case::default();
    let g = Gen::new(world, rng).coercion();
    case.checks = 1;
    case.count("coercions", 1);
    match consistent_endpoints(&world.sig, &Context::new(), &g) {
        Ok(p) => {
            if p.lhs.fam_count() == 0 && p.rhs.fam_count() == 0 {
                case.count("proper_endpoints", 1);
            }
        }
        Err(EndpointError::IllTyped(err)) => {
            case.fail(format!("generator: ill-typed coercion: {err}"), g.to_string(), g.to_string());
        }
        Err(err) => {
            let fails = |x: &cfc_core::Coercion| {
                matches!(
                    consistent_endpoints(&world.sig, &Context::new(), x),
                    Err(EndpointError::NoJoin { .. } | EndpointError::ProperMismatch { .. })
                )
            };
            let m = shrink(g.clone(), cfc_core::Coercion::size, coercion_candidates, fails);
            case.fail(err.to_string(), g.to_string(), m.to_string());
        }
    }
    case
}

fn pattern(pal: &Palette, rng: &mut ChaCha8Rng, vars: &[&str], depth: usize) -> Type {
    if depth <= 1 || rng.gen_bool(0.35) {
        if rng.gen_bool(0.5) {
            return Type::var(vars[rng.gen_range(0..vars.len())]);
        }
        let n: Vec<&(Name, usize)> = pal.cons.iter().filter(|(_, k)| *k == 0).collect();
        return Type::Con(n[rng.gen_range(0..n.len())].0.clone(), vec![]);
    }
    if rng.gen_bool(0.1) {
        return Type::arrow(pattern(pal, rng, vars, depth - 1), pattern(pal, rng, vars, depth - 1));
    }
    let (h, k) = pal.cons[rng.gen_range(0..pal.cons.len())].clone();
    Type::Con(h, (0..k).map(|_| pattern(pal, rng, vars, depth - 1)).collect())
}

/// Replaces one random subterm of `t` by `new`.
fn mutate(t: &Type, rng: &mut ChaCha8Rng, new: Type) -> Type {
    let paths = t.paths();
    let p = &paths[rng.gen_range(0..paths.len())];
    t.replace_at(p, new).unwrap_or_else(|| t.clone())
}

fn apart_violation(sigma: &[Type], tau: &[Type], theta: &TySubst) -> bool {
    let moved: Vec<Type> = tau.iter().map(|t| apply(theta, t)).collect();
    apart(sigma, tau) && !apart(sigma, &moved)
}

fn apart_stability(world: &World, rng: &mut ChaCha8Rng) -> Case {
    let mut case = Case::default();
    let pal = world.palette();
    let n = rng.gen_range(1..=2);
    let pvars = ["p0", "p1", "p2"];
    let tvars = ["t0", "t1", "t2"];
    let sigma: Vec<Type> = (0..n).map(|_| pattern(&pal, rng, &pvars, 4)).collect();
    let tau: Vec<Type> = if rng.gen_bool(0.6) {
        // A near miss: the renamed pattern with one subterm changed.
        sigma
            .iter()
            .map(|s| {
                let renamed = rename_vars(s, &pvars, &tvars);
                if rng.gen_bool(0.6) {
                    let new = pattern(&pal, rng, &tvars, 2);
                    mutate(&renamed, rng, new)
                } else {
                    renamed
                }
            })
            .collect()
    } else {
        (0..n).map(|_| pattern(&pal, rng, &tvars, 4)).collect()
    };
    let mut theta = TySubst::new();
    for v in tvars {
        if rng.gen_bool(0.7) {
            theta.insert(Name::new(v), pattern(&pal, rng, &["w0", "w1"], 3));
        }
    }
    case.checks = 1;
    if !apart(&sigma, &tau) {
        case.count("not_apart", 1);
        return case;
    }
    case.count("triples", 1);
    if apart_violation(&sigma, &tau, &theta) {
        let show = |s: &[Type], t: &[Type]| {
            let j = |xs: &[Type]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            format!("sigma = [{}], tau = [{}], theta = {:?}", j(s), j(t), theta)
        };
        case.fail(
            "apart(sigma, tau) holds but apart(sigma, tau theta) fails".into(),
            show(&sigma, &tau),
            show(&sigma, &tau),
        );
    }
    case
}

fn rename_vars(t: &Type, from: &[&str], to: &[&str]) -> Type {
    let s: TySubst = from.iter().zip(to).map(|(a, b)| (Name::new(a), Type::var(b))).collect();
    apply(&s, t)
}

/// Closed family-free types with at most `max` nodes over the world's
/// constructors, arrows and one quantifier shape.
pub fn closed_types_up_to(pal: &Palette, max: usize) -> Vec<Vec<Type>> {
    let mut by: Vec<Vec<Type>> = vec![vec![]; max + 1];
    for n in 1..=max {
        let mut here = Vec::new();
        for (h, k) in &pal.cons {
            for args in tuples_exact(&by, *k, n - 1) {
                here.push(Type::Con(h.clone(), args));
            }
        }
        for args in tuples_exact(&by, 2, n.saturating_sub(1)) {
            if n >= 3 {
                here.push(Type::arrow(args[0].clone(), args[1].clone()));
            }
        }
        // forall u. u -> t has 3 + |t| nodes
        if n >= 4 {
            for t in &by[n - 3] {
                here.push(Type::forall("u", Type::arrow(Type::var("u"), t.clone())));
            }
        }
        by[n] = here;
    }
    by
}

/// Tuples of `k` types from `by` whose sizes add up to exactly `n`.
fn tuples_exact(by: &[Vec<Type>], k: usize, n: usize) -> Vec<Vec<Type>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n {
        if first >= by.len() {
            break;
        }
        for rest in tuples_exact(by, k - 1, n - first) {
            for t in &by[first] {
                let mut v = vec![t.clone()];
                v.extend(rest.iter().cloned());
                out.push(v);
            }
        }
    }
    out
}

/// Argument tuples of arity `k` with at most `max` nodes in total.
pub fn arg_tuples(pal: &Palette, k: usize, max: usize) -> Vec<Vec<Type>> {
    let by = closed_types_up_to(pal, max);
    (0..=max).flat_map(|n| tuples_exact(&by, k, n)).collect()
}

fn totality_link(world: &World) -> Case {
    let mut case = Case::default();
    let pal = world.palette();
    for (f, d) in world.sig.families.iter().filter(|(_, d)| d.total) {
        case.count("families", 1);
        for args in arg_tuples(&pal, d.arity, TUPLE_SIZE) {
            case.checks += 1;
            case.count("tuples", 1);
            let app = Type::Fam(f.clone(), args.clone());
            let res = match total_eval(&world.sig, f, &args) {
                Ok(r) => r,
                Err(e) => {
                    case.fail(format!("total_eval failed: {e}"), app.to_string(), app.to_string());
                    continue;
                }
            };
            let want = Prop::new(app.clone(), res.witness.clone());
            match check_coercion(&world.sig, &Context::new(), &res.proof) {
                Ok(p) if alpha_eq_prop(&p, &want) => {}
                Ok(p) => {
                    case.fail(format!("proof proves `{p}`, expected `{want}`"), app.to_string(), res.proof.to_string())
                }
                Err(e) => case.fail(format!("proof does not check: {e}"), app.to_string(), res.proof.to_string()),
            }
            if !res.witness.is_family_free() || !res.witness.free_vars().is_empty() {
                case.fail(
                    format!("witness `{}` is not a closed proper type", res.witness),
                    app.to_string(),
                    app.to_string(),
                );
            }
        }
    }
    case
}

/// A program built from the world: its declarations, some of its terms and
/// a few fresh ones. Order is kept, since names must be declared before use.
pub fn gen_program(world: &World, rng: &mut ChaCha8Rng) -> Program {
    let mut items: Vec<_> = world
        .program
        .items
        .iter()
        .filter(|it| !matches!(it.decl, Decl::Term { .. }) || rng.gen_bool(0.5))
        .cloned()
        .collect();
    let extra = rng.gen_range(1..=4);
    let mut g = Gen::new(world, rng);
    for i in 0..extra {
        let (e, _) = g.expr();
        items.push(cfc_core::program::Item {
            decl: Decl::Term { name: Name::from(format!("fresh{i}")), body: e },
            span: Default::default(),
        });
    }
    Program { items }
}

/// Why `parse (print p)` is not `p`, if it is not.
pub fn roundtrip_violation(p: &Program) -> Option<String> {
    let printed = p.to_string();
    match parse_program(&printed) {
        Err(e) => Some(format!("printed program does not parse: {e}")),
        Ok(q) if alpha_eq_program(p, &q) => None,
        Ok(q) => {
            let bad = p.decls().zip(q.decls()).find(|(a, b)| a != b);
            Some(match bad {
                Some((a, b)) => format!("declaration changed: `{a}` became `{b}`"),
                None => format!("declaration count changed from {} to {}", p.items.len(), q.items.len()),
            })
        }
    }
}

/// The program without its last item, and without each of its terms.
/// Both keep every name declared before its use.
fn program_candidates(p: &Program) -> Vec<Program> {
    let mut out = Vec::new();
    if !p.items.is_empty() {
        out.push(Program { items: p.items[..p.items.len() - 1].to_vec() });
    }
    for (i, it) in p.items.iter().enumerate() {
        if matches!(it.decl, Decl::Term { .. }) {
            let mut items = p.items.clone();
            items.remove(i);
            out.push(Program { items });
        }
    }
    out
}

fn roundtrip(world: &World, rng: &mut ChaCha8Rng) -> Case {
    let mut case = Case::default();
    let p = gen_program(world, rng);
    case.checks = 1;
    case.count("programs", 1);
    case.count("declarations", p.items.len());
    if let Some(msg) = roundtrip_violation(&p) {
        let fails = |q: &Program| roundtrip_violation(q).is_some();
        let m = shrink(p.clone(), |q| q.items.len(), program_candidates, fails);
        case.fail(msg, p.to_string(), m.to_string());
    }
    case
}

/// Compares `unify` with brute force over every pair of types of at most
/// three levels built from one constant, one binary constructor and two
/// variables. Ground images of at most three levels suffice there.
pub fn unify_oracle() -> Report {
    let types = oracle_types(3, &ORACLE_VARS);
    let substs = ground_substitutions(3, &ORACLE_VARS);
    let rows: Vec<(usize, usize, Vec<Failure>)> = types
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut fails = Vec::new();
            let mut unifiable = 0;
            for (j, t) in types.iter().enumerate() {
                let brute = substs.iter().any(|th| apply(th, s) == apply(th, t));
                let case = i * types.len() + j;
                let mut fail = |m: String| {
                    fails.push(Failure {
                        world: 0,
                        case,
                        message: m,
                        input: format!("{s} =?= {t}"),
                        minimized: format!("{s} =?= {t}"),
                    })
                };
                match unify(std::slice::from_ref(s), std::slice::from_ref(t)) {
                    Ok(theta) => {
                        unifiable += 1;
                        if !brute {
                            fail(format!("unify succeeds with {theta:?} but no ground unifier exists"));
                        }
                        if apply(&theta, s) != apply(&theta, t) {
                            fail(format!("{theta:?} is not a unifier"));
                        }
                        if theta.values().any(|u| apply(&theta, u) != *u) {
                            fail(format!("{theta:?} is not idempotent"));
                        }
                    }
                    Err(e) => {
                        if brute {
                            fail(format!("unify fails ({e}) but a ground unifier exists"));
                        }
                    }
                }
            }
            (types.len(), unifiable, fails)
        })
        .collect();
    let mut report = Report::new(Suite::UnifyOracle);
    for (n, u, f) in rows {
        report.cases += n;
        report.checks += n;
        report.bump("pairs", n);
        report.bump("unifiable", u);
        report.failures.extend(f);
    }
    report.bump("substitutions", substs.len());
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert_eq!("apart-stability".parse::<Suite>(), Ok(Suite::ApartStability));
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fuzzing_is_deterministic() {
        let cfg = FuzzConfig { seed: 7, cases: 60, worlds: 3, size: 5 };
        for s in [Suite::Preservation, Suite::Strategy, Suite::Roundtrip] {
            assert_eq!(fuzz(s, &cfg), fuzz(s, &cfg));
        }
    }

    #[test]
    fn empty_world_has_no_cases() {
        let w = gen_world(3, 0);
        let r = run_suite(Suite::Progress, &w, 10);
        assert_eq!(r.cases, 0);
        assert!(r.passed());
    }

    #[test]
    fn argument_tuples_respect_the_node_budget() {
        let pal = Palette { cons: vec![(Name::new("A"), 0), (Name::new("P"), 2)] };
        let ts = arg_tuples(&pal, 2, 4);
        assert!(ts.iter().all(|t| t.iter().map(Type::size).sum::<usize>() <= 4));
        // (A, A), (A, P A A), (P A A, A), (A, A -> A), (A -> A, A)
        assert_eq!(ts.len(), 5);
    }

    #[test]
    fn shared_variables_break_apartness_stability() {
        // sigma = (x, B) and tau = (A, x) are apart, since x cannot be both
        // A and B. Substituting into tau alone gives (A, B), which unifies
        // with sigma. Drawing disjoint variables avoids this.
        let a = Type::con("A", vec![]);
        let b = Type::con("B", vec![]);
        let sigma = [Type::var("x"), b.clone()];
        let tau = [a.clone(), Type::var("x")];
        let theta: TySubst = [(Name::new("x"), b)].into_iter().collect();
        assert!(apart_violation(&sigma, &tau, &theta));
        let tau2 = [a, Type::var("y")];
        assert!(!apart(&sigma, &tau2));
    }
}
