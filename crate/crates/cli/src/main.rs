mod out;

use std::io::Read;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use cfc_core::alpha::{alpha_eq_prop, alpha_eq_ty};
use cfc_core::eval::{eval, Outcome};
use cfc_core::parser::{parse_program, parse_stype, parse_type};
use cfc_core::program::{load, Loaded};
use cfc_core::rewrite::{normalize, DEFAULT_FUEL};
use cfc_core::surface::{infer_constraints, st_check_type};
use cfc_core::typecheck::{check_coercion, check_pretype, infer_expr};
use cfc_core::{Context, Prop};
use cfc_harness::{fuzz, FuzzConfig, Report, Suite};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use out::{Exit, Out};

/// Checker, evaluator and rewriter for cfc programs.
#[derive(Parser, Debug)]
#[command(name = "cfc", version)]
struct Cli {
    /// Print one JSON object instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the signature and type every term.
    Check { file: String },
    /// Evaluate a term.
    Eval {
        file: String,
        #[arg(long = "main", value_name = "NAME", default_value = "main")]
        main: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Print every step with the rule used.
        #[arg(long)]
        trace: bool,
    },
    /// Rewrite a type to normal form.
    Normalize {
        file: String,
        #[arg(long = "type", value_name = "TYPE")]
        ty: String,
    },
    /// Infer the class constraints a surface type needs.
    Infer {
        file: String,
        #[arg(long = "type", value_name = "TYPE")]
        ty: String,
    },
    /// Print the elaborated program.
    Elaborate { file: String },
    /// Run randomized property suites.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000)]
        cases: usize,
        /// One suite; all of them when omitted.
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 10)]
        worlds: usize,
        #[arg(long, default_value_t = 6)]
        size: usize,
    },
}

fn read_source(file: &str) -> std::io::Result<String> {
    if file == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(file)
    }
}

fn label(file: &str) -> &str {
    if file == "-" {
        "<stdin>"
    } else {
        file
    }
}

/// Reads, parses and loads a file, reporting problems. `Err` carries the
/// exit code to stop with.
fn open(out: &mut Out, file: &str) -> Result<Loaded, Exit> {
    let src = match read_source(file) {
        Ok(s) => s,
        Err(e) => {
            out.error(None, "IoError", &e.to_string());
            return Err(Exit::Semantic);
        }
    };
    let program = match parse_program(&src) {
        Ok(p) => p,
        Err(e) => {
            out.error(Some(e.span), "ParseError", &e.message);
            return Err(Exit::Parse);
        }
    };
    Ok(load(&program))
}

fn open_ok(out: &mut Out, file: &str) -> Result<Loaded, Exit> {
    let l = open(out, file)?;
    if !l.ok() {
        report_diagnostics(out, &l);
        return Err(Exit::Semantic);
    }
    Ok(l)
}

fn report_diagnostics(out: &mut Out, l: &Loaded) {
    for d in &l.diagnostics {
        out.error(d.span, &d.code, &d.message);
    }
}

fn check(out: &mut Out, file: &str) -> Exit {
    let l = match open(out, file) {
        Ok(l) => l,
        Err(e) => return e,
    };
    report_diagnostics(out, &l);
    let terms: Vec<Value> =
        l.term_types.iter().map(|(n, t)| json!({ "name": n.to_string(), "type": t.to_string() })).collect();
    out.field("terms", Value::Array(terms));
    out.field("families", json!(l.sig.families.len()));
    out.field("axioms", json!(l.sig.axioms.len()));
    if !l.ok() {
        return Exit::Semantic;
    }
    for (n, t) in &l.term_types {
        out.line(format!("{n} : {t}"));
    }
    out.ok_line(&format!(
        "ok: {} families, {} axioms, {} terms",
        l.sig.families.len(),
        l.sig.axioms.len(),
        l.term_types.len()
    ));
    Exit::Ok
}

fn run_eval(out: &mut Out, file: &str, main: &str, fuel: usize, trace: bool) -> Exit {
    let l = match open_ok(out, file) {
        Ok(l) => l,
        Err(e) => return e,
    };
    let (Some((e, _)), Some(ty)) = (l.terms.get(main), l.term_types.get(main)) else {
        out.error(None, "UnknownTerm", &format!("no term named `{main}`"));
        return Exit::Semantic;
    };
    let run = eval(&l.sig, e, fuel);
    let mut steps = Vec::new();
    let mut exit = Exit::Ok;
    for (i, (rule, next)) in run.trace.iter().enumerate() {
        if trace {
            out.line(format!("{:>4}  {rule:<12} {next}", i + 1));
            steps.push(json!({ "rule": rule, "expr": next.to_string() }));
        }
        // A step that changes the type is a bug in the evaluator or checker.
        match infer_expr(&l.sig, &Context::new(), next) {
            Ok(t) if alpha_eq_ty(&t, ty) => {}
            Ok(t) => {
                out.error(None, "PreservationViolation", &format!("step {} ({rule}) changed the type to `{t}`", i + 1));
                exit = Exit::Invariant;
                break;
            }
            Err(err) => {
                out.error(None, "PreservationViolation", &format!("step {} ({rule}) is ill-typed: {err}", i + 1));
                exit = Exit::Invariant;
                break;
            }
        }
    }
    if trace {
        out.field("trace", Value::Array(steps));
    }
    out.field("type", json!(ty.to_string()));
    out.field("steps", json!(run.steps()));
    let (kind, shown) = match &run.outcome {
        Outcome::Value(v) => ("value", v.to_string()),
        Outcome::CoercedValue(v) => ("coerced_value", v.to_string()),
        Outcome::FuelExhausted(v) => {
            out.error(None, "FuelExhausted", &format!("no value after {} steps", run.steps()));
            exit = exit.max(Exit::Semantic);
            ("fuel_exhausted", v.to_string())
        }
        Outcome::Stuck { expr, reason } => {
            out.error(None, "ProgressViolation", &format!("well-typed term is stuck: {reason}"));
            exit = Exit::Invariant;
            ("stuck", expr.to_string())
        }
    };
    out.field("outcome", json!(kind));
    out.field("result", json!(shown));
    if matches!(run.outcome, Outcome::Value(_) | Outcome::CoercedValue(_)) {
        out.line(&shown);
    }
    exit
}

fn run_normalize(out: &mut Out, file: &str, src: &str) -> Exit {
    let l = match open_ok(out, file) {
        Ok(l) => l,
        Err(e) => return e,
    };
    let names = l.sig.families.keys().cloned().collect();
    out.set_file("<type>");
    let t = match parse_type(src, &names) {
        Ok(t) => t,
        Err(e) => {
            out.error(Some(e.span), "ParseError", &e.message);
            return Exit::Parse;
        }
    };
    let ctx = Context::with_tyvars(t.free_vars());
    if let Err(e) = check_pretype(&l.sig, &ctx, &t) {
        out.error(None, e.code(), &e.to_string());
        return Exit::Semantic;
    }
    let n = match normalize(&l.sig, &t) {
        Ok(n) => n,
        Err(e) => {
            out.error(
                None,
                "FuelExhausted",
                &format!("no normal form within {DEFAULT_FUEL} steps (reached `{}`)", e.reached),
            );
            return Exit::Semantic;
        }
    };
    // The proof must establish exactly `t ~ normal form`.
    let want = Prop::new(t.clone(), n.ty.clone());
    match check_coercion(&l.sig, &ctx, &n.proof) {
        Ok(p) if alpha_eq_prop(&p, &want) => {}
        Ok(p) => {
            out.error(None, "BadNormalizationProof", &format!("proof shows `{p}`, expected `{want}`"));
            return Exit::Invariant;
        }
        Err(e) => {
            out.error(None, "BadNormalizationProof", &e.to_string());
            return Exit::Invariant;
        }
    }
    out.line(n.ty.to_string());
    out.field("input", json!(t.to_string()));
    out.field("normal_form", json!(n.ty.to_string()));
    out.field("steps", json!(n.steps));
    out.field("proof", json!(n.proof.to_string()));
    out.field("stuck", json!(n.ty.fam_count() > 0));
    Exit::Ok
}

fn run_infer(out: &mut Out, file: &str, src: &str) -> Exit {
    let l = match open_ok(out, file) {
        Ok(l) => l,
        Err(e) => return e,
    };
    let env = &l.elaboration.env;
    out.set_file("<type>");
    let t = match parse_stype(src, &env.families.keys().cloned().collect()) {
        Ok(t) => t,
        Err(e) => {
            out.error(Some(e.span), "ParseError", &e.message);
            return Exit::Parse;
        }
    };
    let scope = t.free_vars();
    let preds = infer_constraints(env, &scope, &t);
    if let Err(errs) = st_check_type(env, &preds, &scope, &t) {
        for e in errs {
            out.error(None, e.code(), &e.to_string());
        }
        return Exit::Semantic;
    }
    let shown: Vec<String> = preds.iter().map(ToString::to_string).collect();
    if shown.is_empty() {
        out.line(t.to_string());
    } else {
        out.line(format!("{} => {t}", shown.join(", ")));
    }
    out.field("type", json!(t.to_string()));
    out.field("constraints", json!(shown));
    Exit::Ok
}

fn run_elaborate(out: &mut Out, file: &str) -> Exit {
    let l = match open(out, file) {
        Ok(l) => l,
        Err(e) => return e,
    };
    if !l.ok() {
        report_diagnostics(out, &l);
        return Exit::Semantic;
    }
    let e = &l.elaboration;
    let surface: Vec<String> = e.surface.iter().map(ToString::to_string).collect();
    let core: Vec<String> = e.core.iter().map(ToString::to_string).collect();
    out.line("-- surface");
    for s in &surface {
        out.line(s);
    }
    out.line("-- kernel");
    for s in &core {
        out.line(s);
    }
    let unsafe_totals: Vec<String> = e.unsafe_totals.iter().map(ToString::to_string).collect();
    if !unsafe_totals.is_empty() {
        out.line(format!("-- total by pragma only: {}", unsafe_totals.join(", ")));
    }
    out.field("surface", json!(surface));
    out.field("core", json!(core));
    out.field("unsafe_totals", json!(unsafe_totals));
    Exit::Ok
}

fn report_json(r: &Report) -> Value {
    let failures: Vec<Value> = r
        .failures
        .iter()
        .map(|f| {
            json!({
                "world": f.world,
                "case": f.case,
                "message": f.message,
                "input": f.input,
                "minimized": f.minimized,
            })
        })
        .collect();
    json!({
        "suite": r.suite.name(),
        "worlds": r.worlds,
        "cases": r.cases,
        "checks": r.checks,
        "counters": r.counters,
        "failures": failures,
    })
}

fn run_fuzz(out: &mut Out, config: FuzzConfig, suite: Option<Suite>) -> Exit {
    let suites: Vec<Suite> = match suite {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let mut reports = Vec::new();
    let mut exit = Exit::Ok;
    for s in suites {
        let r = fuzz(s, &config);
        if !out.json() {
            print!("{r}");
        }
        for f in &r.failures {
            out.error(None, "PropertyViolation", &format!("{s}: {}", f.message));
            exit = Exit::Invariant;
        }
        reports.push(report_json(&r));
    }
    out.field("seed", json!(config.seed));
    out.field("reports", Value::Array(reports));
    exit
}

fn dispatch(cli: Cli) -> ExitCode {
    let (name, file) = match &cli.command {
        Command::Check { file } => ("check", label(file)),
        Command::Eval { file, .. } => ("eval", label(file)),
        Command::Normalize { file, .. } => ("normalize", label(file)),
        Command::Infer { file, .. } => ("infer", label(file)),
        Command::Elaborate { file } => ("elaborate", label(file)),
        Command::Fuzz { .. } => ("fuzz", "<fuzz>"),
    };
    let mut out = Out::new(cli.json, file);
    let run = catch_unwind(AssertUnwindSafe(|| match &cli.command {
        Command::Check { file } => check(&mut out, file),
        Command::Eval { file, main, fuel, trace } => run_eval(&mut out, file, main, *fuel, *trace),
        Command::Normalize { file, ty } => run_normalize(&mut out, file, ty),
        Command::Infer { file, ty } => run_infer(&mut out, file, ty),
        Command::Elaborate { file } => run_elaborate(&mut out, file),
        Command::Fuzz { seed, cases, suite, worlds, size } => {
            let config = FuzzConfig { seed: *seed, cases: *cases, worlds: *worlds, size: *size };
            run_fuzz(&mut out, config, *suite)
        }
    }));
    let exit = match run {
        Ok(e) => e,
        Err(_) => {
            let mut fresh = Out::new(cli.json, file);
            fresh.error(None, "InternalError", "internal invariant violated (panic)");
            return fresh.finish(name, Exit::Invariant);
        }
    };
    out.finish(name, exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Exit::Parse as u8) } else { ExitCode::SUCCESS };
        }
    };
    dispatch(cli)
}
