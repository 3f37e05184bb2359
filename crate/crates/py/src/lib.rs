//! Python bindings: load programs, normalize and unify types, evaluate
//! terms, infer surface constraints.

use std::collections::{BTreeMap, HashSet};

use cfc_core::alpha::alpha_eq_ty;
use cfc_core::eval::{eval, Outcome};
use cfc_core::lexer::ParseError as CoreParseError;
use cfc_core::parser::{parse_expr, parse_program, parse_stype, parse_type};
use cfc_core::program::{load, Loaded};
use cfc_core::rewrite::normalize;
use cfc_core::surface::{infer_constraints, st_check_type};
use cfc_core::typecheck::{check_pretype, infer_expr};
use cfc_core::unify::{unify as core_unify, TySubst};
use cfc_core::{Context, Name, Type as CoreType};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(cfc, ParseError, PyValueError, "Source text that does not parse.");
create_exception!(cfc, CheckError, PyValueError, "A program, type or term that is ill-formed.");

fn parse_err(e: CoreParseError) -> PyErr {
    ParseError::new_err((format!("{}: {}", e.span, e.message), e.span.line, e.span.col))
}

fn check_err(code: &str, message: impl std::fmt::Display) -> PyErr {
    CheckError::new_err((format!("[{code}] {message}"), code.to_string()))
}

/// A kernel type. Equality is alpha-equivalence.
#[pyclass(frozen, skip_from_py_object, module = "cfc")]
#[derive(Clone)]
pub struct Type {
    inner: CoreType,
}

#[pymethods]
impl Type {
    /// Parses a type; `families` names the identifiers that are families.
    #[new]
    #[pyo3(signature = (src, families = Vec::new()))]
    fn new(src: &str, families: Vec<String>) -> PyResult<Type> {
        let names: HashSet<Name> = families.iter().map(|f| Name::new(f)).collect();
        parse_type(src, &names).map(|inner| Type { inner }).map_err(parse_err)
    }

    /// Number of family applications.
    #[getter]
    fn fam_count(&self) -> usize {
        self.inner.fam_count()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    /// True when the type contains no family application.
    #[getter]
    fn is_proper(&self) -> bool {
        self.inner.is_family_free()
    }

    #[getter]
    fn free_vars(&self) -> Vec<String> {
        self.inner.free_vars().iter().map(ToString::to_string).collect()
    }

    fn __eq__(&self, other: &Type) -> bool {
        alpha_eq_ty(&self.inner, &other.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Type({:?})", self.inner.to_string())
    }
}

#[pyclass(frozen, get_all, module = "cfc")]
pub struct NormalForm {
    /// The normal form.
    ty: Type,
    steps: usize,
    /// A coercion proving `input ~ ty`, printed.
    proof: String,
    /// Whether family applications remain that no equation reduces.
    stuck: bool,
}

#[pymethods]
impl NormalForm {
    fn __repr__(&self) -> String {
        format!("NormalForm(ty={}, steps={}, stuck={})", self.ty.inner, self.steps, self.stuck)
    }
}

#[pyclass(frozen, get_all, module = "cfc")]
pub struct EvalResult {
    /// One of "value", "coerced_value", "stuck", "fuel_exhausted".
    outcome: String,
    result: String,
    steps: usize,
    /// `(rule, expression)` per step, when tracing.
    trace: Vec<(String, String)>,
}

#[pymethods]
impl EvalResult {
    fn __repr__(&self) -> String {
        format!("EvalResult(outcome={:?}, result={:?}, steps={})", self.outcome, self.result, self.steps)
    }
}

/// A parsed and checked program.
#[pyclass(frozen, module = "cfc")]
pub struct Program {
    loaded: Loaded,
}

impl Program {
    fn families(&self) -> HashSet<Name> {
        self.loaded.sig.families.keys().cloned().collect()
    }

    fn require_ok(&self) -> PyResult<()> {
        match self.loaded.diagnostics.first() {
            None => Ok(()),
            Some(d) => Err(check_err(&d.code, d)),
        }
    }
}

#[pymethods]
impl Program {
    /// Parses and checks source text. Raises `ParseError`; check problems
    /// are listed in `diagnostics`.
    #[new]
    fn new(src: &str) -> PyResult<Program> {
        let p = parse_program(src).map_err(parse_err)?;
        Ok(Program { loaded: load(&p) })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Program> {
        let src = std::fs::read_to_string(path).map_err(|e| pyo3::exceptions::PyOSError::new_err(e.to_string()))?;
        Program::new(&src)
    }

    #[getter]
    fn ok(&self) -> bool {
        self.loaded.ok()
    }

    /// `(code, message, line, column)` per problem; line and column are 0
    /// when unknown.
    #[getter]
    fn diagnostics(&self) -> Vec<(String, String, usize, usize)> {
        self.loaded
            .diagnostics
            .iter()
            .map(|d| {
                let (l, c) = d.span.map(|s| (s.line, s.col)).unwrap_or((0, 0));
                (d.code.clone(), d.message.clone(), l, c)
            })
            .collect()
    }

    /// Term names mapped to their types.
    #[getter]
    fn terms(&self) -> BTreeMap<String, String> {
        self.loaded.term_types.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect()
    }

    #[getter]
    fn family_names(&self) -> Vec<String> {
        self.loaded.sig.families.keys().map(ToString::to_string).collect()
    }

    /// Parses a type in this program's scope.
    fn parse_type(&self, src: &str) -> PyResult<Type> {
        parse_type(src, &self.families()).map(|inner| Type { inner }).map_err(parse_err)
    }

    /// Rewrites a type (a `Type` or source text) to normal form.
    fn normalize(&self, ty: &Bound<'_, PyAny>) -> PyResult<NormalForm> {
        self.require_ok()?;
        let t = match ty.extract::<PyRef<'_, Type>>() {
            Ok(t) => t.inner.clone(),
            Err(_) => self.parse_type(&ty.extract::<String>()?)?.inner,
        };
        let ctx = Context::with_tyvars(t.free_vars());
        check_pretype(&self.loaded.sig, &ctx, &t).map_err(|e| check_err(e.code(), &e))?;
        let n = normalize(&self.loaded.sig, &t)
            .map_err(|e| check_err("FuelExhausted", format!("no normal form (reached `{}`)", e.reached)))?;
        let stuck = n.ty.fam_count() > 0;
        Ok(NormalForm { ty: Type { inner: n.ty }, steps: n.steps, proof: n.proof.to_string(), stuck })
    }

    /// The type of a closed expression.
    fn type_of(&self, expr: &str) -> PyResult<Type> {
        self.require_ok()?;
        let e = parse_expr(expr, &self.families()).map_err(parse_err)?;
        infer_expr(&self.loaded.sig, &Context::new(), &e)
            .map(|inner| Type { inner })
            .map_err(|e| check_err(e.code(), &e))
    }

    /// Evaluates a named term.
    #[pyo3(signature = (name = "main", fuel = 10_000, trace = false))]
    fn eval(&self, name: &str, fuel: usize, trace: bool) -> PyResult<EvalResult> {
        self.require_ok()?;
        let Some((e, _)) = self.loaded.terms.get(name) else {
            return Err(check_err("UnknownTerm", format!("no term named `{name}`")));
        };
        let run = eval(&self.loaded.sig, e, fuel);
        let (outcome, result) = match &run.outcome {
            Outcome::Value(v) => ("value", v.to_string()),
            Outcome::CoercedValue(v) => ("coerced_value", v.to_string()),
            Outcome::Stuck { expr, .. } => ("stuck", expr.to_string()),
            Outcome::FuelExhausted(v) => ("fuel_exhausted", v.to_string()),
        };
        let steps = run.steps();
        let trace =
            if trace { run.trace.into_iter().map(|(r, e)| (r.to_string(), e.to_string())).collect() } else { vec![] };
        Ok(EvalResult { outcome: outcome.into(), result, steps, trace })
    }

    /// The class constraints a surface type needs, as printed predicates.
    fn infer(&self, stype: &str) -> PyResult<Vec<String>> {
        self.require_ok()?;
        let env = &self.loaded.elaboration.env;
        let t = parse_stype(stype, &env.families.keys().cloned().collect()).map_err(parse_err)?;
        let scope = t.free_vars();
        let preds = infer_constraints(env, &scope, &t);
        if let Err(errs) = st_check_type(env, &preds, &scope, &t) {
            let e = &errs[0];
            return Err(check_err(e.code(), e));
        }
        Ok(preds.iter().map(ToString::to_string).collect())
    }

    /// The elaborated surface and kernel declarations, printed.
    fn elaborate(&self) -> PyResult<(Vec<String>, Vec<String>)> {
        self.require_ok()?;
        let e = &self.loaded.elaboration;
        Ok((e.surface.iter().map(ToString::to_string).collect(), e.core.iter().map(ToString::to_string).collect()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Program(families={}, axioms={}, terms={}, ok={})",
            self.loaded.sig.families.len(),
            self.loaded.sig.axioms.len(),
            self.loaded.terms.len(),
            self.loaded.ok()
        )
    }
}

/// A most general unifier of two types, or `None` when they are apart.
#[pyfunction]
fn unify(a: &Type, b: &Type) -> Option<BTreeMap<String, Type>> {
    core_unify(std::slice::from_ref(&a.inner), std::slice::from_ref(&b.inner))
        .ok()
        .map(|theta: TySubst| theta.into_iter().map(|(k, v)| (k.to_string(), Type { inner: v })).collect())
}

#[pyfunction]
fn alpha_eq(a: &Type, b: &Type) -> bool {
    alpha_eq_ty(&a.inner, &b.inner)
}

#[pymodule]
fn cfc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Type>()?;
    m.add_class::<Program>()?;
    m.add_class::<NormalForm>()?;
    m.add_class::<EvalResult>()?;
    m.add_function(wrap_pyfunction!(unify, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_eq, m)?)?;
    m.add("ParseError", m.py().get_type::<ParseError>())?;
    m.add("CheckError", m.py().get_type::<CheckError>())?;
    Ok(())
}
