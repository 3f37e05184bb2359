//! A conservative totality checker for closed families: the equations must
//! cover every constructor combination of the declared parameter kinds, and
//! every self-call must shrink one fixed argument structurally.

use std::fmt;

use super::env::{Guard, SurfaceEnv};
use super::syntax::{SEquation, SType};
use crate::name::Name;

/// The kind of a family parameter, as far as coverage is concerned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    /// A declared datatype: its constructors are the whole universe.
    Data(Name),
    /// Any type at all; only a variable pattern covers it.
    Open,
}

/// A description of arguments that no equation covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Wild,
    /// Any type whose head is not among these constructors.
    Other(Vec<Name>),
    Ctor(Name, Vec<Witness>),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Wild => write!(f, "_"),
            Witness::Other(ex) if ex.is_empty() => write!(f, "_"),
            Witness::Other(ex) => {
                let names: Vec<&str> = ex.iter().map(|n| n.as_str()).collect();
                write!(f, "(anything but {})", names.join(", "))
            }
            Witness::Ctor(c, args) if args.is_empty() => write!(f, "{c}"),
            Witness::Ctor(c, args) => {
                write!(f, "({c}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotTotal {
    /// Open families can always be extended, so none is total.
    OpenFamily,
    Uncovered(Vec<Witness>),
    NonDecreasing {
        call: SType,
    },
    CallsPartial {
        family: Name,
    },
}

impl fmt::Display for NotTotal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotTotal::OpenFamily => write!(f, "it has no closed list of equations"),
            NotTotal::Uncovered(ws) => {
                let parts: Vec<String> = ws.iter().map(Witness::to_string).collect();
                write!(f, "no equation covers arguments `{}`", parts.join(" "))
            }
            NotTotal::NonDecreasing { call } => write!(f, "the recursive call `{call}` does not shrink an argument"),
            NotTotal::CallsPartial { family } => write!(f, "it calls the partial family `{family}`"),
        }
    }
}

#[derive(Clone, Debug)]
enum Pat {
    Wild,
    Ctor(Name, Vec<Pat>),
}

fn pattern(t: &SType) -> Pat {
    match t {
        SType::Var(_) => Pat::Wild,
        SType::Con(h, args) => Pat::Ctor(h.clone(), args.iter().map(pattern).collect()),
        SType::Arrow(a, b) => Pat::Ctor(Name::new("->"), vec![pattern(a), pattern(b)]),
        // Never matches a constructor universe, so it covers nothing.
        SType::Fam(..) | SType::Forall(..) | SType::Qual(..) => Pat::Ctor(Name::new("?"), vec![]),
    }
}

fn is_linear(lhs: &[SType]) -> bool {
    fn occ(t: &SType, out: &mut Vec<Name>) {
        match t {
            SType::Var(a) => out.push(a.clone()),
            SType::Con(_, args) | SType::Fam(_, args) => args.iter().for_each(|a| occ(a, out)),
            SType::Arrow(a, b) => {
                occ(a, out);
                occ(b, out);
            }
            SType::Forall(_, b) | SType::Qual(_, b) => occ(b, out),
        }
    }
    let mut vs = Vec::new();
    lhs.iter().for_each(|t| occ(t, &mut vs));
    let n = vs.len();
    vs.sort();
    vs.dedup();
    vs.len() == n
}

fn field_kind(env: &SurfaceEnv, t: &SType) -> Kind {
    match t {
        SType::Con(d, _) if env.data.contains_key(d) => Kind::Data(d.clone()),
        _ => Kind::Open,
    }
}

fn specialize(rows: &[Vec<Pat>], c: &str, n: usize) -> Vec<Vec<Pat>> {
    rows.iter()
        .filter_map(|r| match &r[0] {
            Pat::Wild => Some(std::iter::repeat_n(Pat::Wild, n).chain(r[1..].iter().cloned()).collect()),
            Pat::Ctor(h, ps) if &**h == c && ps.len() == n => {
                Some(ps.iter().cloned().chain(r[1..].iter().cloned()).collect())
            }
            Pat::Ctor(..) => None,
        })
        .collect()
}

fn default(rows: &[Vec<Pat>]) -> Vec<Vec<Pat>> {
    rows.iter().filter(|r| matches!(r[0], Pat::Wild)).map(|r| r[1..].to_vec()).collect()
}

// A witness vector for arguments of `kinds` that no row matches, if any.
fn uncovered(env: &SurfaceEnv, rows: &[Vec<Pat>], kinds: &[Kind]) -> Option<Vec<Witness>> {
    let Some((k, rest)) = kinds.split_first() else {
        return rows.is_empty().then(Vec::new);
    };
    let mut heads: Vec<Name> = Vec::new();
    for r in rows {
        if let Pat::Ctor(h, _) = &r[0] {
            if !heads.contains(h) {
                heads.push(h.clone());
            }
        }
    }
    match k {
        Kind::Data(d) => {
            let ctors = env.data.get(d).map(|info| info.ctors.clone()).unwrap_or_default();
            match ctors.iter().find(|(c, _)| !heads.contains(c)) {
                None => {
                    for (c, fields) in &ctors {
                        let mut ks: Vec<Kind> = fields.iter().map(|t| field_kind(env, t)).collect();
                        let n = ks.len();
                        ks.extend(rest.iter().cloned());
                        if let Some(mut w) = uncovered(env, &specialize(rows, c, n), &ks) {
                            let tail = w.split_off(n);
                            let mut out = vec![Witness::Ctor(c.clone(), w)];
                            out.extend(tail);
                            return Some(out);
                        }
                    }
                    None
                }
                Some((missing, fields)) => uncovered(env, &default(rows), rest).map(|w| {
                    let head = Witness::Ctor(missing.clone(), vec![Witness::Wild; fields.len()]);
                    std::iter::once(head).chain(w).collect()
                }),
            }
        }
        Kind::Open => {
            uncovered(env, &default(rows), rest).map(|w| std::iter::once(Witness::Other(heads)).chain(w).collect())
        }
    }
}

fn proper_subterm(small: &SType, big: &SType) -> bool {
    match big {
        SType::Con(_, args) | SType::Fam(_, args) => args.iter().any(|a| a == small || proper_subterm(small, a)),
        SType::Arrow(a, b) => **a == *small || **b == *small || proper_subterm(small, a) || proper_subterm(small, b),
        SType::Var(_) | SType::Forall(..) | SType::Qual(..) => false,
    }
}

/// Decides whether the closed family `family`, with parameter `kinds` and
/// ordered `equations`, is total. Other families it calls must already be
/// known total in `env`.
pub fn check_totality(
    env: &SurfaceEnv,
    family: &Name,
    kinds: &[Kind],
    equations: &[SEquation],
) -> Result<(), NotTotal> {
    let mut self_calls: Vec<(usize, Vec<SType>)> = Vec::new();
    for (i, eq) in equations.iter().enumerate() {
        let mut bad = None;
        eq.rhs.visit_fams(&mut |f, args| {
            if f == family {
                self_calls.push((i, args.to_vec()));
            } else if bad.is_none() && !matches!(env.families.get(f).map(|x| &x.guard), Some(Guard::Total)) {
                bad = Some(f.clone());
            }
        });
        if let Some(f) = bad {
            return Err(NotTotal::CallsPartial { family: f });
        }
    }
    if !self_calls.is_empty() {
        let decreasing = (0..kinds.len()).any(|pos| {
            self_calls.iter().all(|(i, args)| {
                let lhs = &equations[*i].lhs;
                pos < args.len() && pos < lhs.len() && proper_subterm(&args[pos], &lhs[pos])
            })
        });
        if !decreasing {
            let (_, args) = &self_calls[0];
            return Err(NotTotal::NonDecreasing { call: SType::Fam(family.clone(), args.clone()) });
        }
    }
    let rows: Vec<Vec<Pat>> = equations
        .iter()
        .filter(|eq| eq.lhs.len() == kinds.len() && is_linear(&eq.lhs))
        .map(|eq| eq.lhs.iter().map(pattern).collect())
        .collect();
    match uncovered(env, &rows, kinds) {
        Some(w) => Err(NotTotal::Uncovered(w)),
        None => Ok(()),
    }
}
