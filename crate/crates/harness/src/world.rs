//! Random worlds: a checked program together with pools of closed types and
//! well-typed closed expressions drawn from it.
//!
//! A world is built as source-level declarations and then run through the
//! ordinary loader, so every world goes through the same checks as a file.
//! Signatures are good by construction:
//!
//! * families are numbered and an assumption may only mention an earlier
//!   family, so resolution never cycles;
//! * a total family ends with a catch-all equation and its assumptions only
//!   mention earlier total families;
//! * open equations of one family are kept pairwise compatible.

use cfc_core::lexer::Span;
use cfc_core::program::{load, Decl, Item, Loaded, Program};
use cfc_core::rewrite::top_reduce;
use cfc_core::surface::{
    AssocDecl, ClassDecl, FamilyDeclS, InstanceDecl, Pred, SEquation, SType, SurfaceDecl, SurfaceEnv,
};
use cfc_core::unify::compat;
use cfc_core::{Coercion, Equation, EvalAssumption, Expr, Name, Prop, Signature, Type};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gen::Gen;

/// A closed family application that reduces, with its reduct and proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolved {
    pub family: Name,
    pub args: Vec<Type>,
    pub reduct: Type,
    pub proof: Coercion,
}

impl Resolved {
    pub fn app(&self) -> Type {
        Type::Fam(self.family.clone(), self.args.clone())
    }
}

#[derive(Clone, Debug)]
pub struct World {
    pub seed: u64,
    pub size: usize,
    /// The source program: kernel and surface declarations plus one term per
    /// pool expression.
    pub program: Program,
    pub sig: Signature,
    /// The class table produced by elaborating the surface declarations.
    pub env: SurfaceEnv,
    pub types: Vec<Type>,
    pub exprs: Vec<(Expr, Type)>,
    /// Reducing applications of every family, used to build coercions.
    pub table: Vec<Resolved>,
}

/// Mixes a seed with an index into an independent stream seed.
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, index))
}

fn item(decl: Decl) -> Item {
    Item { decl, span: Span::default() }
}

/// Type constructors and families the kernel part is built from.
pub struct Palette {
    pub cons: Vec<(Name, usize)>,
}

impl Palette {
    fn nullary(&self) -> Vec<&Name> {
        self.cons.iter().filter(|(_, k)| *k == 0).map(|(h, _)| h).collect()
    }

    /// A closed constructor type.
    pub fn ground<R: Rng>(&self, rng: &mut R, depth: usize) -> Type {
        let (h, k) = if depth <= 1 {
            let n = self.nullary();
            (n[rng.gen_range(0..n.len())].clone(), 0)
        } else {
            self.cons[rng.gen_range(0..self.cons.len())].clone()
        };
        Type::Con(h, (0..k).map(|_| self.ground(rng, depth - 1)).collect())
    }

    /// A closed family-free type, occasionally with arrows and quantifiers.
    pub fn ground_any<R: Rng>(&self, rng: &mut R, depth: usize) -> Type {
        if depth > 1 {
            let r = rng.gen_range(0..100);
            if r < 10 {
                return Type::arrow(self.ground_any(rng, depth - 1), self.ground_any(rng, depth - 1));
            }
            if r < 14 {
                return Type::forall("u", Type::arrow(Type::var("u"), self.ground(rng, depth - 1)));
            }
        }
        let (h, k) = if depth <= 1 {
            let n = self.nullary();
            (n[rng.gen_range(0..n.len())].clone(), 0)
        } else {
            self.cons[rng.gen_range(0..self.cons.len())].clone()
        };
        Type::Con(h, (0..k).map(|_| self.ground_any(rng, depth - 1)).collect())
    }

    /// A family-free type whose variables come from `scope`.
    fn over<R: Rng>(&self, rng: &mut R, scope: &[Name], depth: usize) -> Type {
        if depth <= 1 || rng.gen_bool(0.3) {
            if !scope.is_empty() && rng.gen_bool(0.6) {
                return Type::Var(scope[rng.gen_range(0..scope.len())].clone());
            }
            let n = self.nullary();
            return Type::Con(n[rng.gen_range(0..n.len())].clone(), vec![]);
        }
        if rng.gen_bool(0.1) {
            return Type::arrow(self.over(rng, scope, depth - 1), self.over(rng, scope, depth - 1));
        }
        let (h, k) = self.cons[rng.gen_range(0..self.cons.len())].clone();
        Type::Con(h, (0..k).map(|_| self.over(rng, scope, depth - 1)).collect())
    }

    /// A left-hand-side pattern. New variables are pushed onto `vars`;
    /// with `linear` unset a variable may be reused.
    fn pattern<R: Rng>(&self, rng: &mut R, depth: usize, vars: &mut Vec<Name>, linear: bool) -> Type {
        if depth <= 1 || rng.gen_bool(0.4) {
            if rng.gen_bool(0.6) {
                if !linear && !vars.is_empty() && rng.gen_bool(0.3) {
                    return Type::Var(vars[rng.gen_range(0..vars.len())].clone());
                }
                let v = Name::from(format!("a{}", vars.len()));
                vars.push(v.clone());
                return Type::Var(v);
            }
            let n = self.nullary();
            return Type::Con(n[rng.gen_range(0..n.len())].clone(), vec![]);
        }
        self.con_pattern(rng, depth, vars, linear)
    }

    fn con_pattern<R: Rng>(&self, rng: &mut R, depth: usize, vars: &mut Vec<Name>, linear: bool) -> Type {
        let (h, k) = self.cons[rng.gen_range(0..self.cons.len())].clone();
        Type::Con(h, (0..k).map(|_| self.pattern(rng, depth.saturating_sub(1), vars, linear)).collect())
    }
}

#[derive(Clone, Debug)]
struct FamSpec {
    name: Name,
    arity: usize,
    total: bool,
}

fn equation<R: Rng>(
    rng: &mut R,
    pal: &Palette,
    fam: &FamSpec,
    lhs: Vec<Type>,
    vars: Vec<Name>,
    callable: &[FamSpec],
) -> Equation {
    let mut tyvars: Vec<Name> = Vec::new();
    for v in vars {
        if !tyvars.contains(&v) {
            tyvars.push(v);
        }
    }
    let mut scope = tyvars.clone();
    let mut assumptions = Vec::new();
    if !callable.is_empty() {
        let n = match rng.gen_range(0..100) {
            0..=49 => 0,
            50..=84 => 1,
            _ => 2,
        };
        for j in 0..n {
            let g = &callable[rng.gen_range(0..callable.len())];
            let args = (0..g.arity).map(|_| pal.over(rng, &scope, 2)).collect();
            let tyvar = Name::from(format!("r{j}"));
            assumptions.push(EvalAssumption {
                tyvar: tyvar.clone(),
                covar: Name::from(format!("c{j}")),
                family: g.name.clone(),
                args,
            });
            scope.push(tyvar);
        }
    }
    let rhs = pal.over(rng, &scope, 3);
    Equation { tyvars, assumptions, family: fam.name.clone(), lhs, rhs }
}

/// The axioms defining one family, each a list of equations.
fn family_axioms<R: Rng>(rng: &mut R, pal: &Palette, fam: &FamSpec, earlier: &[FamSpec]) -> Vec<Vec<Equation>> {
    let callable: Vec<FamSpec> = earlier.iter().filter(|g| g.total || !fam.total).cloned().collect();
    let specific = |rng: &mut R| {
        let mut vars = Vec::new();
        let linear = rng.gen_bool(0.8);
        let mut lhs: Vec<Type> = (0..fam.arity).map(|_| pal.pattern(rng, 3, &mut vars, linear)).collect();
        // At least one constructor, so the equation is not a catch-all.
        if lhs.iter().all(|t| matches!(t, Type::Var(_))) {
            let i = rng.gen_range(0..lhs.len());
            let mut fresh = vars.clone();
            lhs[i] = pal.con_pattern(rng, 2, &mut fresh, linear);
            vars = fresh;
            let used: std::collections::BTreeSet<Name> = lhs.iter().flat_map(|t| t.free_vars()).collect();
            vars.retain(|v| used.contains(v));
        }
        (lhs, vars)
    };
    if fam.arity == 0 {
        if fam.total || rng.gen_bool(0.5) {
            return vec![vec![equation(rng, pal, fam, vec![], vec![], &callable)]];
        }
        return vec![];
    }
    if fam.total {
        let mut eqs = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let (lhs, vars) = specific(rng);
            eqs.push(equation(rng, pal, fam, lhs, vars, &callable));
        }
        let vars: Vec<Name> = (0..fam.arity).map(|i| Name::from(format!("a{i}"))).collect();
        let lhs = vars.iter().cloned().map(Type::Var).collect();
        eqs.push(equation(rng, pal, fam, lhs, vars, &callable));
        return vec![eqs];
    }
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(2..=3);
        let eqs = (0..n)
            .map(|_| {
                let (lhs, vars) = specific(rng);
                equation(rng, pal, fam, lhs, vars, &callable)
            })
            .collect();
        return vec![eqs];
    }
    let mut open: Vec<Equation> = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        for _attempt in 0..6 {
            let (lhs, vars) = specific(rng);
            let eq = equation(rng, pal, fam, lhs, vars, &callable);
            if open.iter().all(|e| compat(e, &eq)) {
                open.push(eq);
                break;
            }
        }
    }
    open.into_iter().map(|e| vec![e]).collect()
}

fn svar(n: &str) -> SType {
    SType::Var(Name::new(n))
}

/// A family-free surface type over `scope`.
fn s_over<R: Rng>(rng: &mut R, pal: &Palette, scope: &[Name], depth: usize) -> SType {
    let t = pal.over(rng, scope, depth);
    SType::from_pattern(&t)
}

/// Classes with associated families and instances, free and closed type
/// families, and signatures. Only total kernel families appear unguarded.
fn surface_decls<R: Rng>(rng: &mut R, pal: &Palette, totals: &[FamSpec], n: usize) -> Vec<SurfaceDecl> {
    let mut out = Vec::new();
    // Wraps a total kernel family around part of a right-hand side.
    let with_total = |rng: &mut R, t: SType, scope: &[Name]| -> SType {
        if totals.is_empty() || !rng.gen_bool(0.3) {
            return t;
        }
        let f = &totals[rng.gen_range(0..totals.len())];
        let mut args: Vec<SType> = (0..f.arity).map(|_| s_over(rng, pal, scope, 2)).collect();
        if let Some(first) = args.first_mut() {
            *first = t;
        } else {
            return SType::Fam(f.name.clone(), args);
        }
        SType::Fam(f.name.clone(), args)
    };
    let heads = |rng: &mut R| {
        let mut cs = pal.cons.clone();
        cs.shuffle(rng);
        cs.truncate(rng.gen_range(1..=3).min(cs.len()));
        cs
    };
    let head_type = |h: &Name, k: usize| -> (SType, Vec<Name>) {
        let vars: Vec<Name> = (0..k).map(|i| Name::from(format!("y{i}"))).collect();
        (SType::Con(h.clone(), vars.iter().cloned().map(SType::Var).collect()), vars)
    };
    for k in 0..n {
        let class = Name::from(format!("Cls{k}"));
        let assoc = Name::from(format!("G{k}"));
        out.push(SurfaceDecl::Class(ClassDecl {
            context: vec![],
            name: class.clone(),
            params: vec![Name::new("x")],
            assoc: Some(AssocDecl { name: assoc.clone(), params: vec![Name::new("x")] }),
            closed: None,
        }));
        for (h, arity) in heads(rng) {
            let (head, vars) = head_type(&h, arity);
            let mut context = Vec::new();
            let mut rhs = s_over(rng, pal, &vars, 3);
            if k > 0 && !vars.is_empty() && rng.gen_bool(0.4) {
                let j = rng.gen_range(0..k);
                let v = vars[rng.gen_range(0..vars.len())].clone();
                context.push(Pred::new(&format!("Cls{j}"), vec![SType::Var(v.clone())]));
                let g = SType::Fam(Name::from(format!("G{j}")), vec![SType::Var(v)]);
                rhs = if rng.gen_bool(0.5) { g } else { SType::arrow(g, rhs) };
            }
            let rhs = with_total(rng, rhs, &vars);
            out.push(SurfaceDecl::Instance(InstanceDecl {
                context,
                head: Pred { class: class.clone(), args: vec![head.clone()] },
                assoc: Some(SEquation { family: assoc.clone(), lhs: vec![head], rhs }),
            }));
        }
        let free = Name::from(format!("H{k}"));
        out.push(SurfaceDecl::TypeFamily(FamilyDeclS {
            name: free.clone(),
            params: vec![(Name::new("x"), None)],
            result_kind: None,
            total: false,
            equations: None,
        }));
        for (h, arity) in heads(rng) {
            let (head, vars) = head_type(&h, arity);
            let mut rhs = s_over(rng, pal, &vars, 3);
            if !vars.is_empty() && rng.gen_bool(0.5) {
                let v = vars[rng.gen_range(0..vars.len())].clone();
                rhs = SType::arrow(SType::Fam(assoc.clone(), vec![SType::Var(v)]), rhs);
            }
            let rhs = with_total(rng, rhs, &vars);
            out.push(SurfaceDecl::TypeInstance(SEquation { family: free.clone(), lhs: vec![head], rhs }));
        }
        let closed = Name::from(format!("J{k}"));
        let mut eqs = Vec::new();
        for (h, arity) in heads(rng) {
            let (head, vars) = head_type(&h, arity);
            let rhs = s_over(rng, pal, &vars, 3);
            let rhs = with_total(rng, rhs, &vars);
            eqs.push(SEquation { family: closed.clone(), lhs: vec![head], rhs });
        }
        if rng.gen_bool(0.7) {
            let base = s_over(rng, pal, &[Name::new("z")], 2);
            let rhs = with_total(rng, base, &[Name::new("z")]);
            eqs.push(SEquation { family: closed.clone(), lhs: vec![svar("z")], rhs });
        }
        out.push(SurfaceDecl::TypeFamily(FamilyDeclS {
            name: closed,
            params: vec![(Name::new("x"), None)],
            result_kind: None,
            total: false,
            equations: Some(eqs),
        }));
        out.push(SurfaceDecl::Sig {
            name: Name::from(format!("s{k}")),
            ty: SType::arrow(SType::Fam(assoc, vec![svar("x")]), svar("x")),
        });
    }
    out
}

/// Kernel and surface declarations of a world of the given size.
fn declarations<R: Rng>(rng: &mut R, size: usize) -> (Palette, Vec<Item>) {
    let n_cons = (2 + size / 2).min(6);
    let cons: Vec<(Name, usize)> =
        (0..n_cons).map(|i| (Name::from(format!("T{i}")), if i < 2 { 0 } else { rng.gen_range(0..=2) })).collect();
    let pal = Palette { cons };
    let mut items: Vec<Item> = pal.cons.iter().map(|(h, k)| item(Decl::Data { name: h.clone(), arity: *k })).collect();
    for (i, (h, k)) in pal.cons.iter().enumerate() {
        let ty = Type::Con(h.clone(), (0..*k).map(|_| pal.ground(rng, 2)).collect());
        items.push(item(Decl::Const { name: Name::from(format!("K{i}")), ty }));
    }
    for j in 0..size / 2 {
        let mut ty = pal.ground(rng, 3);
        if !matches!(ty, Type::Con(..)) {
            ty = pal.ground(rng, 1);
        }
        items.push(item(Decl::Const { name: Name::from(format!("K{}", n_cons + j)), ty }));
    }
    let n_fams = size.min(8);
    let mut fams: Vec<FamSpec> = Vec::new();
    let mut axioms = Vec::new();
    for f in 0..n_fams {
        let spec = FamSpec { name: Name::from(format!("F{f}")), arity: rng.gen_range(0..=2), total: rng.gen_bool(0.5) };
        let axs = family_axioms(rng, &pal, &spec, &fams);
        let closed = axs.len() == 1 && axs[0].len() > 1;
        for (k, eqs) in axs.into_iter().enumerate() {
            let name = if closed { Name::from(format!("ax{f}")) } else { Name::from(format!("ax{f}_{k}")) };
            axioms.push(item(Decl::Axiom { name, family: spec.name.clone(), equations: eqs }));
        }
        items.push(item(Decl::Family { name: spec.name.clone(), arity: spec.arity, total: spec.total }));
        fams.push(spec);
    }
    items.extend(axioms);
    if size >= 3 {
        let totals: Vec<FamSpec> = fams.iter().filter(|f| f.total && f.arity > 0).cloned().collect();
        let n = (size / 3).min(3);
        items.extend(surface_decls(rng, &pal, &totals, n).into_iter().map(|d| item(Decl::Surface(d))));
    }
    (pal, items)
}

fn loaded_or_panic(program: &Program, seed: u64, size: usize) -> Loaded {
    let l = load(program);
    if !l.ok() {
        let ds: Vec<String> = l.diagnostics.iter().map(ToString::to_string).collect();
        panic!("world (seed {seed}, size {size}) does not check:\n{}\n{program}", ds.join("\n"));
    }
    l
}

/// Reducing closed applications of every family.
fn resolution_table<R: Rng>(rng: &mut R, pal: &Palette, sig: &Signature) -> Vec<Resolved> {
    let mut out: Vec<Resolved> = Vec::new();
    for (f, d) in &sig.families {
        for _ in 0..16 {
            let args: Vec<Type> = (0..d.arity)
                .map(|_| if rng.gen_bool(0.8) { pal.ground(rng, 3) } else { pal.ground_any(rng, 3) })
                .collect();
            if out.iter().any(|r| &r.family == f && r.args == args) {
                continue;
            }
            if let Ok(r) = top_reduce(sig, f, &args) {
                out.push(Resolved { family: f.clone(), args, reduct: r.ty.clone(), proof: r.proof() });
            }
        }
    }
    out
}

/// Builds the world for `seed`. Size 0 gives the empty world.
pub fn gen_world(seed: u64, size: usize) -> World {
    if size == 0 {
        return World {
            seed,
            size,
            program: Program::default(),
            sig: Signature::default(),
            env: SurfaceEnv::default(),
            types: vec![],
            exprs: vec![],
            table: vec![],
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pal, mut items) = declarations(&mut rng, size);
    let decls = Program { items: items.clone() };
    let l = loaded_or_panic(&decls, seed, size);
    let table = resolution_table(&mut rng, &pal, &l.sig);
    let mut world =
        World { seed, size, program: decls, sig: l.sig, env: l.elaboration.env, types: vec![], exprs: vec![], table };
    let pool = 4 * size;
    let mut g = Gen::new(&world, &mut rng);
    let types: Vec<Type> = (0..pool).map(|_| g.pretype()).collect();
    let exprs: Vec<(Expr, Type)> = (0..pool).map(|_| g.expr()).collect();
    for (i, (e, _)) in exprs.iter().enumerate() {
        items.push(item(Decl::Term { name: Name::from(format!("e{i}")), body: e.clone() }));
    }
    world.program = Program { items };
    world.types = types;
    world.exprs = exprs;
    world
}

impl World {
    pub fn palette(&self) -> Palette {
        Palette { cons: self.sig.ty_cons.iter().map(|(h, k)| (h.clone(), *k)).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.sig.ty_cons.is_empty()
    }

    /// Entries of the resolution table whose reduct is `t`.
    pub(crate) fn proofs_of<'a>(&'a self, t: &'a Type) -> impl Iterator<Item = &'a Resolved> + 'a {
        self.table.iter().filter(move |r| cfc_core::alpha::alpha_eq_ty(&r.reduct, t))
    }

    pub(crate) fn resolved_prop(r: &Resolved) -> Prop {
        Prop::new(r.app(), r.reduct.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cfc_core::program::load;
    use cfc_core::signature::check_good_signature;
    use cfc_core::typecheck::infer_expr;
    use cfc_core::Context;

    #[test]
    fn worlds_are_deterministic() {
        let a = gen_world(1, 6);
        let b = gen_world(1, 6);
        assert_eq!(a.program, b.program);
        assert_eq!(a.types, b.types);
        assert_eq!(a.exprs, b.exprs);
    }

    #[test]
    fn size_zero_is_empty() {
        let w = gen_world(2, 0);
        assert!(w.is_empty());
        assert!(w.program.items.is_empty());
    }

    #[test]
    fn small_world_signature_is_good() {
        let w = gen_world(1, 3);
        assert!(check_good_signature(&w.sig).is_empty());
    }

    #[test]
    fn generated_programs_load() {
        for seed in 0..40 {
            let w = gen_world(seed, 2 + (seed as usize % 7));
            let l = load(&w.program);
            assert!(l.ok(), "seed {seed}: {:?}", l.diagnostics);
        }
    }

    #[test]
    fn generated_expressions_have_their_types() {
        for seed in 0..20 {
            let w = gen_world(seed, 6);
            for (e, t) in &w.exprs {
                let u = infer_expr(&w.sig, &Context::new(), e).unwrap_or_else(|err| panic!("seed {seed}: {e}: {err}"));
                assert!(cfc_core::alpha::alpha_eq_ty(t, &u), "seed {seed}: {e}: `{t}` vs `{u}`");
            }
        }
    }

    #[test]
    fn table_entries_are_one_step_proofs() {
        let w = gen_world(5, 6);
        for r in &w.table {
            let p = cfc_core::typecheck::check_coercion(&w.sig, &Context::new(), &r.proof).unwrap();
            assert_eq!(p, World::resolved_prop(r));
        }
    }
}
