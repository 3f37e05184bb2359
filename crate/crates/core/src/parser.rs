//! Recursive-descent parser for `.cfc` programs, kernel types, coercions,
//! expressions and surface types.
//!
//! Upper-case names are resolved as families or constructors by a prescan
//! for family declarations, so a family may be used before it is declared.

use std::collections::HashSet;

use crate::lexer::{lex, ParseError, Span, Tok};
use crate::name::Name;
use crate::program::{Decl, Item, Program};
use crate::surface::syntax::{
    AssocDecl, ClassDecl, DataDecl, FamilyDeclS, InstanceDecl, Pred, SEquation, SType, SurfaceDecl,
};
use crate::syntax::{AxiomUse, Coercion, Equation, EvalAssumption, EvalResolution, Expr, Prop, Type};

type PResult<T> = Result<T, ParseError>;

pub struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    families: HashSet<Name>,
}

/// Family names declared anywhere in `toks`.
fn prescan(toks: &[(Tok, Span)]) -> HashSet<Name> {
    let mut out = HashSet::new();
    for (i, (t, _)) in toks.iter().enumerate() {
        let at = |k: usize| toks.get(i + k).map(|(t, _)| t);
        match t {
            Tok::Kw("family") => {
                let k = if at(1) == Some(&Tok::Kw("total")) { 2 } else { 1 };
                if let Some(Tok::Upper(n)) = at(k) {
                    out.insert(Name::new(n));
                }
            }
            Tok::Kw("type") => {
                if let Some(Tok::Upper(n)) = at(1) {
                    out.insert(Name::new(n));
                }
            }
            _ => {}
        }
    }
    out
}

fn list_of(t: Type) -> Type {
    Type::Con(Name::new("List"), vec![t])
}

impl Parser {
    pub fn new(src: &str, families: HashSet<Name>) -> PResult<Parser> {
        Ok(Parser { toks: lex(src)?, pos: 0, families })
    }

    pub fn families(&self) -> &HashSet<Name> {
        &self.families
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { span: self.span(), message: msg.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.err(format!("expected {wanted}, found {}", self.peek()))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn kw(&mut self, s: &str) -> PResult<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn lower(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Lower(s) => {
                self.bump();
                Ok(Name::from(s))
            }
            _ => self.unexpected("a lower-case name"),
        }
    }

    fn upper(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Upper(s) => {
                self.bump();
                Ok(Name::from(s))
            }
            _ => self.unexpected("an upper-case name"),
        }
    }

    fn num(&mut self) -> PResult<usize> {
        match self.peek() {
            Tok::Num(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    pub fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    /// Runs `f`, rewinding on failure.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let save = self.pos;
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = save;
                None
            }
        }
    }

    fn head(&self, n: Name, args: Vec<Type>) -> Type {
        if self.families.contains(&n) {
            Type::Fam(n, args)
        } else {
            Type::Con(n, args)
        }
    }

    // ---- kernel types ----

    fn ty_atom_start(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_) | Tok::Upper(_)) || self.is_sym("(") || self.is_sym("[")
    }

    pub fn ty(&mut self) -> PResult<Type> {
        if self.eat_kw("forall") {
            let mut vs = vec![self.lower()?];
            while let Tok::Lower(_) = self.peek() {
                vs.push(self.lower()?);
            }
            self.sym(".")?;
            let body = self.ty()?;
            return Ok(vs.into_iter().rev().fold(body, |b, v| Type::Forall(v, Box::new(b))));
        }
        if self.is_sym("(") {
            if let Some(p) = self.attempt(|p| {
                p.sym("(")?;
                let prop = p.prop()?;
                p.sym(")")?;
                p.sym("=>")?;
                Ok(prop)
            }) {
                return Ok(Type::Qual(Box::new(p), Box::new(self.ty()?)));
            }
        }
        let a = self.ty_app()?;
        if self.eat_sym("->") {
            return Ok(Type::arrow(a, self.ty()?));
        }
        Ok(a)
    }

    fn ty_app(&mut self) -> PResult<Type> {
        if let Tok::Upper(_) = self.peek() {
            let h = self.upper()?;
            let mut args = Vec::new();
            while self.ty_atom_start() {
                args.push(self.ty_atom()?);
            }
            return Ok(self.head(h, args));
        }
        self.ty_atom()
    }

    fn ty_atom(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Lower(_) => Ok(Type::Var(self.lower()?)),
            Tok::Upper(_) => {
                let h = self.upper()?;
                Ok(self.head(h, vec![]))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.ty()?;
                self.sym(")")?;
                Ok(t)
            }
            Tok::Sym("[") => {
                self.bump();
                let t = self.ty()?;
                self.sym("]")?;
                Ok(list_of(t))
            }
            _ => self.unexpected("a type"),
        }
    }

    pub fn prop(&mut self) -> PResult<Prop> {
        let l = self.ty()?;
        self.sym("~")?;
        let r = self.ty()?;
        Ok(Prop::new(l, r))
    }

    // ---- coercions ----

    fn co_atom_start(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_) | Tok::Upper(_)) || self.is_sym("(")
    }

    fn is_axiom_use(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_)) && matches!(self.peek_at(1), Tok::Sym("["))
    }

    pub fn coercion(&mut self) -> PResult<Coercion> {
        if self.eat_kw("forall") {
            let a = self.lower()?;
            self.sym(".")?;
            return Ok(Coercion::Forall(a, Box::new(self.coercion()?)));
        }
        let a = self.co_arrow()?;
        if self.eat_sym(";") {
            return Ok(Coercion::trans(a, self.coercion()?));
        }
        Ok(a)
    }

    fn co_arrow(&mut self) -> PResult<Coercion> {
        let a = self.co_prefix()?;
        if self.eat_sym("->") {
            return Ok(Coercion::Arrow(Box::new(a), Box::new(self.co_arrow()?)));
        }
        Ok(a)
    }

    fn co_prefix(&mut self) -> PResult<Coercion> {
        let mut g = if self.eat_kw("sym") {
            Coercion::sym(self.co_atom()?)
        } else if self.eat_kw("nth") {
            let i = self.num()?;
            Coercion::nth(i, self.co_atom()?)
        } else if self.eat_kw("refl") {
            Coercion::Refl(self.ty_atom()?)
        } else if let Tok::Upper(_) = self.peek() {
            let h = self.upper()?;
            let mut args = Vec::new();
            while self.co_atom_start() {
                args.push(self.co_atom()?);
            }
            self.co_head(h, args)
        } else if self.is_axiom_use() {
            self.axiom_use(true)?
        } else {
            self.co_atom()?
        };
        while self.eat_sym("@") {
            g = Coercion::inst(g, self.ty_atom()?);
        }
        Ok(g)
    }

    fn co_head(&self, h: Name, args: Vec<Coercion>) -> Coercion {
        if self.families.contains(&h) {
            Coercion::Fam(h, args)
        } else {
            Coercion::Con(h, args)
        }
    }

    fn axiom_use(&mut self, full: bool) -> PResult<Coercion> {
        let axiom = self.lower()?;
        self.sym("[")?;
        let index = self.num()?;
        self.sym("]")?;
        let mut tys = Vec::new();
        let mut resolutions = Vec::new();
        if full {
            while self.ty_atom_start() {
                tys.push(self.ty_atom()?);
            }
            if self.eat_sym("{") {
                loop {
                    self.sym("(")?;
                    let witness = self.ty()?;
                    self.sym("|")?;
                    let proof = self.coercion()?;
                    self.sym(")")?;
                    resolutions.push(EvalResolution { witness, proof });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.sym("}")?;
            }
        }
        Ok(Coercion::Axiom(AxiomUse { axiom, index, tys, resolutions }))
    }

    fn co_atom(&mut self) -> PResult<Coercion> {
        match self.peek().clone() {
            Tok::Lower(_) if self.is_axiom_use() => self.axiom_use(false),
            Tok::Lower(_) => Ok(Coercion::Var(self.lower()?)),
            Tok::Upper(_) => {
                let h = self.upper()?;
                Ok(self.co_head(h, vec![]))
            }
            Tok::Sym("(") => {
                self.bump();
                let g = self.coercion()?;
                if self.eat_sym("~") {
                    let r = self.coercion()?;
                    self.sym(")")?;
                    self.sym("=>")?;
                    let body = self.coercion()?;
                    return Ok(Coercion::Qual(Box::new(g), Box::new(r), Box::new(body)));
                }
                self.sym(")")?;
                Ok(g)
            }
            _ => self.unexpected("a coercion"),
        }
    }

    // ---- expressions ----

    fn assumption(&mut self) -> PResult<EvalAssumption> {
        let tyvar = self.lower()?;
        self.sym("|")?;
        let covar = self.lower()?;
        self.sym(":")?;
        let family = self.upper()?;
        let mut args = Vec::new();
        while self.ty_atom_start() {
            args.push(self.ty_atom()?);
        }
        self.sym("~")?;
        let again = self.lower()?;
        if again != tyvar {
            return self.err(format!("evaluation assumption must end in its own variable `{tyvar}`, found `{again}`"));
        }
        Ok(EvalAssumption { tyvar, covar, family, args })
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        if self.eat_sym("\\") {
            let x = self.lower()?;
            self.sym(":")?;
            if let Some(p) = self.attempt(|p| {
                p.sym("(")?;
                let prop = p.prop()?;
                p.sym(")")?;
                p.sym(".")?;
                Ok(prop)
            }) {
                return Ok(Expr::CLam(x, p, Box::new(self.expr()?)));
            }
            let t = self.ty()?;
            self.sym(".")?;
            return Ok(Expr::Lam(x, t, Box::new(self.expr()?)));
        }
        if self.eat_sym("/\\") {
            let a = self.lower()?;
            self.sym(".")?;
            return Ok(Expr::TLam(a, Box::new(self.expr()?)));
        }
        if self.eat_kw("assume") {
            self.sym("(")?;
            let a = self.assumption()?;
            self.sym(")")?;
            self.kw("in")?;
            return Ok(Expr::Assume(a, Box::new(self.expr()?)));
        }
        let mut e = self.expr_app()?;
        while self.eat_sym("|>") {
            e = Expr::cast(e, self.coercion()?);
        }
        Ok(e)
    }

    fn expr_atom_start(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_) | Tok::Upper(_)) || self.is_sym("(")
    }

    fn expr_app(&mut self) -> PResult<Expr> {
        let mut e = self.expr_atom()?;
        loop {
            if self.eat_sym("[") {
                let t = self.ty()?;
                self.sym("]")?;
                e = Expr::tapp(e, t);
            } else if self.eat_sym("<") {
                let g = self.coercion()?;
                self.sym(">")?;
                e = Expr::capp(e, g);
            } else if self.expr_atom_start() {
                e = Expr::app(e, self.expr_atom()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn expr_atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Lower(_) => Ok(Expr::Var(self.lower()?)),
            Tok::Upper(_) => Ok(Expr::Const(self.upper()?)),
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            _ => self.unexpected("an expression"),
        }
    }

    // ---- kernel declarations ----

    fn equation(&mut self) -> PResult<Equation> {
        let mut tyvars = Vec::new();
        let mut assumptions = Vec::new();
        if self.eat_kw("forall") {
            loop {
                if let Tok::Lower(_) = self.peek() {
                    tyvars.push(self.lower()?);
                } else if self.eat_sym("[") {
                    assumptions.push(self.assumption()?);
                    self.sym("]")?;
                } else {
                    break;
                }
            }
            self.sym(".")?;
        }
        let span = self.span();
        let (family, lhs) = match self.ty()? {
            Type::Fam(f, args) => (f, args),
            other => {
                return Err(ParseError {
                    span,
                    message: format!("left-hand side `{other}` must be an application of a declared family"),
                })
            }
        };
        self.sym("~")?;
        let rhs = self.ty()?;
        Ok(Equation { tyvars, assumptions, family, lhs, rhs })
    }

    fn block<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.sym("{")?;
        let mut out = Vec::new();
        while !self.is_sym("}") {
            out.push(item(self)?);
            if !self.eat_sym(";") {
                break;
            }
        }
        self.sym("}")?;
        Ok(out)
    }

    // ---- surface syntax ----

    fn shead(&self, n: Name, args: Vec<SType>) -> SType {
        if self.families.contains(&n) {
            SType::Fam(n, args)
        } else {
            SType::Con(n, args)
        }
    }

    pub fn stype(&mut self) -> PResult<SType> {
        if self.eat_kw("forall") {
            let mut vs = vec![self.lower()?];
            while let Tok::Lower(_) = self.peek() {
                vs.push(self.lower()?);
            }
            self.sym(".")?;
            let body = self.stype()?;
            return Ok(vs.into_iter().rev().fold(body, |b, v| SType::Forall(v, Box::new(b))));
        }
        if let Some(ctx) = self.attempt(|p| {
            let ctx = p.context()?;
            p.sym("=>")?;
            Ok(ctx)
        }) {
            return Ok(SType::Qual(ctx, Box::new(self.stype()?)));
        }
        let a = self.stype_app()?;
        if self.eat_sym("->") {
            return Ok(SType::arrow(a, self.stype()?));
        }
        Ok(a)
    }

    fn stype_app(&mut self) -> PResult<SType> {
        if let Tok::Upper(_) = self.peek() {
            let h = self.upper()?;
            let mut args = Vec::new();
            while self.ty_atom_start() {
                args.push(self.stype_atom()?);
            }
            return Ok(self.shead(h, args));
        }
        self.stype_atom()
    }

    fn stype_atom(&mut self) -> PResult<SType> {
        match self.peek().clone() {
            Tok::Lower(_) => Ok(SType::Var(self.lower()?)),
            Tok::Upper(_) => {
                let h = self.upper()?;
                Ok(self.shead(h, vec![]))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.stype()?;
                self.sym(")")?;
                Ok(t)
            }
            Tok::Sym("[") => {
                self.bump();
                let t = self.stype()?;
                self.sym("]")?;
                Ok(SType::Con(Name::new("List"), vec![t]))
            }
            _ => self.unexpected("a type"),
        }
    }

    fn pred(&mut self) -> PResult<Pred> {
        let class = self.upper()?;
        let mut args = Vec::new();
        while self.ty_atom_start() {
            args.push(self.stype_atom()?);
        }
        Ok(Pred { class, args })
    }

    /// `C a` or `(C a, D b)`.
    fn context(&mut self) -> PResult<Vec<Pred>> {
        if self.eat_sym("(") {
            let mut ps = vec![self.pred()?];
            while self.eat_sym(",") {
                ps.push(self.pred()?);
            }
            self.sym(")")?;
            return Ok(ps);
        }
        Ok(vec![self.pred()?])
    }

    fn opt_context(&mut self) -> Vec<Pred> {
        self.attempt(|p| {
            let ctx = p.context()?;
            p.sym("=>")?;
            Ok(ctx)
        })
        .unwrap_or_default()
    }

    fn sequation(&mut self) -> PResult<SEquation> {
        let span = self.span();
        let (family, lhs) = match self.stype_app()? {
            SType::Fam(f, args) => (f, args),
            other => {
                return Err(ParseError {
                    span,
                    message: format!("`{other}` is not an application of a declared family"),
                })
            }
        };
        self.sym("=")?;
        Ok(SEquation { family, lhs, rhs: self.stype()? })
    }

    fn kind(&mut self) -> PResult<Name> {
        if self.eat_sym("*") {
            return Ok(Name::new("*"));
        }
        self.upper()
    }

    fn instance(&mut self) -> PResult<InstanceDecl> {
        self.kw("instance")?;
        let context = self.opt_context();
        let head = self.pred()?;
        let assoc = if self.eat_kw("where") {
            self.kw("type")?;
            Some(self.sequation()?)
        } else {
            None
        };
        Ok(InstanceDecl { context, head, assoc })
    }

    fn class(&mut self) -> PResult<ClassDecl> {
        let closed = self.eat_kw("closed");
        let context = self.opt_context();
        let name = self.upper()?;
        let mut params = Vec::new();
        while let Tok::Lower(_) = self.peek() {
            params.push(self.lower()?);
        }
        let assoc = if self.eat_kw("where") {
            self.kw("type")?;
            let name = self.upper()?;
            let mut ps = Vec::new();
            while let Tok::Lower(_) = self.peek() {
                ps.push(self.lower()?);
            }
            if self.eat_sym("::") {
                self.kind()?;
            }
            Some(AssocDecl { name, params: ps })
        } else {
            None
        };
        let closed = if closed { Some(self.block(Self::instance)?) } else { None };
        Ok(ClassDecl { context, name, params, assoc, closed })
    }

    fn type_family(&mut self) -> PResult<FamilyDeclS> {
        let total = self.eat_kw("total");
        let name = self.upper()?;
        let mut params = Vec::new();
        loop {
            if let Tok::Lower(_) = self.peek() {
                params.push((self.lower()?, None));
            } else if self.eat_sym("(") {
                let p = self.lower()?;
                self.sym("::")?;
                let k = self.kind()?;
                self.sym(")")?;
                params.push((p, Some(k)));
            } else {
                break;
            }
        }
        let result_kind = if self.eat_sym("::") { Some(self.kind()?) } else { None };
        let equations = if self.eat_kw("where") { Some(self.block(Self::sequation)?) } else { None };
        Ok(FamilyDeclS { name, params, result_kind, total, equations })
    }

    fn data(&mut self) -> PResult<Decl> {
        let name = self.upper()?;
        if self.eat_sym(":") {
            return Ok(Decl::Data { name, arity: self.num()? });
        }
        let mut params = Vec::new();
        while let Tok::Lower(_) = self.peek() {
            params.push(self.lower()?);
        }
        let mut ctors = Vec::new();
        if self.eat_sym("=") {
            loop {
                let c = self.upper()?;
                let mut fields = Vec::new();
                while self.ty_atom_start() {
                    fields.push(self.stype_atom()?);
                }
                ctors.push((c, fields));
                if !self.eat_sym("|") {
                    break;
                }
            }
        }
        Ok(Decl::Surface(SurfaceDecl::Data(DataDecl { name, params, ctors })))
    }

    fn decl(&mut self) -> PResult<Decl> {
        match self.peek().clone() {
            Tok::Kw("data") => {
                self.bump();
                self.data()
            }
            Tok::Kw("const") => {
                self.bump();
                let name = self.upper()?;
                self.sym(":")?;
                Ok(Decl::Const { name, ty: self.ty()? })
            }
            Tok::Kw("family") => {
                self.bump();
                let name = self.upper()?;
                self.sym(":")?;
                let arity = self.num()?;
                let total = if self.eat_kw("total") {
                    true
                } else if self.eat_kw("partial") {
                    false
                } else {
                    return self.unexpected("`total` or `partial`");
                };
                Ok(Decl::Family { name, arity, total })
            }
            Tok::Kw("axiom") => {
                self.bump();
                let name = self.lower()?;
                self.sym(":")?;
                let family = self.upper()?;
                let equations = self.block(Self::equation)?;
                Ok(Decl::Axiom { name, family, equations })
            }
            Tok::Kw("term") => {
                self.bump();
                let name = self.lower()?;
                self.sym("=")?;
                Ok(Decl::Term { name, body: self.expr()? })
            }
            Tok::Kw("class") => {
                self.bump();
                Ok(Decl::Surface(SurfaceDecl::Class(self.class()?)))
            }
            Tok::Kw("instance") => Ok(Decl::Surface(SurfaceDecl::Instance(self.instance()?))),
            Tok::Kw("type") => {
                self.bump();
                if self.eat_kw("instance") {
                    return Ok(Decl::Surface(SurfaceDecl::TypeInstance(self.sequation()?)));
                }
                if self.eat_kw("family") {
                    return Ok(Decl::Surface(SurfaceDecl::TypeFamily(self.type_family()?)));
                }
                self.unexpected("`family` or `instance`")
            }
            Tok::Sym("{-#") => {
                self.bump();
                match self.upper()?.as_str() {
                    "TOTAL" => {}
                    other => return self.err(format!("unknown pragma `{other}`")),
                }
                let f = self.upper()?;
                self.sym("#-}")?;
                Ok(Decl::Surface(SurfaceDecl::TotalPragma(f)))
            }
            Tok::Kw("sig") => {
                self.bump();
                let name = self.lower()?;
                self.sym("::")?;
                Ok(Decl::Surface(SurfaceDecl::Sig { name, ty: self.stype()? }))
            }
            _ => self.unexpected("a declaration"),
        }
    }

    pub fn program(&mut self) -> PResult<Program> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            let span = self.span();
            items.push(Item { decl: self.decl()?, span });
        }
        Ok(Program { items })
    }
}

pub fn parse_program(src: &str) -> PResult<Program> {
    let toks = lex(src)?;
    let families = prescan(&toks);
    Parser { toks, pos: 0, families }.program()
}

fn whole<T>(src: &str, families: &HashSet<Name>, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser::new(src, families.clone())?;
    let v = f(&mut p)?;
    p.expect_eof()?;
    Ok(v)
}

/// Parses a kernel type; upper-case names in `families` become family applications.
pub fn parse_type(src: &str, families: &HashSet<Name>) -> PResult<Type> {
    whole(src, families, Parser::ty)
}

pub fn parse_coercion(src: &str, families: &HashSet<Name>) -> PResult<Coercion> {
    whole(src, families, Parser::coercion)
}

pub fn parse_expr(src: &str, families: &HashSet<Name>) -> PResult<Expr> {
    whole(src, families, Parser::expr)
}

pub fn parse_stype(src: &str, families: &HashSet<Name>) -> PResult<SType> {
    whole(src, families, Parser::stype)
}
