//! Concrete syntax for kernel terms. The output is accepted by the parser
//! and parses back to an alpha-equivalent term.

use std::fmt::{self, Display, Formatter, Write};

use crate::syntax::{AxiomUse, Coercion, Equation, EvalAssumption, EvalResolution, Expr, Prop, Type};

// Type precedence: 0 = anything, 1 = arrow domain, 2 = argument position.
fn ty(t: &Type, prec: u8, out: &mut String) {
    match t {
        Type::Var(a) => out.push_str(a),
        Type::Con(h, args) | Type::Fam(h, args) => {
            if args.is_empty() {
                out.push_str(h);
                return;
            }
            let paren = prec >= 2;
            if paren {
                out.push('(');
            }
            out.push_str(h);
            for a in args {
                out.push(' ');
                ty(a, 2, out);
            }
            if paren {
                out.push(')');
            }
        }
        Type::Arrow(a, b) => {
            let paren = prec >= 1;
            if paren {
                out.push('(');
            }
            ty(a, 1, out);
            out.push_str(" -> ");
            ty(b, 0, out);
            if paren {
                out.push(')');
            }
        }
        Type::Forall(_, _) => {
            let paren = prec >= 1;
            if paren {
                out.push('(');
            }
            out.push_str("forall");
            let mut t = t;
            while let Type::Forall(a, body) = t {
                out.push(' ');
                out.push_str(a);
                t = body;
            }
            out.push_str(". ");
            ty(t, 0, out);
            if paren {
                out.push(')');
            }
        }
        Type::Qual(p, body) => {
            let paren = prec >= 1;
            if paren {
                out.push('(');
            }
            out.push('(');
            prop(p, out);
            out.push_str(") => ");
            ty(body, 0, out);
            if paren {
                out.push(')');
            }
        }
    }
}

fn prop(p: &Prop, out: &mut String) {
    ty(&p.lhs, 0, out);
    out.push_str(" ~ ");
    ty(&p.rhs, 0, out);
}

// Coercion precedence: 0 = `;` chain, 1 = arrow, 2 = prefix forms and `@`, 3 = atom.
fn co(g: &Coercion, prec: u8, out: &mut String) {
    let wrap = |need: bool, out: &mut String, f: &dyn Fn(&mut String)| {
        if need {
            out.push('(');
        }
        f(out);
        if need {
            out.push(')');
        }
    };
    match g {
        Coercion::Var(c) => out.push_str(c),
        Coercion::Trans(a, b) => wrap(prec >= 1, out, &|out| {
            co(a, 1, out);
            out.push_str(" ; ");
            co(b, 0, out);
        }),
        Coercion::Arrow(a, b) => wrap(prec >= 2, out, &|out| {
            co(a, 2, out);
            out.push_str(" -> ");
            co(b, 1, out);
        }),
        Coercion::Sym(h) => wrap(prec >= 3, out, &|out| {
            out.push_str("sym ");
            co(h, 3, out);
        }),
        Coercion::Nth(i, h) => wrap(prec >= 3, out, &|out| {
            write!(out, "nth {i} ").unwrap();
            co(h, 3, out);
        }),
        Coercion::Refl(t) => wrap(prec >= 3, out, &|out| {
            out.push_str("refl ");
            ty(t, 2, out);
        }),
        Coercion::Inst(h, t) => wrap(prec >= 3, out, &|out| {
            co(h, 2, out);
            out.push_str(" @ ");
            ty(t, 2, out);
        }),
        Coercion::Con(h, gs) | Coercion::Fam(h, gs) => wrap(prec >= 3 && !gs.is_empty(), out, &|out| {
            out.push_str(h);
            for x in gs {
                out.push(' ');
                co(x, 3, out);
            }
        }),
        Coercion::Forall(a, h) => wrap(prec >= 1, out, &|out| {
            write!(out, "forall {a}. ").unwrap();
            co(h, 0, out);
        }),
        Coercion::Qual(a, b, c) => wrap(prec >= 1, out, &|out| {
            out.push('(');
            co(a, 0, out);
            out.push_str(" ~ ");
            co(b, 0, out);
            out.push_str(") => ");
            co(c, 0, out);
        }),
        Coercion::Axiom(u) => {
            let bare = u.tys.is_empty() && u.resolutions.is_empty();
            wrap(prec >= 3 && !bare, out, &|out| axiom_use(u, out));
        }
    }
}

fn axiom_use(u: &AxiomUse, out: &mut String) {
    write!(out, "{}[{}]", u.axiom, u.index).unwrap();
    for t in &u.tys {
        out.push(' ');
        ty(t, 2, out);
    }
    if !u.resolutions.is_empty() {
        out.push_str(" {");
        for (i, r) in u.resolutions.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            resolution(r, out);
        }
        out.push('}');
    }
}

fn resolution(r: &EvalResolution, out: &mut String) {
    out.push('(');
    ty(&r.witness, 0, out);
    out.push_str(" | ");
    co(&r.proof, 0, out);
    out.push(')');
}

fn assumption(a: &EvalAssumption, out: &mut String) {
    write!(out, "({} | {} : {}", a.tyvar, a.covar, a.family).unwrap();
    for t in &a.args {
        out.push(' ');
        ty(t, 2, out);
    }
    write!(out, " ~ {})", a.tyvar).unwrap();
}

// Expression precedence: 0 = binders, 1 = cast, 2 = application, 3 = atom.
fn expr(e: &Expr, prec: u8, out: &mut String) {
    let open = |need: bool, out: &mut String| {
        if need {
            out.push('(');
        }
    };
    let close = |need: bool, out: &mut String| {
        if need {
            out.push(')');
        }
    };
    match e {
        Expr::Var(x) | Expr::Const(x) => out.push_str(x),
        Expr::Lam(x, t, body) => {
            open(prec >= 1, out);
            write!(out, "\\{x}:").unwrap();
            ty(t, 0, out);
            out.push_str(". ");
            expr(body, 0, out);
            close(prec >= 1, out);
        }
        Expr::TLam(a, body) => {
            open(prec >= 1, out);
            write!(out, "/\\{a}. ").unwrap();
            expr(body, 0, out);
            close(prec >= 1, out);
        }
        Expr::CLam(c, p, body) => {
            open(prec >= 1, out);
            write!(out, "\\{c}:(").unwrap();
            prop(p, out);
            out.push_str("). ");
            expr(body, 0, out);
            close(prec >= 1, out);
        }
        Expr::Assume(a, body) => {
            open(prec >= 1, out);
            out.push_str("assume ");
            assumption(a, out);
            out.push_str(" in ");
            expr(body, 0, out);
            close(prec >= 1, out);
        }
        Expr::Cast(e, g) => {
            open(prec >= 2, out);
            expr(e, 1, out);
            out.push_str(" |> ");
            co(g, 0, out);
            close(prec >= 2, out);
        }
        Expr::App(f, a) => {
            open(prec >= 3, out);
            expr(f, 2, out);
            out.push(' ');
            expr(a, 3, out);
            close(prec >= 3, out);
        }
        Expr::TApp(f, t) => {
            open(prec >= 3, out);
            expr(f, 2, out);
            out.push_str(" [");
            ty(t, 0, out);
            out.push(']');
            close(prec >= 3, out);
        }
        Expr::CApp(f, g) => {
            open(prec >= 3, out);
            expr(f, 2, out);
            out.push_str(" <");
            co(g, 0, out);
            out.push('>');
            close(prec >= 3, out);
        }
    }
}

/// `forall vars [r | c : G args ~ r]. F lhs ~ rhs`
pub fn equation(eq: &Equation, out: &mut String) {
    if !eq.tyvars.is_empty() || !eq.assumptions.is_empty() {
        out.push_str("forall");
        for a in &eq.tyvars {
            out.push(' ');
            out.push_str(a);
        }
        for a in &eq.assumptions {
            write!(out, " [{} | {} : {}", a.tyvar, a.covar, a.family).unwrap();
            for t in &a.args {
                out.push(' ');
                ty(t, 2, out);
            }
            write!(out, " ~ {}]", a.tyvar).unwrap();
        }
        out.push_str(". ");
    }
    ty(&eq.lhs_type(), 0, out);
    out.push_str(" ~ ");
    ty(&eq.rhs, 0, out);
}

pub fn type_at(t: &Type, prec: u8) -> String {
    let mut s = String::new();
    ty(t, prec, &mut s);
    s
}

macro_rules! display {
    ($t:ty, |$x:ident, $out:ident| $body:expr) => {
        impl Display for $t {
            fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
                let $x = self;
                let mut $out = String::new();
                $body;
                f.write_str(&$out)
            }
        }
    };
}

display!(Type, |t, s| ty(t, 0, &mut s));
display!(Prop, |p, s| prop(p, &mut s));
display!(Coercion, |g, s| co(g, 0, &mut s));
display!(Expr, |e, s| expr(e, 0, &mut s));
display!(EvalAssumption, |a, s| assumption(a, &mut s));
display!(EvalResolution, |r, s| resolution(r, &mut s));
display!(Equation, |e, s| equation(e, &mut s));

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn types_print_with_minimal_parens() {
        let t = Type::arrow(
            Type::arrow(Type::con("Int", vec![]), Type::con("Int", vec![])),
            Type::con("List", vec![Type::con("S", vec![Type::con("Z", vec![])])]),
        );
        assert_eq!(t.to_string(), "(Int -> Int) -> List (S Z)");
        let q = Type::forall(
            "a",
            Type::qual(
                Prop::new(Type::fam("Plus", vec![Type::con("Z", vec![]), Type::con("Z", vec![])]), Type::var("a")),
                Type::arrow(Type::var("a"), Type::var("a")),
            ),
        );
        assert_eq!(q.to_string(), "forall a. (Plus Z Z ~ a) => a -> a");
    }

    #[test]
    fn expressions_print() {
        let e = Expr::app(
            Expr::cast(
                Expr::lam("x", Type::con("Int", vec![]), Expr::var("x")),
                Coercion::refl(Type::con("Int", vec![])),
            ),
            Expr::konst("MkInt"),
        );
        assert_eq!(e.to_string(), "((\\x:Int. x) |> refl Int) MkInt");
    }
}
