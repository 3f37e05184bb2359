//! System CFC: a core calculus in which type family applications may only
//! appear inside equality propositions, together with a surface layer of
//! type classes and associated families that elaborates into it.

pub mod alpha;
pub mod eval;
pub mod lexer;
pub mod name;
pub mod parser;
pub mod print;
pub mod program;
pub mod rewrite;
pub mod signature;
pub mod subst;
pub mod surface;
pub mod syntax;
pub mod typecheck;
pub mod unify;

pub use name::Name;
pub use syntax::*;
