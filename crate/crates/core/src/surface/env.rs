use indexmap::IndexMap;
use thiserror::Error;

use super::syntax::{AssocDecl, InstanceDecl, Pred, SType};
use super::totality::NotTotal;
use crate::name::Name;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub params: Vec<Name>,
    /// Superclass predicates over `params`.
    pub superclasses: Vec<Pred>,
    pub assoc: Option<AssocDecl>,
    pub closed: bool,
    /// Declaration order; significant for closed classes.
    pub instances: Vec<InstanceDecl>,
}

impl ClassInfo {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// What a family use needs from its context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    /// `C => F : n`: a use `F ts` needs `C ts`.
    Class(Name),
    /// `T => F : n`: usable anywhere.
    Total,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyInfo {
    pub arity: usize,
    pub guard: Guard,
    /// Totality asserted by pragma rather than proved.
    pub unsafe_total: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataInfo {
    pub params: Vec<Name>,
    pub ctors: Vec<(Name, Vec<SType>)>,
}

/// Class, family and constructor tables. Immutable once loaded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurfaceEnv {
    pub classes: IndexMap<Name, ClassInfo>,
    pub families: IndexMap<Name, FamilyInfo>,
    pub ty_cons: IndexMap<Name, usize>,
    pub data: IndexMap<Name, DataInfo>,
}

impl SurfaceEnv {
    /// The datatype a constructor belongs to.
    pub fn data_of(&self, ctor: &str) -> Option<(&Name, &DataInfo)> {
        self.data.iter().find(|(_, d)| d.ctors.iter().any(|(c, _)| &**c == ctor))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("use of `{family}` is not guarded: cannot prove `{pred}`")]
    UnguardedFamilyUse { family: Name, pred: Pred },
    #[error("proving `{0}` exceeded the entailment depth bound")]
    EntailmentDepthExceeded(Pred),
    #[error("unbound type variable `{0}`")]
    UnboundTyVar(Name),
    #[error("`{name}` expects {expected} argument(s) but is given {found}")]
    ArityMismatch { name: Name, expected: usize, found: usize },
    #[error("unknown type constructor or family `{0}`")]
    UnknownName(Name),
    #[error("unknown class `{0}`")]
    UnknownClass(Name),
    #[error("closed class `{0}` cannot be given further instances")]
    ClosedClassExtended(Name),
    #[error("`{name}` is declared more than once")]
    DuplicateDeclaration { name: Name },
    #[error("family `{family}` is declared total but {reason}")]
    NotTotal { family: Name, reason: NotTotal },
    #[error("family application `{family}` on the right-hand side of an instance for `{head}` needs `{pred}`, which the instance context does not provide")]
    FamilyInRHS { family: Name, head: Pred, pred: Pred },
    #[error("instance `{head}` is missing the associated type `{family}`")]
    MissingAssociatedType { head: Pred, family: Name },
    #[error("bad associated type: {0}")]
    BadAssociatedType(String),
    #[error("bad instance head `{0}`: {1}")]
    BadInstanceHead(Pred, String),
    #[error("`{0}` is not a free-standing open family")]
    NotOpenFamily(Name),
    #[error("type `{0}` cannot appear in a family equation")]
    BadEquationType(SType),
}

impl SurfaceError {
    pub fn code(&self) -> &'static str {
        use SurfaceError::*;
        match self {
            UnguardedFamilyUse { .. } => "UnguardedFamilyUse",
            EntailmentDepthExceeded(_) => "DepthExceeded",
            UnboundTyVar(_) => "UnboundTyVar",
            ArityMismatch { .. } => "ArityMismatch",
            UnknownName(_) => "UnknownName",
            UnknownClass(_) => "UnknownClass",
            ClosedClassExtended(_) => "ClosedClassExtended",
            DuplicateDeclaration { .. } => "DuplicateDeclaration",
            NotTotal { .. } => "NotTotal",
            FamilyInRHS { .. } => "FamilyInRHS",
            MissingAssociatedType { .. } => "MissingAssociatedType",
            BadAssociatedType(_) => "BadAssociatedType",
            BadInstanceHead(..) => "BadInstanceHead",
            NotOpenFamily(_) => "NotOpenFamily",
            BadEquationType(_) => "BadEquationType",
        }
    }
}
