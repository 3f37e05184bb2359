//! The Haskell-flavoured surface layer: classes, instances, associated and
//! free-standing families, and their elaboration into kernel signatures.

pub mod check;
pub mod elaborate;
pub mod entail;
pub mod env;
pub mod syntax;
pub mod totality;

pub use check::{infer_constraints, st_check_type};
pub use elaborate::{elaborate, Elaboration};
pub use entail::{entails, Derivation, EntailError, MAX_ENTAIL_DEPTH};
pub use env::{ClassInfo, DataInfo, FamilyInfo, Guard, SurfaceEnv, SurfaceError};
pub use syntax::*;
pub use totality::{check_totality, Kind, NotTotal, Witness};
