//! Randomized and exhaustive checking of the core calculus: world and term
//! generators, shrinking, and the property suites.

pub mod enumerate;
pub mod gen;
pub mod report;
pub mod shrink;
pub mod suites;
pub mod world;

pub use enumerate::enumerate_small;
pub use report::{Failure, Report};
pub use suites::{fuzz, run_suite, unify_oracle, FuzzConfig, Suite};
pub use world::{gen_world, World};
