//! Exhaustive enumerations over fixed small signatures, used as brute-force
//! oracles.

use std::collections::BTreeMap;

use cfc_core::parser::parse_program;
use cfc_core::program::load;
use cfc_core::{Name, Signature, Type};

const NAT: &str = "
data Z : 0
data S : 1
family Plus : 2 total
axiom plus : Plus {
  forall n. Plus Z n ~ n;
  forall m n [r | c : Plus m n ~ r]. Plus (S m) n ~ S r
}
family Pred : 1 partial
axiom pred : Pred {
  forall n. Pred (S n) ~ n
}
";

/// Unary naturals with total addition and a partial predecessor.
pub fn nat_signature() -> Signature {
    let l = load(&parse_program(NAT).expect("built-in signature parses"));
    assert!(l.ok(), "{:?}", l.diagnostics);
    l.sig
}

/// Largest node count enumerated for a given family bound.
pub fn size_limit(bound: usize) -> usize {
    2 * bound + 3
}

/// Every closed type over [`nat_signature`] with at most `bound` family
/// applications and at most `size_limit(bound)` nodes, smallest first.
pub fn enumerate_small(bound: usize) -> Vec<Type> {
    let max = size_limit(bound);
    // by_size[n][k]: types of n nodes with k family applications
    let mut by_size: Vec<Vec<Vec<Type>>> = vec![vec![vec![]; bound + 1]; max + 1];
    for n in 1..=max {
        let mut here: Vec<Vec<Type>> = vec![vec![]; bound + 1];
        if n == 1 {
            here[0].push(Type::con("Z", vec![]));
        } else {
            for k in 0..=bound {
                for t in &by_size[n - 1][k] {
                    here[k].push(Type::con("S", vec![t.clone()]));
                    if k < bound {
                        here[k + 1].push(Type::fam("Pred", vec![t.clone()]));
                    }
                }
            }
            for left in 1..n - 1 {
                let right = n - 1 - left;
                for k1 in 0..bound {
                    for k2 in 0..bound - k1 {
                        for a in &by_size[left][k1] {
                            for b in &by_size[right][k2] {
                                here[k1 + k2 + 1].push(Type::fam("Plus", vec![a.clone(), b.clone()]));
                            }
                        }
                    }
                }
            }
        }
        by_size[n] = here;
    }
    by_size.into_iter().flat_map(|ks| ks.into_iter().flatten()).collect()
}

/// The constructors of the unification oracle space: one constant and one
/// binary constructor.
pub const ORACLE_CONS: [(&str, usize); 2] = [("A", 0), ("B", 2)];
pub const ORACLE_VARS: [&str; 2] = ["x", "y"];

/// All types over [`ORACLE_CONS`] and `vars` with at most `depth` levels
/// (a leaf is one level).
pub fn oracle_types(depth: usize, vars: &[&str]) -> Vec<Type> {
    let mut levels: Vec<Vec<Type>> = vec![vec![]];
    let mut leaves: Vec<Type> = vec![Type::con("A", vec![])];
    leaves.extend(vars.iter().map(|v| Type::var(v)));
    let mut all: Vec<Type> = Vec::new();
    for d in 1..=depth {
        let mut these = Vec::new();
        if d == 1 {
            these = leaves.clone();
        } else {
            let below: Vec<Type> = levels[1..d].iter().flatten().cloned().collect();
            let exact = &levels[d - 1];
            for a in &below {
                for b in &below {
                    if exact.contains(a) || exact.contains(b) {
                        these.push(Type::con("B", vec![a.clone(), b.clone()]));
                    }
                }
            }
        }
        all.extend(these.iter().cloned());
        levels.push(these);
    }
    all
}

/// Ground substitutions for `vars` with images of at most `depth` levels.
pub fn ground_substitutions(depth: usize, vars: &[&str]) -> Vec<BTreeMap<Name, Type>> {
    let ground = oracle_types(depth, &[]);
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        let mut next = Vec::new();
        for s in &out {
            for g in &ground {
                let mut s2 = s.clone();
                s2.insert(Name::new(v), g.clone());
                next.push(s2);
            }
        }
        out = next;
    }
    out
}
