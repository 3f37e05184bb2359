use std::collections::BTreeMap;
use std::fmt;

use crate::suites::Suite;

/// One violated property, with the input and its minimized form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub world: u64,
    pub case: usize,
    pub message: String,
    pub input: String,
    pub minimized: String,
}

/// Outcome of a suite run. Cases are merged in index order, so a report is
/// a function of the suite, seed and case count alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub worlds: usize,
    pub cases: usize,
    /// Individual property checks (steps, peaks, tuples ...).
    pub checks: usize,
    pub failures: Vec<Failure>,
    pub counters: BTreeMap<String, usize>,
}

impl Report {
    pub fn new(suite: Suite) -> Self {
        Report { suite, worlds: 0, cases: 0, checks: 0, failures: vec![], counters: BTreeMap::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn count(&self, key: &str) -> usize {
        self.counters.get(key).copied().unwrap_or(0)
    }

    pub fn bump(&mut self, key: &str, n: usize) {
        *self.counters.entry(key.to_string()).or_default() += n;
    }

    pub fn merge(&mut self, other: Report) {
        self.worlds += other.worlds;
        self.cases += other.cases;
        self.checks += other.checks;
        self.failures.extend(other.failures);
        for (k, v) in other.counters {
            *self.counters.entry(k).or_default() += v;
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}: {} case(s) over {} world(s), {} check(s), {} failure(s)",
            self.suite,
            self.cases,
            self.worlds,
            self.checks,
            self.failures.len()
        )?;
        if !self.counters.is_empty() {
            let cs: Vec<String> = self.counters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(f, "  {}", cs.join(" "))?;
        }
        for (i, x) in self.failures.iter().enumerate() {
            writeln!(f, "  failure {} (world {}, case {}): {}", i + 1, x.world, x.case, x.message)?;
            writeln!(f, "    input:     {}", x.input)?;
            writeln!(f, "    minimized: {}", x.minimized)?;
        }
        Ok(())
    }
}
