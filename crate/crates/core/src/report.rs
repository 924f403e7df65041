//! Law reports shared by every checker.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Violations kept per law; further ones are only counted.
const KEEP_PER_LAW: usize = 4;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: String,
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub law: String,
    pub checked: u64,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub violations: Vec<Violation>,
    /// Total number of failing instances per law, including ones not kept as witnesses.
    pub failures: BTreeMap<String, u64>,
    pub coverage: Vec<Coverage>,
    /// Checks that could not run, with the reason.
    pub skipped: Vec<String>,
}

impl LawReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fail(&mut self, law: &str, witness: Vec<String>) {
        let n = self.failures.entry(law.to_string()).or_insert(0);
        *n += 1;
        if (*n as usize) <= KEEP_PER_LAW {
            self.violations.push(Violation {
                law: law.to_string(),
                witness,
            });
        }
    }

    /// Records `ok`, building the witness only on failure.
    pub fn check(&mut self, law: &str, ok: bool, witness: impl FnOnce() -> Vec<String>) {
        if ok {
            return;
        }
        match self.failures.get_mut(law) {
            Some(n) if *n as usize >= KEEP_PER_LAW => *n += 1,
            _ => self.fail(law, witness()),
        }
    }

    pub fn cover(&mut self, law: &str, checked: u64, exhaustive: bool) {
        if let Some(c) = self.coverage.iter_mut().find(|c| c.law == law) {
            c.checked += checked;
            c.exhaustive &= exhaustive;
        } else {
            self.coverage.push(Coverage {
                law: law.to_string(),
                checked,
                exhaustive,
            });
        }
    }

    pub fn skip(&mut self, reason: impl Into<String>) {
        self.skipped.push(reason.into());
    }

    pub fn merge(&mut self, other: LawReport) {
        for v in other.violations {
            if self.violations.iter().filter(|w| w.law == v.law).count() < KEEP_PER_LAW {
                self.violations.push(v);
            }
        }
        for (law, n) in other.failures {
            *self.failures.entry(law).or_insert(0) += n;
        }
        for c in other.coverage {
            self.cover(&c.law, c.checked, c.exhaustive);
        }
        self.skipped.extend(other.skipped);
    }

    pub fn is_exhaustive(&self) -> bool {
        self.coverage.iter().all(|c| c.exhaustive) && self.skipped.is_empty()
    }
}
