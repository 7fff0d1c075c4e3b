//! Batch suites behind the command-line front end and their reports.
//!
//! Every suite returns a [`SuiteResult`]; its JSON form is byte-identical
//! across runs with the same configuration except for the `timing` field.

mod acceptance;
mod runs;

pub use acceptance::{acceptance_pipeline, ACCEPTANCE_CHECKS};
pub use runs::{analyze, analyze_word, complex_suite, folds_suite, lemma_suite, persistence_suite, WordAnalysis};

use crate::report::{LemmaReport, Verdict};
use crate::tree_geometry::sweeps::SweepSummary;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

/// Sizes of every sampled or exhaustive run. Defaults are the acceptance
/// scale; zero empties the corresponding suite, which is then skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Word length for the exhaustive F_2 sweeps.
    pub paulin_length: usize,
    /// Normal-form length for the Z/2*Z/3 sweep.
    pub paulin_free_product_letters: usize,
    pub overlap_length: usize,
    /// Instances per randomized tree-lemma sweep (and per branch).
    pub random_instances: usize,
    pub exponent_bound: u32,
    pub direction_radius: usize,
    pub morphisms: usize,
    pub bbt_triples: usize,
    pub path_length: usize,
    pub collapse_morphisms: usize,
    pub collapse_pairs: usize,
    pub nielsen_length: usize,
    pub generic_length: usize,
    pub stabilizer_word_length: usize,
    pub sandwich_samples: usize,
    pub delta_points: usize,
    pub delta_quadruples: usize,
    pub twist_max: usize,
    pub persistence_c: Vec<usize>,
    /// C_K window radius; derived from the family when absent.
    pub window_radius: Option<i64>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            paulin_length: 6,
            paulin_free_product_letters: 4,
            overlap_length: 8,
            random_instances: 1000,
            exponent_bound: 4,
            direction_radius: 3,
            morphisms: 100,
            bbt_triples: 1000,
            path_length: 8,
            collapse_morphisms: 10,
            collapse_pairs: 1000,
            nielsen_length: 4,
            generic_length: 8,
            stabilizer_word_length: 5,
            sandwich_samples: 1000,
            delta_points: 48,
            delta_quadruples: 10_000,
            twist_max: 50,
            persistence_c: vec![1, 2, 3, 5, 10, 20],
            window_radius: None,
        }
    }
}

impl Budgets {
    /// Small budgets for smoke runs.
    pub fn quick() -> Self {
        Budgets {
            paulin_length: 3,
            paulin_free_product_letters: 3,
            overlap_length: 4,
            random_instances: 30,
            direction_radius: 2,
            morphisms: 5,
            bbt_triples: 50,
            path_length: 5,
            collapse_morphisms: 2,
            collapse_pairs: 20,
            nielsen_length: 2,
            stabilizer_word_length: 3,
            sandwich_samples: 100,
            delta_points: 16,
            delta_quadruples: 500,
            twist_max: 5,
            persistence_c: vec![1, 3],
            ..Budgets::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub detail: Value,
}

impl CheckEntry {
    pub fn new(name: &str, verdict: Verdict, detail: impl Serialize) -> Self {
        CheckEntry {
            name: name.to_string(),
            verdict,
            reason: None,
            detail: serde_json::to_value(detail).expect("reports serialize"),
        }
    }

    pub fn from_sweep(name: &str, s: &SweepSummary) -> Self {
        CheckEntry::new(name, s.verdict(), s)
    }

    pub fn from_report(name: &str, r: &LemmaReport) -> Self {
        let mut e = CheckEntry::new(name, r.verdict, r);
        e.reason = r.reason.clone();
        e
    }

    /// Fold several sweeps or reports into one entry.
    pub fn from_parts(name: &str, parts: Vec<(String, Verdict, Value)>) -> Self {
        let verdict = parts.iter().fold(Verdict::Skipped, |v, (_, w, _)| v.combine(*w));
        let detail: serde_json::Map<String, Value> = parts.into_iter().map(|(k, _, v)| (k, v)).collect();
        CheckEntry::new(name, verdict, detail)
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Environment {
    pub tool: String,
    pub version: String,
    pub os: String,
    pub arch: String,
    pub workers: usize,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            workers: rayon::current_num_threads(),
        }
    }
}

/// Wall-clock milliseconds, the only nondeterministic part of a result.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub total_ms: u64,
    pub checks_ms: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub schema_version: u32,
    pub command: String,
    pub presentation: String,
    pub seed: u64,
    pub budgets: Budgets,
    pub environment: Environment,
    pub verdict: Verdict,
    pub checks: Vec<CheckEntry>,
    pub timing: Timing,
}

/// Collects checks and their timings.
pub struct Recorder {
    result: SuiteResult,
    started: Instant,
}

impl Recorder {
    pub fn new(command: &str, presentation: &str, seed: u64, budgets: &Budgets) -> Self {
        Recorder {
            result: SuiteResult {
                schema_version: SCHEMA_VERSION,
                command: command.to_string(),
                presentation: presentation.to_string(),
                seed,
                budgets: budgets.clone(),
                environment: Environment::current(),
                verdict: Verdict::Skipped,
                checks: Vec::new(),
                timing: Timing::default(),
            },
            started: Instant::now(),
        }
    }

    /// Runs `f` and records its entry under the entry's own name.
    pub fn run(&mut self, f: impl FnOnce() -> CheckEntry) {
        let t = Instant::now();
        let e = f();
        self.result.timing.checks_ms.insert(e.name.clone(), t.elapsed().as_millis() as u64);
        self.result.checks.push(e);
    }

    /// Records an entry computed elsewhere, with no timing of its own.
    pub fn push(&mut self, e: CheckEntry) {
        self.result.checks.push(e);
    }

    pub fn finish(mut self) -> SuiteResult {
        let r = &mut self.result;
        r.verdict = r.checks.iter().fold(Verdict::Skipped, |v, c| v.combine(c.verdict));
        r.timing.total_ms = self.started.elapsed().as_millis() as u64;
        self.result
    }
}

impl SuiteResult {
    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// JSON with the timing field removed, the determinism contract's domain.
    pub fn to_json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} on {} (seed {})\n", self.command, self.presentation, self.seed);
        for c in &self.checks {
            let ms = self.timing.checks_ms.get(&c.name).copied().unwrap_or(0);
            let _ = write!(s, "{:<8} {:<28} {ms:>8} ms", verdict_word(c.verdict), c.name);
            if let Some(r) = &c.reason {
                let _ = write!(s, "  {r}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "overall: {} in {} ms", verdict_word(self.verdict), self.timing.total_ms);
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,verdict,reason\n");
        for c in &self.checks {
            let reason = c.reason.as_deref().unwrap_or("").replace('"', "\"\"");
            let _ = writeln!(s, "{},{},\"{reason}\"", c.name, verdict_word(c.verdict));
        }
        s
    }
}

pub fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Skipped => "skipped",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skipped_checks_do_not_fail() {
        let mut r = Recorder::new("t", "F2", 0, &Budgets::quick());
        r.run(|| CheckEntry::new("a", Verdict::Skipped, ()));
        r.run(|| CheckEntry::new("b", Verdict::Pass, ()));
        let res = r.finish();
        assert_eq!(res.verdict, Verdict::Pass);
        assert!(!res.to_json_without_timing().contains("timing"));
        assert!(res.to_json().contains("\"timing\""));
        assert_eq!(res.to_csv().lines().count(), 3);
    }

    #[test]
    fn one_failure_fails_the_suite() {
        let mut r = Recorder::new("t", "F2", 0, &Budgets::quick());
        r.run(|| CheckEntry::new("a", Verdict::Pass, ()));
        r.run(|| CheckEntry::new("b", Verdict::Fail, ()).with_reason("corrupted oracle"));
        let res = r.finish();
        assert_eq!(res.verdict, Verdict::Fail);
        assert!(res.to_text().contains("corrupted oracle"));
    }

    #[test]
    fn budgets_round_trip_through_toml() {
        let b = Budgets::quick();
        let s = toml::to_string(&b).unwrap();
        assert_eq!(toml::from_str::<Budgets>(&s).unwrap(), b);
        let partial: Budgets = toml::from_str("morphisms = 3").unwrap();
        assert_eq!(partial.morphisms, 3);
        assert_eq!(partial.overlap_length, 8);
    }
}
