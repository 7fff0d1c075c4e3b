//! Check reports shared by every module and serialized by the CLI.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    /// Skips never fail a suite.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
            _ => Verdict::Skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub inputs: Map<String, Value>,
    pub quantities: Map<String, Value>,
    pub verdict: Verdict,
    pub witness: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl LemmaReport {
    pub fn new(lemma_id: &str) -> Self {
        LemmaReport {
            lemma_id: lemma_id.to_string(),
            inputs: Map::new(),
            quantities: Map::new(),
            verdict: Verdict::Pass,
            witness: Map::new(),
            reason: None,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn quantity(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.quantities.insert(key.to_string(), value.into());
        self
    }

    pub fn witness(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.witness.insert(key.to_string(), value.into());
        self
    }

    pub fn fail(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Fail;
        self.reason = Some(reason.into());
        self
    }

    pub fn skip(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Skipped;
        self.reason = Some(reason.into());
        self
    }

    /// Pass unless `ok` is false, in which case fail with `reason`.
    pub fn check(self, ok: bool, reason: impl Into<String>) -> Self {
        if ok {
            self
        } else {
            self.fail(reason)
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_combination() {
        use Verdict::*;
        assert_eq!(Pass.combine(Skipped), Pass);
        assert_eq!(Skipped.combine(Skipped), Skipped);
        assert_eq!(Pass.combine(Fail), Fail);
    }

    #[test]
    fn keys_serialize_sorted() {
        let r = LemmaReport::new("x").quantity("z", 1).quantity("a", 2);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
    }
}
