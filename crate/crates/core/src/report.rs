//! Outcomes of law checks, with shrunk counterexamples on failure.

use std::fmt::Debug;

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};
use serde::{Deserialize, Serialize};

use crate::gen::seed_bytes;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawOutcome {
    pub law: String,
    pub cases: u32,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LawOutcome {
    pub fn pass(law: &str, cases: u32) -> Self {
        LawOutcome { law: law.into(), cases, passed: true, counterexample: None, note: None }
    }

    pub fn fail(law: &str, cases: u32, counterexample: String, note: String) -> Self {
        LawOutcome { law: law.into(), cases, passed: false, counterexample: Some(counterexample), note: Some(note) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A deterministic runner for `(seed, law)` with no failure persistence.
pub fn runner(seed: u64, law: &str, cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        max_shrink_iters: 4096,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &seed_bytes(seed, law)))
}

/// Runs `check` on `cases` generated inputs; on failure the input is shrunk.
pub fn check_law<T, St>(law: &str, seed: u64, cases: u32, strategy: St, check: impl Fn(&T) -> Result<(), String>) -> LawOutcome
where
    T: Debug,
    St: Strategy<Value = T>,
{
    if cases == 0 {
        return LawOutcome::pass(law, 0).with_note("vacuous: zero cases requested");
    }
    let mut runner = runner(seed, law, cases);
    match runner.run(&strategy, |value| check(&value).map_err(TestCaseError::fail)) {
        Ok(()) => LawOutcome::pass(law, cases),
        Err(TestError::Fail(reason, value)) => LawOutcome::fail(law, cases, format!("{value:?}"), reason.to_string()),
        Err(TestError::Abort(reason)) => LawOutcome {
            law: law.into(),
            cases,
            passed: false,
            counterexample: None,
            note: Some(format!("aborted: {reason}")),
        },
    }
}

/// A law that needs no random input.
pub fn check_fixed(law: &str, check: impl FnOnce() -> Result<(), String>) -> LawOutcome {
    match check() {
        Ok(()) => LawOutcome::pass(law, 1),
        Err(e) => LawOutcome { law: law.into(), cases: 1, passed: false, counterexample: None, note: Some(e) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_law_is_shrunk() {
        let out = check_law("below-ten", 1, 200, 0u32..1000, |x| if *x < 10 { Ok(()) } else { Err("too big".into()) });
        assert!(!out.passed);
        assert_eq!(out.counterexample.as_deref(), Some("10"));
    }

    #[test]
    fn zero_cases_is_vacuous() {
        let out = check_law("anything", 1, 0, 0u32..10, |_| Err("never runs".into()));
        assert!(out.passed);
        assert!(out.note.unwrap().contains("vacuous"));
    }
}
