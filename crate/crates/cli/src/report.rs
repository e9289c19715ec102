//! JSON reports printed with `--json`.

use besat::automaton::{Solution, Verdict};
use besat::formula::Formula;
use besat::semantics::{Interval, IntervalStructure};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureSizes {
    /// Letters of the input.
    pub user: usize,
    /// Letters after normalization, fresh ones included.
    pub full: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Point labels over the input letters.
    pub points: Vec<Vec<String>>,
    pub interval: Interval,
    /// Point labels over all letters of the normalized pair.
    pub expansion: Vec<Vec<String>>,
    pub verified: bool,
}

impl Witness {
    pub fn new(
        restriction: &IntervalStructure,
        expansion: &IntervalStructure,
        verified: bool,
    ) -> Self {
        Witness {
            points: restriction.point_names(),
            interval: restriction.top(),
            expansion: expansion.point_names(),
            verified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input: String,
    pub hnf: String,
    pub psi: String,
    pub xi: String,
    pub signature: SignatureSizes,
    pub steps: usize,
    pub states: usize,
    pub transitions: usize,
    /// `sat`, `unsat` or `inconclusive`.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub wall_ms: f64,
    /// Set when `m` was overridden; the verdict is then not trustworthy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unsound_mode: Option<usize>,
    #[serde(default)]
    pub cached: bool,
}

impl RunReport {
    pub fn new(input: &Formula, s: &Solution, unsound_mode: Option<usize>, wall_ms: f64) -> Self {
        let pair = s.pair();
        let (reason, witness) = match &s.decision.verdict {
            Verdict::Sat(c) => (
                None,
                Some(Witness::new(&c.restriction, &c.expansion, c.verified)),
            ),
            Verdict::Unsat => (None, None),
            Verdict::Inconclusive(why) => (Some(why.clone()), None),
        };
        RunReport {
            input: input.to_string(),
            hnf: s.hnf.to_string(),
            psi: pair.psi.to_string(),
            xi: pair.xi.to_string(),
            signature: SignatureSizes {
                user: input.letters().len(),
                full: pair.signature.len(),
            },
            steps: s.trace.steps.len(),
            states: s.decision.stats.states,
            transitions: s.decision.stats.transitions,
            verdict: s.decision.verdict.name().to_string(),
            reason,
            witness,
            wall_ms,
            unsound_mode,
            cached: false,
        }
    }
}

/// One disagreement found by `fuzz`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub index: u64,
    pub kind: String,
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub count: u64,
    pub max_points: usize,
    pub sat: usize,
    pub unsat: usize,
    pub inconclusive: usize,
    pub disagreements: Vec<Bundle>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub input: String,
    pub max_points: usize,
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
}
