//! Automata reading a structure as the word of its point labels, and the
//! search deciding satisfiability of a shallow pair.

mod alphabet;
mod decide;
mod depth2;
mod forward;
mod nfa;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use alphabet::{Alphabet, TagLetters};
pub use decide::{
    decide_sat, decide_sat_with, solve, Certificate, DecideError, DecideOptions, Decision,
    Solution, SolveOptions, Verdict,
};
pub use depth2::{AutomatonState, Depth2Nfa};
pub use forward::{ForwardNfa, ForwardState};
pub use nfa::{
    accepting_runs, count_accepting_runs, emptiness_with_witness, Complement, Infix, InfixState,
    Nfa, Product, SearchLimits, SearchOutcome, SearchStats, SubsetState,
};

use crate::formula::{LetterSet, Signature, SignatureError};
use crate::semantics::{IntervalStructure, SemanticsError};
use crate::types::TypeError;

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("formula has depth {0}, at most 2 expected")]
    TooDeep(usize),
    #[error("formula is not in homogeneous normal form")]
    NotHomogeneous,
    #[error("empty word")]
    EmptyWord,
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// The labels of the points, in order. Never empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncodedWord(Vec<LetterSet>);

impl EncodedWord {
    pub fn new(letters: Vec<LetterSet>) -> Result<Self, AutomatonError> {
        if letters.is_empty() {
            return Err(AutomatonError::EmptyWord);
        }
        Ok(EncodedWord(letters))
    }

    pub fn letters(&self) -> &[LetterSet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self, sig: &Signature) -> Vec<Vec<String>> {
        self.0.iter().map(|a| sig.names(a)).collect()
    }

    pub fn to_json(&self, sig: &Signature) -> serde_json::Value {
        #[derive(Serialize)]
        struct Word {
            word: Vec<Vec<String>>,
        }
        serde_json::to_value(Word {
            word: self.names(sig),
        })
        .expect("word serializes")
    }
}

pub fn encode(s: &IntervalStructure) -> EncodedWord {
    EncodedWord(s.points().to_vec())
}

pub fn decode(w: &EncodedWord, sig: Arc<Signature>) -> Result<IntervalStructure, AutomatonError> {
    Ok(IntervalStructure::new(sig, w.0.clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip() {
        let sig = Arc::new(Signature::new(["p"]).unwrap());
        let s = IntervalStructure::from_names(sig.clone(), [vec!["p"], vec![]]).unwrap();
        let w = encode(&s);
        assert_eq!(w.names(&sig), vec![vec!["p".to_string()], vec![]]);
        assert_eq!(decode(&w, sig).unwrap().points(), s.points());
        assert!(matches!(
            EncodedWord::new(vec![]),
            Err(AutomatonError::EmptyWord)
        ));
    }
}
