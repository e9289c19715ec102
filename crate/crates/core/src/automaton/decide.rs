use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::alphabet::{Alphabet, TagLetters};
use super::forward::ForwardNfa;
use super::nfa::{
    emptiness_with_witness, Complement, Infix, Nfa, Product, SearchLimits, SearchOutcome,
    SearchStats,
};
use super::{AutomatonError, EncodedWord};
use crate::formula::{Formula, LetterSet, Node, Signature, WorkingPair};
use crate::normalize::{
    dec_formula, normalize_with, FreshLetterBlock, NormalizationTrace, NormalizeError,
    NormalizeOptions,
};
use crate::semantics::{evaluate, valid_over, IntervalStructure, SemanticsError};

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub max_states: Option<usize>,
    pub timeout: Option<Duration>,
    /// Letters outside the tag blocks; beyond this many the search is not
    /// attempted.
    pub max_plain_letters: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            max_states: Some(500_000),
            timeout: None,
            max_plain_letters: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub word: EncodedWord,
    /// The model over the full signature, fresh letters included.
    pub expansion: IntervalStructure,
    /// The same model over the letters without `#`.
    pub restriction: IntervalStructure,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Sat(Box<Certificate>),
    Unsat,
    Inconclusive(String),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Sat(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    pub stats: SearchStats,
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("pair is not shallow: depths {0} and {1}")]
    NotShallow(usize, usize),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Tag blocks found in the signature: letters `ell#k`, `r#k` and
/// `bit1#k ..`. A block is only treated up to tag renaming when its bits
/// occur nowhere but inside its own `dec` formula.
fn tag_blocks(sig: &Signature, parts: &[&Formula]) -> Vec<TagLetters> {
    let mut steps: BTreeMap<usize, usize> = BTreeMap::new();
    for l in sig.letters() {
        if let Some((base, k)) = l.rsplit_once('#') {
            if let (Some(i), Ok(k)) = (base.strip_prefix("bit"), k.parse::<usize>()) {
                if let Ok(i) = i.parse::<usize>() {
                    let m = steps.entry(k).or_default();
                    *m = (*m).max(i);
                }
            } else if let Ok(k) = k.parse::<usize>() {
                steps.entry(k).or_default();
            }
        }
    }
    let mut out = Vec::new();
    for (k, m) in steps {
        let block = FreshLetterBlock::new(k, m);
        let Some(bits) = block
            .bits
            .iter()
            .map(|b| sig.get(b))
            .collect::<Option<Vec<u32>>>()
        else {
            continue;
        };
        let bit_set: LetterSet = bits.iter().copied().collect();
        let dec = dec_formula(&block);
        if !parts
            .iter()
            .all(|f| bits_only_in(f, &dec, &bit_set, sig, &mut HashSet::new()))
        {
            continue;
        }
        out.push(TagLetters {
            ell: sig.get(&block.ell),
            r: sig.get(&block.r),
            bits,
        });
    }
    out
}

fn bits_only_in(
    f: &Formula,
    dec: &Formula,
    bits: &LetterSet,
    sig: &Signature,
    seen: &mut HashSet<usize>,
) -> bool {
    if !seen.insert(f.node() as *const Node as usize) || f == dec {
        return true;
    }
    match f.node() {
        Node::Atom(p) => !sig.get(p).is_some_and(|i| bits.contains(i)),
        _ => f
            .children()
            .iter()
            .all(|c| bits_only_in(c, dec, bits, sig, seen)),
    }
}

pub fn decide_sat(pair: &WorkingPair) -> Result<Decision, DecideError> {
    decide_sat_with(pair, &DecideOptions::default())
}

/// Searches for the shortest word whose largest interval satisfies
/// `psi & [G]xi`. A witness is checked against the semantics before it is
/// returned.
pub fn decide_sat_with(pair: &WorkingPair, opts: &DecideOptions) -> Result<Decision, DecideError> {
    let started = Instant::now();
    let psi = pair.psi.canonical();
    let xi = pair.xi.canonical();
    if psi.depth() > 2 || xi.depth() > 2 {
        return Err(DecideError::NotShallow(psi.depth(), xi.depth()));
    }
    let sig = Arc::new(pair.signature.clone());
    let blocks = tag_blocks(&sig, &[&psi, &xi]);
    let tagged: LetterSet = blocks.iter().flat_map(|b| b.bits.iter().copied()).collect();
    let mut used = psi.letters();
    used.extend(xi.letters());
    let mut plain = Vec::new();
    for l in &used {
        let i = sig.lookup(l).map_err(AutomatonError::from)?;
        if !tagged.contains(i) {
            plain.push(i);
        }
    }
    plain.sort_unstable();
    if plain.len() > opts.max_plain_letters {
        return Ok(Decision {
            verdict: Verdict::Inconclusive(format!("{} letters outside tag blocks", plain.len())),
            stats: SearchStats::default(),
        });
    }
    let alphabet = Alphabet::new(plain, blocks);
    let main = ForwardNfa::new(&psi, sig.clone())?;
    let bad = ForwardNfa::new(&Formula::not(xi.clone()), sig.clone())?;
    let product = Product(main, Complement(Infix(bad)));
    let limits = SearchLimits {
        max_states: opts.max_states,
        max_len: None,
        deadline: opts.timeout.map(|t| started + t),
    };
    let (outcome, stats) = emptiness_with_witness(
        &product,
        |q| alphabet.letters(|f| product.visit_labels(q, f)),
        limits,
    );
    let verdict = match outcome {
        SearchOutcome::Empty => Verdict::Unsat,
        SearchOutcome::CapHit(why) => Verdict::Inconclusive(why.to_string()),
        SearchOutcome::Found(w) => Verdict::Sat(Box::new(certify(pair, &sig, w)?)),
    };
    Ok(Decision { verdict, stats })
}

fn user_signature(sig: &Signature) -> Signature {
    Signature::new(
        sig.letters()
            .iter()
            .map(|l| l.as_ref())
            .filter(|l| !l.contains('#')),
    )
    .expect("subset of a valid signature")
}

fn certify(
    pair: &WorkingPair,
    sig: &Arc<Signature>,
    word: Vec<LetterSet>,
) -> Result<Certificate, DecideError> {
    let word =
        EncodedWord::new(word).map_err(|_| DecideError::Certificate("empty witness".into()))?;
    let expansion = IntervalStructure::new(sig.clone(), word.letters().to_vec())?;
    if !evaluate(&expansion, expansion.top(), &pair.psi)? {
        return Err(DecideError::Certificate(format!(
            "psi fails on {expansion:?}"
        )));
    }
    if !valid_over(&expansion, &pair.xi)? {
        return Err(DecideError::Certificate(format!(
            "xi fails somewhere on {expansion:?}"
        )));
    }
    let restriction = expansion.project(Arc::new(user_signature(sig)));
    Ok(Certificate {
        word,
        expansion,
        restriction,
        verified: true,
    })
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub decide: DecideOptions,
    pub normalize: NormalizeOptions,
    /// Letters of the user signature beyond those of the input.
    pub signature: Option<Signature>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub hnf: Formula,
    pub trace: NormalizationTrace,
    pub decision: Decision,
}

impl Solution {
    pub fn pair(&self) -> &WorkingPair {
        &self.trace.pair
    }
}

/// The whole pipeline: homogeneous normal form, normalization, search. A
/// witness is also checked against the input formula on the user letters.
pub fn solve(f: &Formula, opts: &SolveOptions) -> Result<Solution, DecideError> {
    let hnf = f.to_homogeneous_nf();
    let mut sig = opts.signature.clone().unwrap_or_default();
    for l in f.letters() {
        sig.ensure(&l).map_err(AutomatonError::from)?;
    }
    let (pair, trace) = normalize_with(&hnf, sig, opts.normalize)?;
    let decision = decide_sat_with(&pair, &opts.decide)?;
    if let Verdict::Sat(cert) = &decision.verdict {
        let r = &cert.restriction;
        if !evaluate(r, r.top(), f)? {
            return Err(DecideError::Certificate(format!("input fails on {r:?}")));
        }
    }
    Ok(Solution {
        hnf,
        trace,
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::normalize::normalize;

    fn pair(psi: &str, xi: &str, letters: &[&str]) -> WorkingPair {
        WorkingPair::new(
            parse(psi).unwrap(),
            parse(xi).unwrap(),
            Signature::new(letters.iter().copied()).unwrap(),
        )
    }

    #[test]
    fn falsum_is_unsat() {
        let d = decide_sat(&pair("false", "true", &[])).unwrap();
        assert!(matches!(d.verdict, Verdict::Unsat));
        let d = decide_sat(&pair("pi & ~pi", "true", &[])).unwrap();
        assert!(matches!(d.verdict, Verdict::Unsat));
    }

    #[test]
    fn global_constraint_is_enforced() {
        let d = decide_sat(&pair("<B>true", "pi", &[])).unwrap();
        assert!(matches!(d.verdict, Verdict::Unsat));
        let d = decide_sat(&pair("<B>(pi & p)", "~(pi & q)", &["p", "q"])).unwrap();
        let c = d.verdict.certificate().unwrap();
        assert_eq!(
            c.restriction.point_names(),
            vec![vec!["p".to_string()], vec![]]
        );
    }

    #[test]
    fn example_one() {
        let (pair, trace) = normalize(&parse("<B><B><E>(pi & p)").unwrap()).unwrap();
        assert_eq!(trace.steps.len(), 1);
        let d = decide_sat(&pair).unwrap();
        let c = d.verdict.certificate().expect("sat");
        assert!(c.verified);
        let names = c.restriction.point_names();
        assert_eq!(names.len(), 4);
        assert_eq!(names[1], vec!["p".to_string()]);
    }

    #[test]
    fn tag_blocks_need_clean_bits() {
        let block = FreshLetterBlock::new(1, 2);
        let dec = dec_formula(&block);
        let mut sig = Signature::new(["p"]).unwrap();
        for l in block.letters() {
            sig.push(l).unwrap();
        }
        let psi = Formula::hs_b(dec.clone());
        assert_eq!(tag_blocks(&sig, &[&psi]).len(), 1);
        let leak = Formula::and(psi, Formula::hs_e(Formula::point("bit2#1")));
        assert!(tag_blocks(&sig, &[&leak]).is_empty());
    }

    #[test]
    fn solve_checks_input() {
        let s = solve(&parse("p & <E>~q").unwrap(), &SolveOptions::default()).unwrap();
        let c = s.decision.verdict.certificate().unwrap();
        assert!(evaluate(
            &c.restriction,
            c.restriction.top(),
            &parse("p & <E>~q").unwrap()
        )
        .unwrap());
    }
}
