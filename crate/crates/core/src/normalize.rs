//! Rewriting into the shallow normal form `psi & [G]xi`, both parts of depth
//! at most two.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Dir, Formula, Letter, Node, Signature, SignatureError, WorkingPair};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("input is not in homogeneous normal form")]
    NotHomogeneous,
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// Fresh letters `bit1#k .. bitm#k`, `ell#k`, `r#k`, `s#k` of step `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreshLetterBlock {
    pub step: usize,
    pub m: usize,
    pub ell: Letter,
    pub r: Letter,
    pub s: Letter,
    pub bits: Vec<Letter>,
}

impl FreshLetterBlock {
    pub fn new(step: usize, m: usize) -> Self {
        let name = |base: &str| -> Letter { Arc::from(format!("{base}#{step}")) };
        FreshLetterBlock {
            step,
            m,
            ell: name("ell"),
            r: name("r"),
            s: name("s"),
            bits: (1..=m).map(|i| name(&format!("bit{i}"))).collect(),
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = &Letter> {
        self.bits.iter().chain([&self.ell, &self.r, &self.s])
    }
}

/// `(<B>(pi & ell) & <E>(pi & r) & /\_i (<B>(pi & p_i) <-> <E>(pi & p_i))) | (pi & s)`
pub fn dec_formula(block: &FreshLetterBlock) -> Formula {
    let mut conj = vec![
        Formula::hs_b(Formula::point(&block.ell)),
        Formula::hs_e(Formula::point(&block.r)),
    ];
    for p in &block.bits {
        conj.push(Formula::iff(
            Formula::hs_b(Formula::point(p)),
            Formula::hs_e(Formula::point(p)),
        ));
    }
    Formula::or(Formula::and_all(conj), Formula::point(&block.s))
}

fn enc_with(phi: &Formula, dec: &Formula, dir: Dir) -> Formula {
    let fresh = Formula::not(Formula::hs(dir, dec.clone()));
    Formula::and(
        Formula::implies(Formula::and(dec.clone(), fresh.clone()), phi.clone()),
        Formula::implies(Formula::and(phi.clone(), fresh), dec.clone()),
    )
}

/// `(dec & ~<B>dec -> phi) & (phi & ~<B>dec -> dec)`
pub fn enc_formula(phi: &Formula, dec: &Formula) -> Formula {
    enc_with(phi, dec, Dir::B)
}

/// The mirror image for `<E>phi`: the same `dec`, guarded by `~<E>dec`.
pub fn enc_dec_suffix_variant(phi: &Formula, block: &FreshLetterBlock) -> (Formula, Formula) {
    let dec = dec_formula(block);
    let enc = enc_with(phi, &dec, Dir::E);
    (dec, enc)
}

#[derive(Clone, Debug)]
pub struct NormalizationStep {
    pub step: usize,
    pub dir: Dir,
    pub phi: Formula,
    pub block: FreshLetterBlock,
    pub dec: Formula,
    pub enc: Formula,
}

impl NormalizationStep {
    pub fn redex(&self) -> Formula {
        Formula::hs(self.dir, self.phi.clone())
    }
}

#[derive(Clone, Debug)]
pub struct NormalizationTrace {
    pub steps: Vec<NormalizationStep>,
    pub pair: WorkingPair,
    /// Set when `m` was lowered below `4|phi|`; results are then not
    /// guaranteed to be equi-satisfiable.
    pub unsound_m: Option<usize>,
}

impl NormalizationTrace {
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct StepJson {
            step: usize,
            direction: &'static str,
            redex: String,
            phi: String,
            m: usize,
            letters: Vec<String>,
            dec: String,
            enc: String,
        }
        #[derive(Serialize)]
        struct TraceJson<'a> {
            steps: Vec<StepJson>,
            psi: String,
            xi: String,
            signature: &'a Signature,
            #[serde(skip_serializing_if = "Option::is_none")]
            unsound_m: Option<usize>,
        }
        let steps = self
            .steps
            .iter()
            .map(|s| StepJson {
                step: s.step,
                direction: match s.dir {
                    Dir::B => "B",
                    Dir::E => "E",
                },
                redex: s.redex().to_string(),
                phi: s.phi.to_string(),
                m: s.block.m,
                letters: s.block.letters().map(|l| l.to_string()).collect(),
                dec: s.dec.to_string(),
                enc: s.enc.to_string(),
            })
            .collect();
        serde_json::to_value(TraceJson {
            steps,
            psi: self.pair.psi.to_string(),
            xi: self.pair.xi.to_string(),
            signature: &self.pair.signature,
            unsound_m: self.unsound_m,
        })
        .expect("trace serializes")
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NormalizeOptions {
    /// Replaces `m = 4|phi|` by a fixed value. Experimental.
    pub unsound_m: Option<usize>,
}

/// Leftmost-outermost `<X>phi` of depth above two that is not under a modal
/// operator.
fn find_redex(f: &Formula) -> Option<(Dir, Formula)> {
    match f.node() {
        Node::HsB(a) if f.depth() > 2 => Some((Dir::B, a.clone())),
        Node::HsE(a) if f.depth() > 2 => Some((Dir::E, a.clone())),
        Node::Not(a) => find_redex(a),
        Node::And(a, b) | Node::Or(a, b) => find_redex(a).or_else(|| find_redex(b)),
        _ => None,
    }
}

/// Splits off top-level `[G]` conjuncts, which seed `xi`.
fn split_global(f: &Formula) -> (Formula, Formula) {
    fn walk<'a>(f: &'a Formula, rest: &mut Vec<&'a Formula>, global: &mut Vec<&'a Formula>) {
        match f.node() {
            Node::And(a, b) => {
                walk(a, rest, global);
                walk(b, rest, global);
            }
            Node::BoxG(a) => global.push(a),
            _ => rest.push(f),
        }
    }
    let (mut rest, mut global) = (Vec::new(), Vec::new());
    walk(f, &mut rest, &mut global);
    if global.is_empty() {
        return (f.canonical(), Formula::top());
    }
    let psi = Formula::and_all(rest.into_iter().map(Formula::canonical));
    let xi = Formula::and_all(global.into_iter().map(Formula::canonical));
    (psi, xi)
}

fn next_step(sig: &Signature) -> usize {
    sig.letters()
        .iter()
        .filter_map(|l| {
            l.rsplit_once('#')
                .and_then(|(_, k)| k.parse::<usize>().ok())
        })
        .max()
        .map_or(1, |k| k + 1)
}

pub fn normalize(psi: &Formula) -> Result<(WorkingPair, NormalizationTrace), NormalizeError> {
    let sig = Signature::new(psi.letters().iter().map(|l| l.as_ref()))?;
    normalize_with(psi, sig, NormalizeOptions::default())
}

/// Normalizes over a given base signature, which must contain the letters of
/// `psi`.
pub fn normalize_with(
    psi: &Formula,
    mut sig: Signature,
    opts: NormalizeOptions,
) -> Result<(WorkingPair, NormalizationTrace), NormalizeError> {
    if !psi.is_homogeneous_nf() {
        return Err(NormalizeError::NotHomogeneous);
    }
    for l in psi.letters() {
        sig.lookup(&l)?;
    }
    let (mut cur, mut xi) = split_global(psi);
    let mut steps = Vec::new();
    let mut k = next_step(&sig);
    while let Some((dir, phi)) = find_redex(&cur).or_else(|| find_redex(&xi)) {
        let m = opts.unsound_m.unwrap_or(4 * phi.size());
        let block = FreshLetterBlock::new(k, m);
        for l in block.letters() {
            sig.push(l)?;
        }
        let dec = dec_formula(&block);
        let enc = enc_with(&phi, &dec, dir);
        let from = Formula::hs(dir, phi.clone());
        let to = Formula::hs(dir, dec.clone());
        cur = cur.substitute(&from, &to);
        xi = if xi == Formula::top() {
            enc.clone()
        } else {
            Formula::and(xi.substitute(&from, &to), enc.clone())
        };
        steps.push(NormalizationStep {
            step: k,
            dir,
            phi,
            block,
            dec,
            enc,
        });
        k += 1;
    }
    let pair = WorkingPair::new(cur, xi, sig);
    debug_assert!(pair.is_shallow());
    let trace = NormalizationTrace {
        steps,
        pair: pair.clone(),
        unsound_m: opts.unsound_m,
    };
    Ok((pair, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn dec_shapes() {
        let b0 = FreshLetterBlock::new(1, 0);
        assert_eq!(
            dec_formula(&b0),
            f("<B>(pi & ell#1) & <E>(pi & r#1) | (pi & s#1)")
        );
        let b2 = FreshLetterBlock::new(3, 2);
        let want = f("<B>(pi & ell#3) & <E>(pi & r#3) \
                      & (<B>(pi & bit1#3) <-> <E>(pi & bit1#3)) \
                      & (<B>(pi & bit2#3) <-> <E>(pi & bit2#3)) | (pi & s#3)");
        assert_eq!(dec_formula(&b2), want);
        for m in [0, 1, 5, 12] {
            assert_eq!(dec_formula(&FreshLetterBlock::new(1, m)).depth(), 1);
        }
    }

    #[test]
    fn enc_depths() {
        let dec = dec_formula(&FreshLetterBlock::new(1, 3));
        for s in [
            "pi & p",
            "<B>(pi & p)",
            "<B><E>(pi & p)",
            "<B><E><B>(pi & p)",
        ] {
            let phi = f(s);
            let want = phi.depth().max(2);
            assert_eq!(enc_formula(&phi, &dec).depth(), want);
            let (dec_e, enc_e) = enc_dec_suffix_variant(&phi, &FreshLetterBlock::new(1, 3));
            assert_eq!(dec_e, dec);
            assert_eq!(enc_e.depth(), want);
        }
    }

    #[test]
    fn shallow_input_is_untouched() {
        let psi = f("<B><E>(pi & p) & ~(pi & q)");
        let (pair, trace) = normalize(&psi).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(pair.psi, psi);
        assert_eq!(pair.xi, Formula::top());
    }

    #[test]
    fn nested_example_one_step() {
        let psi = f("<B><B><E>(pi & p)");
        let (pair, trace) = normalize(&psi).unwrap();
        assert_eq!(trace.steps.len(), 1);
        let st = &trace.steps[0];
        assert_eq!(st.dir, Dir::B);
        assert_eq!(st.phi, f("<B><E>(pi & p)"));
        assert_eq!(st.block.m, 12);
        assert_eq!(pair.psi, Formula::hs_b(st.dec.clone()));
        assert_eq!(pair.xi, enc_formula(&st.phi, &st.dec));
        assert_eq!(pair.signature.len(), 1 + 12 + 3);
        assert!(pair.is_shallow());
    }

    #[test]
    fn replaces_every_occurrence() {
        let psi = f("<B><B><E>(pi & p) & ~<E><B><B><E>(pi & p)");
        let (pair, trace) = normalize(&psi).unwrap();
        assert!(pair.is_shallow());
        let first = trace.steps[0].redex();
        assert_eq!(first, f("<B><B><E>(pi & p)"));
        assert!(!pair.psi.subformulas().contains(&first));
        assert!(!pair.xi.subformulas().contains(&first));
        assert!(trace.steps.len() <= psi.deep_subformula_count());
    }

    #[test]
    fn rejects_bare_letters() {
        assert_eq!(
            normalize(&f("<B>p")).unwrap_err(),
            NormalizeError::NotHomogeneous
        );
    }

    #[test]
    fn renormalizing_output_is_a_no_op() {
        let (pair, _) = normalize(&f("<E><B><E><B>(pi & p)")).unwrap();
        let text = pair.as_formula().to_string();
        let again = parse(&text).unwrap();
        let (_, trace) =
            normalize_with(&again, pair.signature.clone(), NormalizeOptions::default()).unwrap();
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn step_numbers_continue() {
        let sig = Signature::new(["p", "ell#4"]).unwrap();
        let (_, trace) =
            normalize_with(&f("<B><B><E>(pi & p)"), sig, NormalizeOptions::default()).unwrap();
        assert_eq!(trace.steps[0].step, 5);
    }

    #[test]
    fn trace_json_fields() {
        let (_, trace) = normalize(&f("<B><B><E>(pi & p)")).unwrap();
        let j = trace.to_json();
        assert_eq!(j["steps"][0]["m"], 12);
        assert_eq!(j["steps"][0]["direction"], "B");
        assert_eq!(j["steps"].as_array().unwrap().len(), 1);
        assert!(j.get("unsound_m").is_none());
    }
}
