//! Randomized laws over formulas, structures and the normal forms.

mod common;

use std::sync::Arc;

use proptest::prelude::*;

use besat::automaton::{Complement, ForwardNfa, Infix, Nfa};
use besat::formula::{parse, Formula, LetterSet};
use besat::gen::{gen_be_formula, gen_formula, GenConfig};
use besat::normalize::normalize;
use besat::semantics::{
    evaluate, oracle_sat, prefix_minimal, suffix_minimal, valid_over, Interval, IntervalStructure,
};

/// Measured maximum of `|hnf(f)| / |f|`; the rewrite is linear.
const HNF_FACTOR: usize = 13;
/// Measured maximum of `|psi & [G]xi| / |f|^2` on inputs of size at most 20.
const NF_FACTOR: usize = 300;

fn be_cfg() -> GenConfig {
    GenConfig {
        seed: 11,
        max_formula_size: 12,
        max_depth: 5,
        ..Default::default()
    }
}

fn be_formula() -> impl Strategy<Value = Formula> {
    any::<u64>().prop_map(|i| gen_be_formula(&be_cfg(), i))
}

fn formula() -> impl Strategy<Value = Formula> {
    any::<u64>().prop_map(|i| gen_formula(&be_cfg(), i))
}

fn structure() -> impl Strategy<Value = IntervalStructure> {
    prop::collection::vec(0u32..4, 1..=5).prop_map(|masks| {
        let points = masks
            .into_iter()
            .map(|m| (0..2).filter(|b| m >> b & 1 == 1).collect::<LetterSet>())
            .collect();
        IntervalStructure::new(common::sig_pq(), points).unwrap()
    })
}

fn interval_in(s: &IntervalStructure, a: usize, b: usize) -> Interval {
    let (x, y) = (a % s.len(), b % s.len());
    Interval::new(x.min(y), x.max(y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(f in formula(), g in be_formula()) {
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
        prop_assert_eq!(parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn canonical_keeps_depth(f in be_formula()) {
        let c = f.canonical();
        prop_assert_eq!(c.depth(), f.depth());
        prop_assert_eq!(c.canonical(), c);
    }

    #[test]
    fn hnf_is_equivalent_and_linear(f in be_formula(), s in structure(), a in any::<usize>(), b in any::<usize>()) {
        let h = f.to_homogeneous_nf();
        prop_assert!(h.is_homogeneous_nf());
        prop_assert!(h.size() <= HNF_FACTOR * f.size());
        let i = interval_in(&s, a, b);
        prop_assert_eq!(evaluate(&s, i, &h).unwrap(), evaluate(&s, i, &f).unwrap());
    }

    #[test]
    fn modal_args_fit_in_size(f in formula()) {
        prop_assert!(f.size() >= f.b_args().len() + f.e_args().len());
    }

    #[test]
    fn labels_are_intersections(s in structure(), a in any::<usize>(), b in any::<usize>()) {
        let i = interval_in(&s, a, b);
        let label = s.label(i);
        for p in 0..2u32 {
            let everywhere = (i.lo..=i.hi).all(|x| s.points()[x].contains(p));
            prop_assert_eq!(label.contains(p), everywhere);
        }
    }

    #[test]
    fn restriction_keeps_truth(f in formula(), s in structure(), a in any::<usize>(), b in any::<usize>()) {
        let i = interval_in(&s, a, b);
        let r = s.restrict(i);
        prop_assert_eq!(r.len(), i.len());
        prop_assert_eq!(evaluate(&r, r.top(), &f).unwrap(), evaluate(&s, i, &f).unwrap());
    }

    #[test]
    fn structure_json_round_trip(s in structure()) {
        let text = s.to_json().to_string();
        let back = IntervalStructure::from_json(&text, s.signature()).unwrap();
        prop_assert_eq!(back.points(), s.points());
    }

    #[test]
    fn minimal_intervals_by_definition(f in formula(), s in structure()) {
        let holds = |i: Interval| evaluate(&s, i, &f).unwrap();
        let pre: Vec<Interval> = s.intervals().filter(|&i| holds(i) && (i.lo..i.hi).all(|h| !holds(Interval::new(i.lo, h)))).collect();
        let suf: Vec<Interval> = s.intervals().filter(|&i| holds(i) && (i.lo + 1..=i.hi).all(|l| !holds(Interval::new(l, i.hi)))).collect();
        prop_assert_eq!(prefix_minimal(&s, &f).unwrap().into_iter().collect::<Vec<_>>(), pre);
        prop_assert_eq!(suffix_minimal(&s, &f).unwrap().into_iter().collect::<Vec<_>>(), suf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_shallow_and_bounded(f in formula()) {
        let (pair, trace) = normalize(&f).unwrap();
        prop_assert!(pair.is_shallow());
        prop_assert!(pair.psi.is_homogeneous_nf() && pair.xi.is_homogeneous_nf());
        prop_assert!(trace.steps.len() <= f.deep_subformula_count());
        let n = f.size();
        prop_assert!(pair.as_formula().size() <= NF_FACTOR * n * n);
    }

    #[test]
    fn oracle_models_are_models(f in formula()) {
        if let Some((s, i)) = oracle_sat(&f, 3) {
            prop_assert!(evaluate(&s, i, &f).unwrap());
        }
    }
}

fn sorted_words(n: usize) -> Vec<Vec<LetterSet>> {
    let letters: Vec<LetterSet> = (0..4u32)
        .map(|m| (0..2).filter(|b| m >> b & 1 == 1).collect())
        .collect();
    let mut words: Vec<Vec<LetterSet>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..n {
        words = words
            .iter()
            .flat_map(|w| {
                letters.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(a.clone());
                    w
                })
            })
            .collect();
        all.extend(words.iter().cloned());
    }
    all
}

#[test]
fn global_closure_accepts_valid_words() {
    let sig = common::sig_pq();
    let words = sorted_words(4);
    for xi in common::depth2_corpus().iter().take(25) {
        let xi = xi.to_homogeneous_nf();
        let bad = ForwardNfa::new(&Formula::not(xi.clone()), sig.clone()).unwrap();
        let valid = Complement(Infix(bad));
        for w in &words {
            let s = IntervalStructure::new(Arc::clone(&sig), w.clone()).unwrap();
            assert_eq!(
                valid.accepts(w),
                valid_over(&s, &xi).unwrap(),
                "{xi} on {:?}",
                s.point_names()
            );
        }
    }
}

#[test]
fn example_one_minimal_intervals() {
    let f = parse("<B><E>(pi & p)").unwrap();
    let sig = Arc::new(besat::formula::Signature::new(["p"]).unwrap());
    for x in 0..5 {
        let points = (0..6).map(|i| if i == x { vec!["p"] } else { vec![] });
        let s = IntervalStructure::from_names(sig.clone(), points).unwrap();
        let want: Vec<Interval> = (0..x).map(|y| Interval::new(y, x + 1)).collect();
        assert_eq!(
            prefix_minimal(&s, &f)
                .unwrap()
                .into_iter()
                .collect::<Vec<_>>(),
            want
        );
    }
}
