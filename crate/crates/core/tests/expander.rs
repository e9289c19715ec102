//! The encoding of minimal witnesses, checked by exhaustive search over
//! expansions of small structures.

use std::sync::Arc;

use besat::formula::{parse, Dag, Formula, LetterSet, NodeId, Signature};
use besat::gen::all_structures_up_to;
use besat::normalize::{
    dec_formula, enc_dec_suffix_variant, enc_formula, normalize, FreshLetterBlock,
};
use besat::semantics::{
    oracle_sat, oracle_sat_pair, valid_over, Interval, IntervalStructure, TruthTable,
};

struct Search<'a> {
    table: TruthTable,
    enc: NodeId,
    lhs: NodeId,
    rhs: NodeId,
    base: &'a [LetterSet],
    marks: [u32; 3],
    bits: Vec<u32>,
    tags: u32,
    valid: usize,
}

impl Search<'_> {
    /// Depth-first over expansions, bit vectors up to renaming. Returns
    /// false if an expansion makes `enc` valid and the two sides differ.
    fn go(&mut self) -> bool {
        let k = self.table.len();
        if k == self.base.len() {
            self.valid += 1;
            return (0..k)
                .flat_map(|lo| (lo..k).map(move |hi| Interval::new(lo, hi)))
                .all(|i| self.table.value(self.lhs, i) == self.table.value(self.rhs, i));
        }
        for mark in 0..8u32 {
            for tag in 0..=self.tags {
                let mut label = self.base[k].clone();
                for (b, &l) in self.marks.iter().enumerate() {
                    if mark >> b & 1 == 1 {
                        label.insert(l);
                    }
                }
                for (b, &l) in self.bits.iter().enumerate() {
                    if tag >> b & 1 == 1 {
                        label.insert(l);
                    }
                }
                self.table.push(label);
                if (0..=k).all(|lo| self.table.value(self.enc, Interval::new(lo, k))) {
                    let fresh = tag == self.tags;
                    self.tags += fresh as u32;
                    let ok = self.go();
                    self.tags -= fresh as u32;
                    if !ok {
                        return false;
                    }
                }
                self.table.pop();
            }
        }
        true
    }
}

/// For every structure over `{p}` with at most four points: some expansion
/// makes `enc` valid, and on every such expansion `<X>phi` and `<X>dec`
/// agree everywhere.
fn check_expander(phi: &str, suffix: bool) {
    let phi = parse(phi).unwrap();
    let block = FreshLetterBlock::new(1, 4 * phi.size());
    let (dec, enc) = if suffix {
        enc_dec_suffix_variant(&phi, &block)
    } else {
        let dec = dec_formula(&block);
        let enc = enc_formula(&phi, &dec);
        (dec, enc)
    };
    let (lhs, rhs) = if suffix {
        (Formula::hs_e(phi.clone()), Formula::hs_e(dec))
    } else {
        (Formula::hs_b(phi.clone()), Formula::hs_b(dec))
    };
    let mut sig = Signature::new(["p"]).unwrap();
    for l in block.letters() {
        sig.push(l).unwrap();
    }
    let mut dag = Dag::new();
    let enc = dag.add(&enc, &sig).unwrap();
    let lhs = dag.add(&lhs, &sig).unwrap();
    let rhs = dag.add(&rhs, &sig).unwrap();
    let dag = Arc::new(dag);
    let id = |l: &str| sig.get(l).unwrap();
    let marks = [id(&block.ell), id(&block.r), id(&block.s)];
    let bits: Vec<u32> = block.bits.iter().map(|b| id(b)).collect();
    let user = Arc::new(Signature::new(["p"]).unwrap());
    for s in all_structures_up_to(user, 4) {
        let base: Vec<LetterSet> = s
            .points()
            .iter()
            .map(|p| sig.set(s.signature().names(p)).unwrap())
            .collect();
        let mut search = Search {
            table: TruthTable::new(dag.clone()),
            enc,
            lhs,
            rhs,
            base: &base,
            marks,
            bits: bits.clone(),
            tags: 0,
            valid: 0,
        };
        assert!(search.go(), "{phi}: sides differ on an expansion of {s:?}");
        assert!(
            search.valid > 0,
            "{phi}: no expansion of {s:?} makes enc valid"
        );
    }
}

#[test]
fn expander_prefix() {
    check_expander("<B><E>(pi & p)", false);
}

#[test]
fn expander_suffix() {
    check_expander("<E><B>(pi & p)", true);
}

#[test]
fn point_enc_is_met_by_marking_s() {
    let phi = parse("pi & p").unwrap();
    let block = FreshLetterBlock::new(1, 4);
    let enc = enc_formula(&phi, &dec_formula(&block));
    let mut sig = Signature::new(["p"]).unwrap();
    for l in block.letters() {
        sig.push(l).unwrap();
    }
    let sig = Arc::new(sig);
    let user = Arc::new(Signature::new(["p"]).unwrap());
    for s in all_structures_up_to(user, 4) {
        let points = s.point_names().into_iter().map(|mut p| {
            if !p.is_empty() {
                p.push(block.s.to_string());
            }
            p
        });
        let x = IntervalStructure::from_names(sig.clone(), points).unwrap();
        assert!(valid_over(&x, &enc).unwrap(), "{x:?}");
    }
}

#[test]
fn suffix_dec_is_the_same_formula() {
    let block = FreshLetterBlock::new(3, 8);
    let (dec, enc) = enc_dec_suffix_variant(&parse("<E><B>(pi & p)").unwrap(), &block);
    assert_eq!(dec, dec_formula(&block));
    assert_eq!(enc.depth(), 2);
    let deep = parse("<E><B><E>(pi & p)").unwrap();
    assert_eq!(enc_dec_suffix_variant(&deep, &block).1.depth(), 3);
}

#[test]
fn suffix_redex_is_equisatisfiable() {
    for text in [
        "<E><E><B>(pi & p)",
        "<E><E><B>(pi & p) & [E]~(pi & p)",
        "<E><E><B>(pi & p) & ~<B>true",
    ] {
        let f = parse(text).unwrap();
        let (pair, trace) = normalize(&f).unwrap();
        assert_eq!(trace.steps.len(), 1);
        let a = oracle_sat(&f, 5).is_some();
        let b = oracle_sat_pair(&pair, 5).is_some();
        assert_eq!(a, b, "{text}");
    }
}
