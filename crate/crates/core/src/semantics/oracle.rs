//! Brute-force satisfiability by enumerating small structures.

use std::sync::Arc;

use varisat::{ExtendFormula, Lit, Solver};

use super::{Interval, IntervalStructure, TruthTable};
use crate::formula::{Dag, DagNode, Formula, LetterSet, NodeId, Signature, WorkingPair};

fn mask_to_set(mask: u32, letters: &[u32]) -> LetterSet {
    letters
        .iter()
        .enumerate()
        .filter(|(b, _)| mask >> b & 1 == 1)
        .map(|(_, &l)| l)
        .collect()
}

/// First model of `f` with at most `max_points` points.
///
/// Structures are enumerated by size, then lexicographically on the label
/// sequence, where a label is read as a bitmask over the letters of `f` in
/// sorted order. Within a structure, intervals are tried by `(lo, hi)`.
pub fn oracle_sat(f: &Formula, max_points: usize) -> Option<(IntervalStructure, Interval)> {
    let sig = Arc::new(
        Signature::new(f.letters().iter().map(|l| l.as_ref()))
            .expect("letters of a formula are valid"),
    );
    let mut dag = Dag::new();
    let root = dag.add(f, &sig).expect("signature covers the formula");
    let letters: Vec<u32> = (0..sig.len() as u32).collect();
    assert!(
        letters.len() < 20,
        "signature too large for exhaustive search"
    );
    let labels: Vec<LetterSet> = (0..1u32 << letters.len())
        .map(|m| mask_to_set(m, &letters))
        .collect();
    let dag = Arc::new(dag);
    for n in 1..=max_points {
        let mut t = TruthTable::new(dag.clone());
        if let Some(i) = search_fixed(&mut t, root, &labels, n) {
            let s = IntervalStructure::new(sig, t.labels().to_vec()).expect("non-empty");
            return Some((s, i));
        }
    }
    None
}

fn search_fixed(
    t: &mut TruthTable,
    root: NodeId,
    labels: &[LetterSet],
    n: usize,
) -> Option<Interval> {
    if t.len() == n {
        return (0..n)
            .flat_map(|lo| (lo..n).map(move |hi| Interval::new(lo, hi)))
            .find(|&i| t.value(root, i));
    }
    for l in labels {
        t.push(l.clone());
        if let Some(i) = search_fixed(t, root, labels, n) {
            return Some(i);
        }
        t.pop();
    }
    None
}

/// A propositional value: a constant or a solver literal.
#[derive(Clone, Copy)]
enum Val {
    Const(bool),
    Var(Lit),
}

impl std::ops::Not for Val {
    type Output = Val;

    fn not(self) -> Val {
        match self {
            Val::Const(b) => Val::Const(!b),
            Val::Var(l) => Val::Var(!l),
        }
    }
}

/// Tseitin encoding of `psi & [G]xi` over a fixed number of points.
struct Encoding {
    solver: Solver<'static>,
    n: usize,
    // vals[node][lo * n + hi]
    vals: Vec<Vec<Val>>,
    letters: Vec<Vec<Lit>>,
}

impl Encoding {
    fn new(dag: &Dag, nletters: usize, n: usize) -> Self {
        let mut solver = Solver::new();
        let letters = (0..n)
            .map(|_| (0..nletters).map(|_| solver.new_lit()).collect())
            .collect();
        let mut e = Encoding {
            solver,
            n,
            vals: Vec::with_capacity(dag.len()),
            letters,
        };
        for id in 0..dag.len() as NodeId {
            let mut row = vec![Val::Const(false); n * n];
            for len in 0..n {
                for lo in 0..n - len {
                    row[lo * n + lo + len] = e.node(dag.node(id), &row, lo, lo + len);
                }
            }
            e.vals.push(row);
        }
        e
    }

    fn at(&self, node: NodeId, lo: usize, hi: usize) -> Val {
        self.vals[node as usize][lo * self.n + hi]
    }

    // `own` holds the values of the node being encoded on shorter intervals.
    fn node(&mut self, node: DagNode, own: &[Val], lo: usize, hi: usize) -> Val {
        let n = self.n;
        match node {
            DagNode::True => Val::Const(true),
            DagNode::False => Val::Const(false),
            DagNode::Pi => Val::Const(lo == hi),
            DagNode::Atom(p) => {
                let xs: Vec<Val> = (lo..=hi)
                    .map(|i| Val::Var(self.letters[i][p as usize]))
                    .collect();
                self.all(&xs)
            }
            DagNode::Not(a) => !self.at(a, lo, hi),
            DagNode::And(a, b) => self.all(&[self.at(a, lo, hi), self.at(b, lo, hi)]),
            DagNode::Or(a, b) => self.any(&[self.at(a, lo, hi), self.at(b, lo, hi)]),
            DagNode::HsB(a) => {
                let xs: Vec<Val> = (lo..hi).map(|h| self.at(a, lo, h)).collect();
                self.any(&xs)
            }
            DagNode::BoxB(a) => {
                let xs: Vec<Val> = (lo..hi).map(|h| self.at(a, lo, h)).collect();
                self.all(&xs)
            }
            DagNode::HsE(a) => {
                let xs: Vec<Val> = (lo + 1..=hi).map(|l| self.at(a, l, hi)).collect();
                self.any(&xs)
            }
            DagNode::BoxE(a) => {
                let xs: Vec<Val> = (lo + 1..=hi).map(|l| self.at(a, l, hi)).collect();
                self.all(&xs)
            }
            DagNode::BoxG(a) => {
                let mut xs = vec![self.at(a, lo, hi)];
                if lo < hi {
                    xs.push(own[lo * n + hi - 1]);
                    xs.push(own[(lo + 1) * n + hi]);
                }
                self.all(&xs)
            }
        }
    }

    fn all(&mut self, xs: &[Val]) -> Val {
        !self.any(&xs.iter().map(|&x| !x).collect::<Vec<_>>())
    }

    fn any(&mut self, xs: &[Val]) -> Val {
        let mut lits = Vec::new();
        for &x in xs {
            match x {
                Val::Const(true) => return Val::Const(true),
                Val::Const(false) => {}
                Val::Var(l) => lits.push(l),
            }
        }
        match lits[..] {
            [] => Val::Const(false),
            [l] => Val::Var(l),
            _ => {
                let y = self.solver.new_lit();
                let mut clause = vec![!y];
                clause.extend(&lits);
                self.solver.add_clause(&clause);
                for &l in &lits {
                    self.solver.add_clause(&[y, !l]);
                }
                Val::Var(y)
            }
        }
    }

    fn require(&mut self, v: Val) {
        match v {
            Val::Const(true) => {}
            Val::Const(false) => self.solver.add_clause(&[]),
            Val::Var(l) => self.solver.add_clause(&[l]),
        }
    }
}

/// Bounded search for a model of `psi & [G]xi`.
///
/// Any model restricts to one on the points of the satisfying interval, so
/// for each size `n` up to `max_points` the structure of exactly `n` points
/// with `psi` on the whole domain and `xi` on every interval is encoded as a
/// propositional formula and handed to a SAT solver. Returns a model of the
/// smallest size.
pub fn oracle_sat_pair(
    pair: &WorkingPair,
    max_points: usize,
) -> Option<(IntervalStructure, Interval)> {
    let sig = Arc::new(pair.signature.clone());
    let mut dag = Dag::new();
    let psi = dag.add(&pair.psi, &sig).expect("signature covers psi");
    let xi = dag.add(&pair.xi, &sig).expect("signature covers xi");
    for n in 1..=max_points {
        let mut e = Encoding::new(&dag, sig.len(), n);
        e.require(e.at(psi, 0, n - 1));
        for lo in 0..n {
            for hi in lo..n {
                e.require(e.at(xi, lo, hi));
            }
        }
        if !e.solver.solve().expect("no proof or interrupt configured") {
            continue;
        }
        let model: LetterSet = e
            .solver
            .model()
            .expect("solved")
            .into_iter()
            .filter(|l| l.is_positive())
            .map(|l| l.index() as u32)
            .collect();
        let points = e
            .letters
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, l)| model.contains(l.index() as u32))
                    .map(|(p, _)| p as u32)
                    .collect()
            })
            .collect();
        let s = IntervalStructure::new(sig, points).expect("non-empty");
        return Some((s, Interval::new(0, n - 1)));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn falsum_has_no_model() {
        assert!(oracle_sat(&Formula::bot(), 4).is_none());
    }

    #[test]
    fn smallest_point_model() {
        let (s, i) = oracle_sat(&parse("pi & p").unwrap(), 3).unwrap();
        assert_eq!(s.point_names(), vec![vec!["p".to_string()]]);
        assert_eq!(i, Interval::point(0));
    }

    #[test]
    fn nested_needs_four_points() {
        let f = parse("<B><B><E>(pi & p)").unwrap();
        assert!(oracle_sat(&f, 3).is_none());
        let (s, i) = oracle_sat(&f, 4).unwrap();
        let names: Vec<Vec<String>> = vec![vec![], vec!["p".into()], vec![], vec![]];
        assert_eq!(s.point_names(), names);
        assert_eq!(i, Interval::new(0, 3));
    }

    #[test]
    fn pair_search_plain() {
        let sig = Signature::new(["p"]).unwrap();
        let pair = WorkingPair::new(parse("<B>true").unwrap(), parse("~(pi & p)").unwrap(), sig);
        let (s, i) = oracle_sat_pair(&pair, 3).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(i, Interval::new(0, 1));
        assert!(s.points().iter().all(|p| p.is_empty()));
        let pair = WorkingPair::new(
            parse("<B>true").unwrap(),
            parse("pi").unwrap(),
            pair.signature,
        );
        assert!(oracle_sat_pair(&pair, 4).is_none());
    }

    #[test]
    fn pair_search_matches_enumeration() {
        use crate::gen::{gen_be_formula, GenConfig};
        use crate::semantics::{evaluate, valid_over};
        let cfg = GenConfig {
            seed: 3,
            max_formula_size: 6,
            ..Default::default()
        };
        let sig = Signature::new(["p", "q"]).unwrap();
        let mut found = 0;
        for i in 0..150 {
            let psi = gen_be_formula(&cfg, 2 * i);
            let xi = gen_be_formula(&cfg, 2 * i + 1);
            let whole = Formula::and(psi.clone(), Formula::box_g(xi.clone()));
            let pair = WorkingPair::new(psi.clone(), xi.clone(), sig.clone());
            let got = oracle_sat_pair(&pair, 4);
            assert_eq!(got.is_some(), oracle_sat(&whole, 4).is_some(), "{whole}");
            if let Some((s, i)) = got {
                assert!(evaluate(&s, i, &psi).unwrap() && valid_over(&s, &xi).unwrap());
                found += 1;
            }
        }
        assert!(found > 20 && found < 140, "{found}");
    }
}
