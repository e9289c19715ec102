use std::sync::Arc;

use super::Interval;
use crate::formula::{Dag, DagNode, LetterSet, NodeId};

/// Truth values of every dag node on every interval of a growing structure.
///
/// Points are appended one at a time; appending point `k` fills in all
/// intervals `[j, k]`, which only depend on intervals already present.
#[derive(Clone, Debug)]
pub struct TruthTable {
    dag: Arc<Dag>,
    labels: Vec<LetterSet>,
    // cols[k][node * (k + 1) + j] is the value on [j, k]
    cols: Vec<Vec<bool>>,
}

impl TruthTable {
    pub fn new(dag: Arc<Dag>) -> Self {
        TruthTable {
            dag,
            labels: Vec::new(),
            cols: Vec::new(),
        }
    }

    pub fn build(dag: Arc<Dag>, points: &[LetterSet]) -> Self {
        let mut t = Self::new(dag);
        for p in points {
            t.push(p.clone());
        }
        t
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[LetterSet] {
        &self.labels
    }

    pub fn value(&self, node: NodeId, i: Interval) -> bool {
        self.cols[i.hi][node as usize * (i.hi + 1) + i.lo]
    }

    pub fn pop(&mut self) {
        self.labels.pop();
        self.cols.pop();
    }

    pub fn push(&mut self, label: LetterSet) {
        let k = self.labels.len();
        self.labels.push(label);
        let w = k + 1;
        let n = self.dag.len();
        let mut inter = vec![LetterSet::new(); w];
        inter[k] = self.labels[k].clone();
        for j in (0..k).rev() {
            inter[j] = self.labels[j].intersection(&inter[j + 1]);
        }
        let mut col = vec![false; n * w];
        let cols = &self.cols;
        let at = |c: &Vec<bool>, node: NodeId, j: usize| c[node as usize * w + j];
        let old = |node: NodeId, j: usize, hi: usize| cols[hi][node as usize * (hi + 1) + j];
        for j in (0..=k).rev() {
            for id in 0..n as NodeId {
                let v = match self.dag.node(id) {
                    DagNode::True => true,
                    DagNode::False => false,
                    DagNode::Pi => j == k,
                    DagNode::Atom(p) => inter[j].contains(p),
                    DagNode::Not(a) => !at(&col, a, j),
                    DagNode::And(a, b) => at(&col, a, j) && at(&col, b, j),
                    DagNode::Or(a, b) => at(&col, a, j) || at(&col, b, j),
                    DagNode::HsB(a) => (j..k).any(|h| old(a, j, h)),
                    DagNode::BoxB(a) => (j..k).all(|h| old(a, j, h)),
                    DagNode::HsE(a) => (j + 1..=k).any(|l| at(&col, a, l)),
                    DagNode::BoxE(a) => (j + 1..=k).all(|l| at(&col, a, l)),
                    DagNode::BoxG(a) => {
                        at(&col, a, j) && (j == k || (old(id, j, k - 1) && at(&col, id, j + 1)))
                    }
                };
                col[id as usize * w + j] = v;
            }
        }
        self.cols.push(col);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Formula, Node, Signature};
    use crate::semantics::IntervalStructure;

    /// Direct recursive reading of the satisfaction clauses, no sharing.
    fn naive(s: &IntervalStructure, i: Interval, f: &Formula) -> bool {
        match f.node() {
            Node::True => true,
            Node::False => false,
            Node::Pi => i.is_singleton(),
            Node::Atom(p) => s.label(i).contains(s.signature().get(p).unwrap()),
            Node::Not(a) => !naive(s, i, a),
            Node::And(a, b) => naive(s, i, a) && naive(s, i, b),
            Node::Or(a, b) => naive(s, i, a) || naive(s, i, b),
            Node::HsB(a) => i.proper_prefixes().any(|j| naive(s, j, a)),
            Node::HsE(a) => i.proper_suffixes().any(|j| naive(s, j, a)),
            Node::BoxB(a) => i.proper_prefixes().all(|j| naive(s, j, a)),
            Node::BoxE(a) => i.proper_suffixes().all(|j| naive(s, j, a)),
            Node::BoxG(a) => (i.lo..=i.hi)
                .flat_map(|l| (l..=i.hi).map(move |h| Interval::new(l, h)))
                .all(|j| naive(s, j, a)),
        }
    }

    #[test]
    fn agrees_with_naive_reading() {
        let sig = Arc::new(Signature::new(["p", "q"]).unwrap());
        let formulas = [
            "<B><E>(pi & p)",
            "[G](p | <E>q)",
            "[B](pi | <E>(pi & q)) & ~[E]p",
            "<E>[B]~(pi & p)",
            "p & <B>q",
        ];
        let labellings: [&[&[&str]]; 3] = [
            &[&["p"], &[], &["p", "q"], &["q"]],
            &[&["p", "q"], &["p", "q"], &["p"]],
            &[&[], &["q"], &["p"], &["p"], &["q"]],
        ];
        for pts in labellings {
            let s =
                IntervalStructure::from_names(sig.clone(), pts.iter().map(|p| p.iter())).unwrap();
            for text in formulas {
                let f = parse(text).unwrap();
                let mut dag = Dag::new();
                let root = dag.add(&f, &sig).unwrap();
                let t = TruthTable::build(Arc::new(dag), s.points());
                for i in s.intervals() {
                    assert_eq!(t.value(root, i), naive(&s, i, &f), "{text} at {i:?}");
                }
            }
        }
    }

    #[test]
    fn pop_restores() {
        let sig = Arc::new(Signature::new(["p"]).unwrap());
        let mut dag = Dag::new();
        let root = dag.add(&parse("<B>(pi & p)").unwrap(), &sig).unwrap();
        let mut t = TruthTable::new(Arc::new(dag));
        t.push(sig.set(["p"]).unwrap());
        t.push(LetterSet::new());
        assert!(t.value(root, Interval::new(0, 1)));
        t.pop();
        t.push(LetterSet::new());
        assert_eq!(t.len(), 2);
        assert!(t.value(root, Interval::new(0, 1)));
    }
}
