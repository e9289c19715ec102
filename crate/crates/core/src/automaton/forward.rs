use std::cell::RefCell;
use std::collections::HashSet;

use rustc_hash::FxHashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::nfa::Nfa;
use super::AutomatonError;
use crate::formula::{Dag, DagNode, Formula, LetterSet, NodeId, Signature};
use crate::types::{compose1, eval0, Depth1Type, Depth2Basis, Len};

/// Summary of the prefix `[0, k]` read so far.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForwardState {
    /// Type of `[0, k]`; dummy before the first letter.
    pub top: Depth1Type,
    /// `<B>` arguments satisfied by some `[0, h]`, `h < k`.
    pub prefix: FixedBitSet,
    /// Sorted distinct types of the proper suffixes `[j, k]`, `j > 0`.
    pub suffixes: Vec<Depth1Type>,
}

/// Deterministic automaton for a formula of depth at most two, equivalent
/// to [`super::Depth2Nfa`]. Suffix types are tracked forwards instead of
/// guessing the right context.
pub struct ForwardNfa {
    basis: Depth2Basis,
    mask: LetterSet,
    b_args: FixedBitSet,
    e_args: FixedBitSet,
    // Letters still readable at the first point of a long top interval, at
    // the first point of a long suffix, and at the last point.
    first_top: LetterSet,
    first_suffix: LetterSet,
    last: LetterSet,
    // depth-0 arguments of `<E>` true at some singleton
    possible_e: HashSet<NodeId>,
    truths: RefCell<FxHashMap<Depth1Type, FixedBitSet>>,
    table: RefCell<Table>,
}

/// Letters of the depth-0 arguments of `<B>` (or `<E>`) reachable from `root`.
fn edge_letters(dag: &Dag, root: NodeId, dir_b: bool) -> LetterSet {
    let mut out = LetterSet::new();
    for id in dag.reachable(root) {
        let arg = match dag.node(id) {
            DagNode::HsB(a) if dir_b => a,
            DagNode::HsE(a) if !dir_b => a,
            _ => continue,
        };
        if dag.depth(arg) == 0 {
            for n in dag.reachable(arg) {
                if let DagNode::Atom(p) = dag.node(n) {
                    out.insert(p);
                }
            }
        }
    }
    out
}

/// Whether a depth-0 formula holds at some singleton.
fn sometimes0(dag: &Dag, a: NodeId) -> bool {
    let letters: LetterSet = dag
        .reachable(a)
        .into_iter()
        .filter_map(|n| match dag.node(n) {
            DagNode::Atom(p) => Some(p),
            _ => None,
        })
        .collect();
    letters.len() > 12 || letters.subsets().iter().any(|l| eval0(Some(l), dag, a))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum K {
    T,
    F,
    U,
}

impl ForwardNfa {
    pub fn new(psi: &Formula, sig: Arc<Signature>) -> Result<Self, AutomatonError> {
        let psi = psi.canonical();
        if psi.depth() > 2 {
            return Err(AutomatonError::TooDeep(psi.depth()));
        }
        if !psi.is_homogeneous_nf() {
            return Err(AutomatonError::NotHomogeneous);
        }
        let mask = sig.set(psi.letters().iter().map(|l| l.as_ref()))?;
        let basis = Depth2Basis::modal_args(&psi, sig)?;
        let mut b_args = FixedBitSet::with_capacity(basis.len());
        let mut e_args = FixedBitSet::with_capacity(basis.len());
        let dag = basis.dag();
        for id in dag.reachable(basis.root()) {
            match dag.node(id) {
                DagNode::HsB(a) => {
                    if let Some(i) = basis.position(a) {
                        b_args.insert(i);
                    }
                }
                DagNode::HsE(a) => {
                    if let Some(i) = basis.position(a) {
                        e_args.insert(i);
                    }
                }
                _ => {}
            }
        }
        let first_top = edge_letters(dag, basis.root(), true);
        let last = edge_letters(dag, basis.root(), false);
        let mut first_suffix = LetterSet::new();
        for (i, &n) in basis.nodes().iter().enumerate() {
            if e_args.contains(i) {
                first_suffix = first_suffix.union(&edge_letters(dag, n, true));
            }
        }
        let mut possible_e = HashSet::new();
        for id in dag.reachable(basis.root()) {
            if let DagNode::HsE(a) = dag.node(id) {
                if dag.depth(a) == 0 && sometimes0(dag, a) {
                    possible_e.insert(a);
                }
            }
        }
        Ok(ForwardNfa {
            possible_e,
            basis,
            mask,
            b_args,
            e_args,
            first_top,
            first_suffix,
            last,
            truths: RefCell::new(FxHashMap::default()),
            table: RefCell::new(Table::default()),
        })
    }

    pub fn mask(&self) -> &LetterSet {
        &self.mask
    }

    fn truth(&self, t: &Depth1Type, args: &FixedBitSet) -> FixedBitSet {
        let mut cache = self.truths.borrow_mut();
        let mut v = cache
            .entry(t.clone())
            .or_insert_with(|| self.basis.truth(t))
            .clone();
        v.intersect_with(args);
        v
    }

    fn suffix_set(&self, q: &ForwardState) -> FixedBitSet {
        let mut e = FixedBitSet::with_capacity(self.basis.len());
        for s in &q.suffixes {
            e.union_with(&self.truth(s, &self.e_args));
        }
        e
    }

    /// Forgets letters of a long type that no evaluation reads.
    fn project(&self, t: Depth1Type, first: &LetterSet) -> Depth1Type {
        match t.len() {
            Len::Two | Len::ThreePlus => Depth1Type::long(
                t.len(),
                t.first().intersection(first),
                t.last().intersection(&self.last),
            ),
            _ => t,
        }
    }

    pub fn step(&self, q: &ForwardState, a: &LetterSet) -> ForwardState {
        let tau = Depth1Type::point(a.intersection(&self.mask));
        if q.top.is_dummy() {
            return ForwardState {
                top: tau,
                prefix: q.prefix.clone(),
                suffixes: Vec::new(),
            };
        }
        let mut prefix = q.prefix.clone();
        prefix.union_with(&self.truth(&q.top, &self.b_args));
        let mut suffixes = Vec::new();
        if !self.e_args.is_clear() {
            suffixes.extend(
                q.suffixes
                    .iter()
                    .map(|s| self.project(compose1(s, &tau), &self.first_suffix)),
            );
            suffixes.push(tau.clone());
            suffixes.sort();
            suffixes.dedup();
        }
        ForwardState {
            top: self.project(compose1(&q.top, &tau), &self.first_top),
            prefix,
            suffixes,
        }
    }

    /// Value of `node` on every strict extension of the current prefix, in
    /// three-valued logic: `U` when it depends on the letters to come.
    fn future(
        &self,
        q: &ForwardState,
        now: &FixedBitSet,
        node: NodeId,
        memo: &mut [Option<K>],
    ) -> K {
        if let Some(k) = memo[node as usize] {
            return k;
        }
        let dag = self.basis.dag();
        let k = match dag.node(node) {
            DagNode::True => K::T,
            DagNode::False => K::F,
            DagNode::Pi | DagNode::Atom(_) => K::F,
            DagNode::Not(a) => match self.future(q, now, a, memo) {
                K::T => K::F,
                K::F => K::T,
                K::U => K::U,
            },
            DagNode::And(a, b) => match self.future(q, now, a, memo) {
                K::F => K::F,
                x => match (x, self.future(q, now, b, memo)) {
                    (_, K::F) => K::F,
                    (K::T, K::T) => K::T,
                    _ => K::U,
                },
            },
            DagNode::Or(a, b) => match self.future(q, now, a, memo) {
                K::T => K::T,
                x => match (x, self.future(q, now, b, memo)) {
                    (_, K::T) => K::T,
                    (K::F, K::F) => K::F,
                    _ => K::U,
                },
            },
            DagNode::HsB(a) if dag.depth(a) == 0 => {
                if eval0(Some(q.top.first()), dag, a) {
                    K::T
                } else if eval0(None, dag, a) {
                    K::U
                } else {
                    K::F
                }
            }
            DagNode::HsB(a) => match self.basis.position(a) {
                Some(i) if now.contains(i) => K::T,
                _ => K::U,
            },
            DagNode::HsE(a) if dag.depth(a) == 0 => {
                if eval0(None, dag, a) || self.possible_e.contains(&a) {
                    K::U
                } else {
                    K::F
                }
            }
            _ => K::U,
        };
        memo[node as usize] = Some(k);
        k
    }

    fn outlook(&self, q: &ForwardState) -> K {
        if q.top.is_dummy() {
            return K::U;
        }
        let mut now = q.prefix.clone();
        now.union_with(&self.truth(&q.top, &self.b_args));
        let mut memo = vec![None; self.basis.dag().len()];
        self.future(q, &now, self.basis.root(), &mut memo)
    }

    pub fn initial_state(&self) -> ForwardState {
        ForwardState {
            top: Depth1Type::dummy(),
            prefix: FixedBitSet::with_capacity(self.basis.len()),
            suffixes: Vec::new(),
        }
    }

    pub fn accepts_state(&self, q: &ForwardState) -> bool {
        !q.top.is_dummy()
            && self
                .basis
                .eval2(&q.top, &q.prefix, &self.suffix_set(q), self.basis.root())
    }

    fn intern(&self, q: ForwardState) -> u32 {
        if let Some(&id) = self.table.borrow().ids.get(&q) {
            return id;
        }
        let accepting = self.accepts_state(&q);
        let outlook = self.outlook(&q);
        let mut t = self.table.borrow_mut();
        let id = t.states.len() as u32;
        t.ids.insert(q.clone(), id);
        t.states.push(q);
        t.info.push(Info {
            accepting,
            dead: outlook == K::F && !accepting,
            universal: outlook == K::T && accepting,
        });
        id
    }

    /// The state behind an id handed out by this automaton.
    pub fn state(&self, id: u32) -> ForwardState {
        self.table.borrow().states[id as usize].clone()
    }

    pub fn state_count(&self) -> usize {
        self.table.borrow().states.len()
    }

    fn info(&self, id: u32) -> Info {
        self.table.borrow().info[id as usize]
    }
}

#[derive(Clone, Copy)]
struct Info {
    accepting: bool,
    dead: bool,
    universal: bool,
}

#[derive(Default)]
struct Table {
    states: Vec<ForwardState>,
    ids: FxHashMap<ForwardState, u32>,
    info: Vec<Info>,
    next: FxHashMap<(u32, LetterSet), u32>,
}

/// States are interned; ids are only meaningful for the automaton that
/// produced them.
impl Nfa for ForwardNfa {
    type State = u32;

    fn initial_states(&self) -> Vec<u32> {
        vec![self.intern(self.initial_state())]
    }

    fn successors(&self, q: &u32, a: &LetterSet) -> Vec<u32> {
        let a = a.intersection(&self.mask);
        let key = (*q, a);
        if let Some(&n) = self.table.borrow().next.get(&key) {
            return vec![n];
        }
        let next = self.step(&self.state(*q), &key.1);
        let n = self.intern(next);
        self.table.borrow_mut().next.insert(key, n);
        vec![n]
    }

    fn is_accepting(&self, q: &u32) -> bool {
        self.info(*q).accepting
    }

    fn is_dead(&self, q: &u32) -> bool {
        self.info(*q).dead
    }

    fn accepts_everything_from(&self, q: &u32) -> bool {
        self.info(*q).universal
    }

    fn visit_labels(&self, q: &u32, f: &mut dyn FnMut(&LetterSet)) {
        let t = self.table.borrow();
        let q = &t.states[*q as usize];
        q.top.visit_labels(f);
        for s in &q.suffixes {
            s.visit_labels(f);
        }
    }
}
