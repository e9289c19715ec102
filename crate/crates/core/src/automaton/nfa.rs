use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::time::Instant;

use rustc_hash::FxHashMap;

use crate::formula::LetterSet;

/// An automaton over letter sets whose states are generated on demand.
///
/// The empty word is never accepted: initial states must not be accepting.
pub trait Nfa {
    type State: Clone + Eq + Hash + Ord + Debug;

    fn initial_states(&self) -> Vec<Self::State>;
    fn successors(&self, q: &Self::State, a: &LetterSet) -> Vec<Self::State>;
    fn is_accepting(&self, q: &Self::State) -> bool;

    /// Sound under-approximation: `true` only if every continuation,
    /// including the empty one, is accepted.
    fn accepts_everything_from(&self, _q: &Self::State) -> bool {
        false
    }

    /// Sound under-approximation: `true` only if no continuation is accepted.
    fn is_dead(&self, _q: &Self::State) -> bool {
        false
    }

    /// Every letter set stored in `q`.
    fn visit_labels(&self, q: &Self::State, f: &mut dyn FnMut(&LetterSet));

    fn run(&self, word: &[LetterSet]) -> Vec<Self::State> {
        let mut cur = self.initial_states();
        cur.sort();
        cur.dedup();
        for a in word {
            let mut next: Vec<_> = cur.iter().flat_map(|q| self.successors(q, a)).collect();
            next.sort();
            next.dedup();
            cur = next;
        }
        cur
    }

    fn accepts(&self, word: &[LetterSet]) -> bool {
        !word.is_empty() && self.run(word).iter().any(|q| self.is_accepting(q))
    }
}

/// Number of accepting runs on `word`.
pub fn count_accepting_runs<A: Nfa>(a: &A, word: &[LetterSet]) -> u64 {
    if word.is_empty() {
        return 0;
    }
    let mut cur: HashMap<A::State, u64> = HashMap::new();
    for q in a.initial_states() {
        *cur.entry(q).or_default() += 1;
    }
    for l in word {
        let mut next: HashMap<A::State, u64> = HashMap::new();
        for (q, n) in &cur {
            for q2 in a.successors(q, l) {
                *next.entry(q2).or_default() += n;
            }
        }
        cur = next;
    }
    cur.iter()
        .filter(|(q, _)| a.is_accepting(q))
        .map(|(_, n)| n)
        .sum()
}

/// Every accepting run on `word`, as state sequences of length `|word| + 1`.
pub fn accepting_runs<A: Nfa>(a: &A, word: &[LetterSet]) -> Vec<Vec<A::State>> {
    fn go<A: Nfa>(
        a: &A,
        word: &[LetterSet],
        path: &mut Vec<A::State>,
        out: &mut Vec<Vec<A::State>>,
    ) {
        let q = path.last().expect("non-empty path").clone();
        match word.split_first() {
            None => {
                if a.is_accepting(&q) {
                    out.push(path.clone());
                }
            }
            Some((l, rest)) => {
                for q2 in a.successors(&q, l) {
                    path.push(q2);
                    go(a, rest, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    if word.is_empty() {
        return out;
    }
    for q in a.initial_states() {
        go(a, word, &mut vec![q], &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InfixState<S> {
    Pre,
    In(S),
    Post,
}

/// Words with an infix accepted by the inner automaton.
pub struct Infix<A>(pub A);

impl<A: Nfa> Nfa for Infix<A> {
    type State = InfixState<A::State>;

    fn initial_states(&self) -> Vec<Self::State> {
        vec![InfixState::Pre]
    }

    fn successors(&self, q: &Self::State, a: &LetterSet) -> Vec<Self::State> {
        let inner = &self.0;
        match q {
            InfixState::Pre => {
                let mut out = vec![InfixState::Pre];
                for q0 in inner.initial_states() {
                    out.extend(inner.successors(&q0, a).into_iter().map(InfixState::In));
                }
                out
            }
            InfixState::In(q) => {
                let mut out: Vec<_> = inner
                    .successors(q, a)
                    .into_iter()
                    .map(InfixState::In)
                    .collect();
                if inner.is_accepting(q) {
                    out.push(InfixState::Post);
                }
                out
            }
            InfixState::Post => vec![InfixState::Post],
        }
    }

    fn is_accepting(&self, q: &Self::State) -> bool {
        match q {
            InfixState::Pre => false,
            InfixState::In(q) => self.0.is_accepting(q),
            InfixState::Post => true,
        }
    }

    fn accepts_everything_from(&self, q: &Self::State) -> bool {
        match q {
            InfixState::Pre => false,
            InfixState::In(q) => self.0.is_accepting(q) || self.0.accepts_everything_from(q),
            InfixState::Post => true,
        }
    }

    fn is_dead(&self, q: &Self::State) -> bool {
        match q {
            InfixState::In(q) => self.0.is_dead(q),
            _ => false,
        }
    }

    fn visit_labels(&self, q: &Self::State, f: &mut dyn FnMut(&LetterSet)) {
        if let InfixState::In(q) = q {
            self.0.visit_labels(q, f);
        }
    }
}

/// A state of the subset construction: the sorted reachable inner states,
/// dead ones dropped. `start` marks the initial state, before any letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetState<S> {
    pub start: bool,
    pub members: Vec<S>,
}

/// Complement over non-empty words, by lazy determinization.
pub struct Complement<A>(pub A);

impl<A: Nfa> Nfa for Complement<A> {
    type State = SubsetState<A::State>;

    fn initial_states(&self) -> Vec<Self::State> {
        let mut members = self.0.initial_states();
        members.sort();
        members.dedup();
        vec![SubsetState {
            start: true,
            members,
        }]
    }

    fn successors(&self, q: &Self::State, a: &LetterSet) -> Vec<Self::State> {
        let mut members: Vec<A::State> = q
            .members
            .iter()
            .flat_map(|m| self.0.successors(m, a))
            .filter(|m| !self.0.is_dead(m))
            .collect();
        members.sort();
        members.dedup();
        vec![SubsetState {
            start: false,
            members,
        }]
    }

    fn is_accepting(&self, q: &Self::State) -> bool {
        !q.start && !q.members.iter().any(|m| self.0.is_accepting(m))
    }

    fn accepts_everything_from(&self, q: &Self::State) -> bool {
        !q.start && q.members.iter().all(|m| self.0.is_dead(m))
    }

    fn is_dead(&self, q: &Self::State) -> bool {
        q.members.iter().any(|m| self.0.accepts_everything_from(m))
    }

    fn visit_labels(&self, q: &Self::State, f: &mut dyn FnMut(&LetterSet)) {
        for m in &q.members {
            self.0.visit_labels(m, f);
        }
    }
}

/// Synchronous product, accepting the intersection.
pub struct Product<A, B>(pub A, pub B);

impl<A: Nfa, B: Nfa> Nfa for Product<A, B> {
    type State = (A::State, B::State);

    fn initial_states(&self) -> Vec<Self::State> {
        let bs = self.1.initial_states();
        self.0
            .initial_states()
            .into_iter()
            .flat_map(|a| bs.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    fn successors(&self, q: &Self::State, l: &LetterSet) -> Vec<Self::State> {
        let bs = self.1.successors(&q.1, l);
        if bs.is_empty() {
            return Vec::new();
        }
        self.0
            .successors(&q.0, l)
            .into_iter()
            .flat_map(|a| bs.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    fn is_accepting(&self, q: &Self::State) -> bool {
        self.0.is_accepting(&q.0) && self.1.is_accepting(&q.1)
    }

    fn accepts_everything_from(&self, q: &Self::State) -> bool {
        self.0.accepts_everything_from(&q.0) && self.1.accepts_everything_from(&q.1)
    }

    fn is_dead(&self, q: &Self::State) -> bool {
        self.0.is_dead(&q.0) || self.1.is_dead(&q.1)
    }

    fn visit_labels(&self, q: &Self::State, f: &mut dyn FnMut(&LetterSet)) {
        self.0.visit_labels(&q.0, f);
        self.1.visit_labels(&q.1, f);
    }
}

impl<A: Nfa + ?Sized> Nfa for &A {
    type State = A::State;

    fn initial_states(&self) -> Vec<Self::State> {
        (**self).initial_states()
    }

    fn successors(&self, q: &Self::State, a: &LetterSet) -> Vec<Self::State> {
        (**self).successors(q, a)
    }

    fn is_accepting(&self, q: &Self::State) -> bool {
        (**self).is_accepting(q)
    }

    fn accepts_everything_from(&self, q: &Self::State) -> bool {
        (**self).accepts_everything_from(q)
    }

    fn is_dead(&self, q: &Self::State) -> bool {
        (**self).is_dead(q)
    }

    fn visit_labels(&self, q: &Self::State, f: &mut dyn FnMut(&LetterSet)) {
        (**self).visit_labels(q, f)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchLimits {
    pub max_states: Option<usize>,
    pub max_len: Option<usize>,
    pub deadline: Option<Instant>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct SearchStats {
    pub states: usize,
    pub transitions: usize,
    pub levels: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vec<LetterSet>),
    Empty,
    /// The state cap, length cap or deadline was hit first.
    CapHit(&'static str),
}

/// Breadth-first search for the shortest accepted word, lexicographically
/// least among those, given the letters to try from each state.
pub fn emptiness_with_witness<A, F>(
    a: &A,
    letters: F,
    limits: SearchLimits,
) -> (SearchOutcome, SearchStats)
where
    A: Nfa,
    F: Fn(&A::State) -> Vec<LetterSet>,
{
    let mut stats = SearchStats::default();
    let mut index: FxHashMap<A::State, usize> = FxHashMap::default();
    // (parent, letter) per discovered state
    let mut nodes: Vec<(usize, Option<LetterSet>)> = Vec::new();
    let mut frontier: Vec<A::State> = Vec::new();
    let mut init = a.initial_states();
    init.sort();
    init.dedup();
    for q in init {
        if a.is_dead(&q) {
            continue;
        }
        index.insert(q.clone(), nodes.len());
        nodes.push((usize::MAX, None));
        frontier.push(q);
    }
    let word_to = |mut i: usize, nodes: &[(usize, Option<LetterSet>)]| {
        let mut w = Vec::new();
        while let (p, Some(l)) = &nodes[i] {
            w.push(l.clone());
            i = *p;
        }
        w.reverse();
        w
    };
    let mut len = 0;
    while !frontier.is_empty() {
        stats.levels = len;
        if len > 0 {
            if let Some(q) = frontier.iter().find(|q| a.is_accepting(q)) {
                stats.states = nodes.len();
                return (SearchOutcome::Found(word_to(index[q], &nodes)), stats);
            }
        }
        if limits.max_len.is_some_and(|m| len >= m) {
            stats.states = nodes.len();
            return (SearchOutcome::CapHit("length cap"), stats);
        }
        let mut next = Vec::new();
        for q in &frontier {
            if limits.deadline.is_some_and(|d| Instant::now() >= d) {
                stats.states = nodes.len();
                return (SearchOutcome::CapHit("deadline"), stats);
            }
            let from = index[q];
            for l in letters(q) {
                for q2 in a.successors(q, &l) {
                    stats.transitions += 1;
                    if index.contains_key(&q2) || a.is_dead(&q2) {
                        continue;
                    }
                    if limits.max_states.is_some_and(|m| nodes.len() >= m) {
                        stats.states = nodes.len();
                        return (SearchOutcome::CapHit("state cap"), stats);
                    }
                    index.insert(q2.clone(), nodes.len());
                    nodes.push((from, Some(l.clone())));
                    next.push(q2);
                }
            }
        }
        frontier = next;
        len += 1;
    }
    stats.states = nodes.len();
    (SearchOutcome::Empty, stats)
}
