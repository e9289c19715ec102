use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::nfa::Nfa;
use super::AutomatonError;
use crate::formula::{Formula, LetterSet, Signature};
use crate::types::{
    all_depth1_types, compose1, compose2, entails2, Depth1Type, Depth2Basis, Depth2Type,
};

/// `(L, R, T)`: the type of the prefix read so far, a guessed type of the
/// rest of the input, and the depth-2 type of the prefix with right
/// context `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AutomatonState {
    pub l: Depth1Type,
    pub r: Depth1Type,
    pub t2: Depth2Type,
}

/// The automaton accepting the words whose largest interval satisfies a
/// formula of depth at most two. Right contexts are guessed, so it is
/// nondeterministic but unambiguous.
pub struct Depth2Nfa {
    psi: Formula,
    basis: Depth2Basis,
    mask: LetterSet,
    types: Vec<Depth1Type>,
}

impl Depth2Nfa {
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
        let types = all_depth1_types(&mask);
        Ok(Depth2Nfa {
            psi,
            basis,
            mask,
            types,
        })
    }

    pub fn basis(&self) -> &Depth2Basis {
        &self.basis
    }

    fn unit(&self, l: &Depth1Type, r: &Depth1Type, tau: Depth1Type) -> Depth2Type {
        Depth2Type {
            l: l.clone(),
            r: r.clone(),
            t: tau,
            b: FixedBitSet::with_capacity(self.basis.len()),
            e: FixedBitSet::with_capacity(self.basis.len()),
        }
    }
}

impl Nfa for Depth2Nfa {
    type State = AutomatonState;

    fn initial_states(&self) -> Vec<AutomatonState> {
        self.types
            .iter()
            .map(|r| AutomatonState {
                l: Depth1Type::dummy(),
                r: r.clone(),
                t2: Depth2Type::dummy(Depth1Type::dummy(), r.clone(), &self.basis),
            })
            .collect()
    }

    fn successors(&self, q: &AutomatonState, a: &LetterSet) -> Vec<AutomatonState> {
        let tau = Depth1Type::point(a.intersection(&self.mask));
        let l2 = compose1(&q.l, &tau);
        self.types
            .iter()
            .filter(|r2| compose1(&tau, r2) == q.r)
            .filter_map(|r2| {
                let step = self.unit(&q.l, r2, tau.clone());
                let t2 = compose2(&q.t2, &step, &self.basis).ok()?;
                Some(AutomatonState {
                    l: l2.clone(),
                    r: r2.clone(),
                    t2,
                })
            })
            .collect()
    }

    fn is_accepting(&self, q: &AutomatonState) -> bool {
        q.r.is_dummy()
            && !q.t2.is_dummy()
            && entails2(&q.t2, &self.basis, &self.psi).unwrap_or(false)
    }

    fn is_dead(&self, q: &AutomatonState) -> bool {
        q.r.is_dummy() && !self.is_accepting(q)
    }

    fn visit_labels(&self, q: &AutomatonState, f: &mut dyn FnMut(&LetterSet)) {
        q.l.visit_labels(f);
        q.t2.visit_labels(f);
    }
}
