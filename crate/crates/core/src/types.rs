//! Depth-0/1/2 types of intervals, their composition and entailment.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::{Dag, DagNode, Formula, LetterSet, Node, NodeId, Signature, SignatureError};
use crate::semantics::{Interval, IntervalStructure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("operation is undefined on the dummy type")]
    Dummy,
    #[error("formula has depth {0}, more than allowed")]
    TooDeep(usize),
    #[error("formula is not in homogeneous normal form")]
    NotHomogeneous,
    #[error("depth-2 types need dummy contexts here")]
    Contexts,
    #[error("contexts do not match: {0}")]
    Incompatible(&'static str),
    #[error("formula {0} is not tracked by the depth-2 basis")]
    NotInBasis(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// The depth-0 type: `{pi} ∪ labels` on singletons, empty otherwise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Depth0Type(Option<LetterSet>);

impl Depth0Type {
    pub fn empty() -> Self {
        Depth0Type(None)
    }

    pub fn singleton(labels: LetterSet) -> Self {
        Depth0Type(Some(labels))
    }

    pub fn has_pi(&self) -> bool {
        self.0.is_some()
    }

    pub fn has(&self, letter: u32) -> bool {
        self.0.as_ref().is_some_and(|l| l.contains(letter))
    }

    pub fn labels(&self) -> Option<&LetterSet> {
        self.0.as_ref()
    }
}

impl fmt::Debug for Depth0Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            None => f.write_str("{}"),
            Some(l) => {
                f.write_str("{pi")?;
                for x in l.iter() {
                    write!(f, ",{x}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Len {
    One,
    Two,
    ThreePlus,
    Dummy,
}

/// `(S, T, B, E)`. Only the labels of the two endpoints are stored; `T` is
/// derived from them.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Depth1Type {
    len: Len,
    first: LetterSet,
    last: LetterSet,
}

impl Depth1Type {
    pub fn dummy() -> Self {
        Depth1Type {
            len: Len::Dummy,
            first: LetterSet::new(),
            last: LetterSet::new(),
        }
    }

    pub fn point(labels: LetterSet) -> Self {
        Depth1Type {
            len: Len::One,
            first: labels.clone(),
            last: labels,
        }
    }

    pub fn long(len: Len, first: LetterSet, last: LetterSet) -> Self {
        assert!(matches!(len, Len::Two | Len::ThreePlus));
        Depth1Type { len, first, last }
    }

    pub fn len(&self) -> Len {
        self.len
    }

    pub fn is_dummy(&self) -> bool {
        self.len == Len::Dummy
    }

    pub fn first(&self) -> &LetterSet {
        &self.first
    }

    pub fn last(&self) -> &LetterSet {
        &self.last
    }

    pub fn t(&self) -> Depth0Type {
        match self.len {
            Len::One => Depth0Type::singleton(self.first.clone()),
            _ => Depth0Type::empty(),
        }
    }

    pub fn b(&self) -> Depth0Type {
        match self.len {
            Len::Dummy => Depth0Type::empty(),
            _ => Depth0Type::singleton(self.first.clone()),
        }
    }

    pub fn e(&self) -> Depth0Type {
        match self.len {
            Len::Dummy => Depth0Type::empty(),
            _ => Depth0Type::singleton(self.last.clone()),
        }
    }

    /// Restricts every label to `mask`.
    pub fn project(&self, mask: &LetterSet) -> Self {
        Depth1Type {
            len: self.len,
            first: self.first.intersection(mask),
            last: self.last.intersection(mask),
        }
    }

    pub fn visit_labels(&self, f: &mut dyn FnMut(&LetterSet)) {
        if !self.is_dummy() {
            f(&self.first);
            if self.len != Len::One {
                f(&self.last);
            }
        }
    }

    /// Evaluates a node of depth at most one. Letters are read only at
    /// singletons, as in homogeneous normal form.
    pub fn eval(&self, dag: &Dag, node: NodeId) -> bool {
        debug_assert!(!self.is_dummy() && dag.depth(node) <= 1);
        let first = Some(&self.first);
        let last = Some(&self.last);
        match dag.node(node) {
            DagNode::True => true,
            DagNode::False => false,
            DagNode::Pi => self.len == Len::One,
            DagNode::Atom(p) => self.len == Len::One && self.first.contains(p),
            DagNode::Not(a) => !self.eval(dag, a),
            DagNode::And(a, b) => self.eval(dag, a) && self.eval(dag, b),
            DagNode::Or(a, b) => self.eval(dag, a) || self.eval(dag, b),
            DagNode::HsB(a) => match self.len {
                Len::One | Len::Dummy => false,
                Len::Two => eval0(first, dag, a),
                Len::ThreePlus => eval0(first, dag, a) || eval0(None, dag, a),
            },
            DagNode::HsE(a) => match self.len {
                Len::One | Len::Dummy => false,
                Len::Two => eval0(last, dag, a),
                Len::ThreePlus => eval0(last, dag, a) || eval0(None, dag, a),
            },
            DagNode::BoxB(a) => match self.len {
                Len::One | Len::Dummy => true,
                Len::Two => eval0(first, dag, a),
                Len::ThreePlus => eval0(first, dag, a) && eval0(None, dag, a),
            },
            DagNode::BoxE(a) => match self.len {
                Len::One | Len::Dummy => true,
                Len::Two => eval0(last, dag, a),
                Len::ThreePlus => eval0(last, dag, a) && eval0(None, dag, a),
            },
            DagNode::BoxG(_) => unreachable!("[G] has depth at least two"),
        }
    }
}

/// Evaluates a depth-0 node at a singleton labelled `t`, or at a longer
/// interval when `t` is `None`.
pub fn eval0(t: Option<&LetterSet>, dag: &Dag, node: NodeId) -> bool {
    match dag.node(node) {
        DagNode::True => true,
        DagNode::False => false,
        DagNode::Pi => t.is_some(),
        DagNode::Atom(p) => t.is_some_and(|l| l.contains(p)),
        DagNode::Not(a) => !eval0(t, dag, a),
        DagNode::And(a, b) => eval0(t, dag, a) && eval0(t, dag, b),
        DagNode::Or(a, b) => eval0(t, dag, a) || eval0(t, dag, b),
        _ => unreachable!("modal node at depth zero"),
    }
}

impl fmt::Debug for Depth1Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.len {
            Len::Dummy => f.write_str("dummy"),
            Len::One => write!(f, "len1{:?}", self.t()),
            Len::Two => write!(f, "len2{:?}{:?}", self.b(), self.e()),
            Len::ThreePlus => write!(f, "len3+{:?}{:?}", self.b(), self.e()),
        }
    }
}

impl fmt::Display for Depth1Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn type0(s: &IntervalStructure, i: Interval) -> Depth0Type {
    if i.is_singleton() {
        Depth0Type::singleton(s.points()[i.lo].clone())
    } else {
        Depth0Type::empty()
    }
}

pub fn type1(s: &IntervalStructure, i: Interval) -> Depth1Type {
    let len = match i.len() {
        1 => Len::One,
        2 => Len::Two,
        _ => Len::ThreePlus,
    };
    Depth1Type {
        len,
        first: s.points()[i.lo].clone(),
        last: s.points()[i.hi].clone(),
    }
}

/// The union of two adjacent intervals is never a singleton.
pub fn compose0(_: &Depth0Type, _: &Depth0Type) -> Depth0Type {
    Depth0Type::empty()
}

pub fn compose1(x: &Depth1Type, y: &Depth1Type) -> Depth1Type {
    if x.is_dummy() {
        return y.clone();
    }
    if y.is_dummy() {
        return x.clone();
    }
    let len = if x.len == Len::One && y.len == Len::One {
        Len::Two
    } else {
        Len::ThreePlus
    };
    Depth1Type {
        len,
        first: x.first.clone(),
        last: y.last.clone(),
    }
}

/// Every realizable depth-1 type over `letters`, dummy included.
pub fn all_depth1_types(letters: &LetterSet) -> Vec<Depth1Type> {
    let subsets = letters.subsets();
    let mut out = vec![Depth1Type::dummy()];
    out.extend(subsets.iter().cloned().map(Depth1Type::point));
    for len in [Len::Two, Len::ThreePlus] {
        for a in &subsets {
            for b in &subsets {
                out.push(Depth1Type::long(len, a.clone(), b.clone()));
            }
        }
    }
    out
}

fn check_depth1(alpha: &Formula) -> Result<Formula, TypeError> {
    let c = alpha.canonical();
    if c.depth() > 1 {
        return Err(TypeError::TooDeep(c.depth()));
    }
    if !c.is_homogeneous_nf() {
        return Err(TypeError::NotHomogeneous);
    }
    Ok(c)
}

pub fn entails1(t: &Depth1Type, alpha: &Formula, sig: &Signature) -> Result<bool, TypeError> {
    if t.is_dummy() {
        return Err(TypeError::Dummy);
    }
    let c = check_depth1(alpha)?;
    let mut dag = Dag::new();
    let root = dag.add(&c, sig)?;
    Ok(t.eval(&dag, root))
}

/// The formulas a depth-2 type tracks, indexed by position.
#[derive(Clone, Debug)]
pub struct Depth2Basis {
    dag: Arc<Dag>,
    sig: Arc<Signature>,
    root: NodeId,
    nodes: Vec<NodeId>,
    position: HashMap<NodeId, usize>,
}

impl Depth2Basis {
    /// All subformulas of depth at most one.
    pub fn full(phi: &Formula, sig: Arc<Signature>) -> Result<Self, TypeError> {
        Self::build(phi, sig, |c| c.depth1_subformulas().into_iter().collect())
    }

    /// Only the arguments `alpha` of depth one such that `<B>alpha` or
    /// `<E>alpha` occurs. These are the only members an evaluation of the
    /// reference formula ever consults.
    pub fn modal_args(phi: &Formula, sig: Arc<Signature>) -> Result<Self, TypeError> {
        Self::build(phi, sig, |c| {
            c.subformulas()
                .into_iter()
                .filter_map(|f| match f.node() {
                    Node::HsB(a) | Node::HsE(a) if a.depth() == 1 => Some(a.clone()),
                    _ => None,
                })
                .collect()
        })
    }

    fn build(
        phi: &Formula,
        sig: Arc<Signature>,
        members: impl Fn(&Formula) -> Vec<Formula>,
    ) -> Result<Self, TypeError> {
        let c = phi.canonical();
        if c.depth() > 2 {
            return Err(TypeError::TooDeep(c.depth()));
        }
        let mut dag = Dag::new();
        let root = dag.add(&c, &sig)?;
        let mut nodes = Vec::new();
        for f in members(&c) {
            nodes.push(dag.add(&f, &sig)?);
        }
        nodes.sort_unstable();
        nodes.dedup();
        let position = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        Ok(Depth2Basis {
            dag: Arc::new(dag),
            sig,
            root,
            nodes,
            position,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dag(&self) -> &Arc<Dag> {
        &self.dag
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn members(&self) -> Vec<Formula> {
        self.nodes
            .iter()
            .map(|&n| self.dag.to_formula(n, &self.sig))
            .collect()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.position.get(&node).copied()
    }

    /// The members satisfied by a non-dummy depth-1 type.
    pub fn truth(&self, t: &Depth1Type) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        if t.is_dummy() {
            return out;
        }
        for (i, &n) in self.nodes.iter().enumerate() {
            if t.eval(&self.dag, n) {
                out.insert(i);
            }
        }
        out
    }

    /// Evaluates a node of depth at most two, given the type of the interval
    /// and the members satisfied by some proper prefix / proper suffix.
    pub fn eval2(&self, t: &Depth1Type, b: &FixedBitSet, e: &FixedBitSet, node: NodeId) -> bool {
        let dag = &self.dag;
        if dag.depth(node) <= 1 {
            return t.eval(dag, node);
        }
        match dag.node(node) {
            DagNode::Not(a) => !self.eval2(t, b, e, a),
            DagNode::And(x, y) => self.eval2(t, b, e, x) && self.eval2(t, b, e, y),
            DagNode::Or(x, y) => self.eval2(t, b, e, x) || self.eval2(t, b, e, y),
            DagNode::HsB(a) => b.contains(self.position[&a]),
            DagNode::HsE(a) => e.contains(self.position[&a]),
            n => unreachable!("non-canonical node {n:?} in a basis"),
        }
    }
}

/// `(L, R, T, B, E)` relative to a [`Depth2Basis`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Depth2Type {
    pub l: Depth1Type,
    pub r: Depth1Type,
    pub t: Depth1Type,
    pub b: FixedBitSet,
    pub e: FixedBitSet,
}

impl Depth2Type {
    pub fn dummy(l: Depth1Type, r: Depth1Type, basis: &Depth2Basis) -> Self {
        Depth2Type {
            l,
            r,
            t: Depth1Type::dummy(),
            b: FixedBitSet::with_capacity(basis.len()),
            e: FixedBitSet::with_capacity(basis.len()),
        }
    }

    pub fn is_dummy(&self) -> bool {
        self.t.is_dummy()
    }

    pub fn visit_labels(&self, f: &mut dyn FnMut(&LetterSet)) {
        self.l.visit_labels(f);
        self.r.visit_labels(f);
        self.t.visit_labels(f);
    }
}

impl fmt::Debug for Depth2Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?}, {:?}, {:?}, B{:?}, E{:?})",
            self.l,
            self.r,
            self.t,
            self.b.ones().collect::<Vec<_>>(),
            self.e.ones().collect::<Vec<_>>()
        )
    }
}

pub fn type2(
    s: &IntervalStructure,
    i: Interval,
    basis: &Depth2Basis,
    l: &Depth1Type,
    r: &Depth1Type,
) -> Depth2Type {
    let mut b = FixedBitSet::with_capacity(basis.len());
    for j in i.proper_prefixes() {
        b.union_with(&basis.truth(&compose1(l, &type1(s, j))));
    }
    let mut e = FixedBitSet::with_capacity(basis.len());
    for j in i.proper_suffixes() {
        e.union_with(&basis.truth(&compose1(&type1(s, j), r)));
    }
    Depth2Type {
        l: l.clone(),
        r: r.clone(),
        t: type1(s, i),
        b,
        e,
    }
}

/// Composes the types of adjacent intervals. Needs `L ∘ T = L'` and
/// `T' ∘ R' = R`.
pub fn compose2(
    x: &Depth2Type,
    y: &Depth2Type,
    basis: &Depth2Basis,
) -> Result<Depth2Type, TypeError> {
    if compose1(&x.l, &x.t) != y.l {
        return Err(TypeError::Incompatible("left context"));
    }
    if compose1(&y.t, &y.r) != x.r {
        return Err(TypeError::Incompatible("right context"));
    }
    if x.is_dummy() {
        return Ok(y.clone());
    }
    if y.is_dummy() {
        return Ok(x.clone());
    }
    let mut b = x.b.clone();
    b.union_with(&y.b);
    b.union_with(&basis.truth(&y.l));
    let mut e = x.e.clone();
    e.union_with(&y.e);
    e.union_with(&basis.truth(&x.r));
    Ok(Depth2Type {
        l: x.l.clone(),
        r: y.r.clone(),
        t: compose1(&x.t, &y.t),
        b,
        e,
    })
}

/// Decides `psi` from a depth-2 type with dummy contexts. The basis must be
/// built for `psi`, or for a formula whose tracked members include those of
/// `psi`.
pub fn entails2(t2: &Depth2Type, basis: &Depth2Basis, psi: &Formula) -> Result<bool, TypeError> {
    if !t2.l.is_dummy() || !t2.r.is_dummy() {
        return Err(TypeError::Contexts);
    }
    if t2.is_dummy() {
        return Err(TypeError::Dummy);
    }
    let c = psi.canonical();
    if c.depth() > 2 {
        return Err(TypeError::TooDeep(c.depth()));
    }
    if !c.is_homogeneous_nf() {
        return Err(TypeError::NotHomogeneous);
    }
    let mut dag = (*basis.dag).clone();
    let root = dag.add(&c, &basis.sig)?;
    for id in dag.reachable(root) {
        if let DagNode::HsB(a) | DagNode::HsE(a) = dag.node(id) {
            if dag.depth(a) == 1 && basis.position(a).is_none() {
                return Err(TypeError::NotInBasis(
                    dag.to_formula(a, &basis.sig).to_string(),
                ));
            }
        }
    }
    let view = Depth2Basis {
        dag: Arc::new(dag),
        ..basis.clone()
    };
    Ok(view.eval2(&t2.t, &t2.b, &t2.e, root))
}
